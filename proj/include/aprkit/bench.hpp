#pragma once

// Benchmark driver: manifest loading, per-bug repair runs persisted to an
// append-only record store, bug-level aggregation and report rendering.

#include <chrono>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/assess.hpp"
#include "aprkit/error.hpp"
#include "aprkit/gen.hpp"
#include "aprkit/repr.hpp"

namespace aprkit::bench {

struct BugManifestEntry {
  std::string bug_id;
  /// Absolute, resolved against the manifest's directory.
  std::string project_root;
  /// Run in the parent of project_root when project_root does not exist yet.
  std::string checkout;
  /// Relative to project_root.
  std::string file;
  int start_line = 1;
  int end_line = 1;
  /// Function-relative.
  repr::Region region;
  std::string reference;
  std::string build_command;
  std::string test_command;
  std::vector<std::string> tags;
};

class ManifestError : public Error {
 public:
  ManifestError(std::size_t line, std::string reason);
  std::size_t line() const { return line_; }
  const std::string& reason() const { return reason_; }

 private:
  std::size_t line_;
  std::string reason_;
};

struct Profile {
  std::string name;
  /// Size of the published bug list, checked only on request.
  std::optional<std::size_t> expected_bugs;
  std::vector<std::string> denylist;
};

/// "defects4j-sf" (488, leakage denylist), "humaneval-java" (162), "custom".
const Profile& profile(std::string_view name);
std::vector<std::string> profile_names();

struct LoadOptions {
  std::string profile = "custom";
  /// Fail unless the entry count equals the profile's published size.
  bool check_count = false;
  std::function<void(const std::string&)> log;
};

/// One JSON object per line:
///   {"bug_id", "project_root", "checkout"?, "file", "span": [start, end],
///    "region": [start, end], "reference", "build_command"?, "test_command",
///    "tags"?: [...]}
std::vector<BugManifestEntry> load_manifest(const std::string& path,
                                            const LoadOptions& options = {});

struct Timings {
  std::chrono::milliseconds generation{0};
  std::chrono::milliseconds assessment{0};
};

struct RunRecord {
  std::string bug_id;
  repr::ReprPair pair;
  std::string prompt;
  std::vector<gen::CandidatePatch> candidates;
  std::vector<assess::AssessmentVerdict> verdicts;
  Timings timings;
  /// Set when the bug could not be processed, e.g. "BackendUnreachable: ...".
  std::string error;

  /// A record is final unless generation failed on the backend side; those
  /// are retried on resume.
  bool complete() const;
};

std::string record_to_json(const RunRecord& r);
RunRecord record_from_json(std::string_view line);

/// Append-only JSONL of RunRecords. Later records for the same (bug, pair)
/// supersede earlier ones.
class RecordStore {
 public:
  explicit RecordStore(std::string path);
  const std::string& path() const { return path_; }
  /// An unparsable last line (an interrupted write) is ignored.
  std::vector<RunRecord> load() const;
  /// Cuts an unterminated last line so appends start on a fresh line.
  void drop_torn_tail();
  void append(const RunRecord& r);

 private:
  std::string path_;
  std::mutex mutex_;
};

struct AssessConfig {
  std::chrono::milliseconds timeout{300000};
  int retries = 0;
  std::vector<std::string> env_denylist;
  std::vector<std::string> env_extra;
};

enum class PromptMode { infill, chat };

struct RunOptions {
  /// 0 = one per hardware thread.
  std::size_t workers = 0;
  /// Empty disables persistence and resume.
  std::string record_store;
  PromptMode prompt_mode = PromptMode::infill;
  std::string chat_template;
  repr::Markers markers;
  const assess::RatingStore* ratings = nullptr;
  /// Receives every executed test run together with the project digest
  /// taken before and after it.
  std::function<void(const std::string& bug_id, const std::string& before,
                     const std::string& after)>
      on_tree_check;
  std::function<void(const std::string&)> log;
};

/// Runs every entry not already complete in the record store and returns one
/// record per entry in manifest order. Per-bug failures are recorded, never
/// thrown. Throws InvalidPair for invalid pairs.
std::vector<RunRecord> run_benchmark(const std::vector<BugManifestEntry>& manifest,
                                     repr::ReprPair pair, const gen::GenerationConfig& gen_cfg,
                                     const AssessConfig& assess_cfg,
                                     const RunOptions& options = {});

struct Counts {
  std::size_t plausible = 0;
  std::size_t exact = 0;
  std::size_t ast = 0;
  /// AST matches plus rated-correct candidates.
  std::size_t semantic = 0;
  /// Plausible bugs whose only semantic evidence is unrated.
  std::size_t pending = 0;

  bool operator==(const Counts&) const = default;
};

struct AggregateRow {
  std::string label;
  std::size_t universe = 0;
  Counts counts;
  /// top_k[k-1]: counts using only candidates of rank < k.
  std::vector<Counts> top_k;
  std::size_t failed_bugs = 0;
  std::vector<std::string> violations;
};

struct AggregateTable {
  std::vector<AggregateRow> rows;

  bool monotone() const;
};

/// Running totals over every aggregate computed in this process.
struct AggregateStats {
  std::size_t tables = 0;
  std::size_t rows = 0;
  std::size_t violations = 0;
};
AggregateStats aggregate_stats();

/// Lists monotonicity violations of a row: exact <= ast <= semantic <=
/// plausible <= universe, pending + semantic <= plausible.
std::vector<std::string> check_monotone(const AggregateRow& row);

/// Bug-level any-candidate counts, one row per representation pair: first
/// those in `pairs` (present even without records), then others in order of
/// first appearance. Verdict-level exact => ast is checked too.
AggregateTable aggregate(const std::vector<RunRecord>& records,
                         const std::vector<repr::ReprPair>& pairs = {}, std::size_t max_k = 10);

enum class ReportFormat { plain, delimited, markdown };
ReportFormat parse_report_format(std::string_view s);

/// Violating rows are preceded by a WARNING banner.
std::string report(const AggregateTable& table, ReportFormat format, char delimiter = '\t');
std::string report_top_k(const AggregateTable& table);

}  // namespace aprkit::bench
