#pragma once

// Patch assessment: exact and AST match, plausibility by running a test
// command, and persisted semantic ratings.

#include <chrono>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/error.hpp"
#include "aprkit/gen.hpp"

namespace aprkit::assess {

/// Byte equality after CRLF/CR -> LF.
bool exact_match(std::string_view candidate, std::string_view reference);

enum class AstResult { match, no_match, parse_failure };

/// Throws syntax::ParseError when the reference itself does not parse.
AstResult ast_match(std::string_view candidate, std::string_view reference,
                    std::string_view language = "java");

class SpliceError : public Error {
 public:
  using Error::Error;
};

/// Where the function under repair lives inside a project.
struct FunctionLocation {
  /// Relative to the project root.
  std::string file;
  int start_line = 1;
  int end_line = 1;
  /// When set, the lines being replaced must equal this text.
  std::optional<std::string> expected;
};

struct TestSpec {
  /// Optional; a failure is reported as build-error.
  std::string build_command;
  std::string test_command;
  std::chrono::milliseconds timeout{300000};
  /// Extra attempts after a failing test run.
  int retries = 0;
  std::vector<std::string> env_denylist;
  std::vector<std::string> env_extra;
};

enum class TestOutcome { pass, fail, timeout, build_error };
std::string to_string(TestOutcome o);

struct TestRun {
  std::string command;
  std::string workdir;
  std::chrono::milliseconds timeout{0};
  TestOutcome outcome = TestOutcome::fail;
  std::string output;
  int exit_code = -1;
  std::chrono::milliseconds elapsed{0};
};

/// Replaces lines start..end of `file_text` with `function_text`.
std::string splice_function(const std::string& file_text, const FunctionLocation& loc,
                            const std::string& function_text);

/// Copies `project` into a private scratch directory, splices the candidate,
/// runs the build and test commands there and removes the copy. `project`
/// itself is never written.
TestRun check_plausible(const std::string& project, const FunctionLocation& loc,
                        const std::string& candidate, const TestSpec& spec);

/// Order-independent digest of every regular file (path and content) and
/// symlink below `root`, as 16 hex digits.
std::string tree_digest(const std::string& root);

// ---- semantic ratings ----

enum class Label { correct, incorrect };
enum class Round { first, tiebreak };
std::string to_string(Label l);
std::string to_string(Round r);
Label parse_label(std::string_view s);
Round parse_round(std::string_view s);

struct SemanticRating {
  std::string bug_id;
  std::size_t rank = 0;
  std::string rater;
  Label label = Label::incorrect;
  Round round = Round::first;
  /// ISO-8601 UTC; filled in on record when empty.
  std::string timestamp;
};

class DuplicateRating : public Error {
 public:
  using Error::Error;
};

class InvalidRating : public Error {
 public:
  using Error::Error;
};

enum class Resolution { correct, incorrect, pending };
std::string to_string(Resolution r);

class NoOverlap : public Error {
 public:
  using Error::Error;
};

class DegenerateMarginals : public Error {
 public:
  using Error::Error;
};

struct Agreement {
  double kappa = 0;
  double observed = 0;
  double expected = 0;
  std::size_t items = 0;
};

/// Append-only rating log. With a path, existing records are loaded and
/// every accepted rating is appended to the file before it is visible.
class RatingStore {
 public:
  RatingStore() = default;
  explicit RatingStore(std::string path);

  /// Throws DuplicateRating or InvalidRating (tiebreak without a
  /// first-round disagreement, empty rater or bug id).
  void record(SemanticRating rating);

  Resolution resolve(const std::string& bug_id, std::size_t rank) const;
  std::vector<SemanticRating> ratings() const;
  std::size_t size() const;

 private:
  std::vector<const SemanticRating*> for_item(const std::string& bug_id, std::size_t rank) const;

  std::string path_;
  mutable std::mutex mutex_;
  std::vector<SemanticRating> ratings_;
  std::map<std::pair<std::string, std::size_t>, std::vector<std::size_t>> index_;
};

Resolution resolve_semantic(const RatingStore& store, const std::string& bug_id,
                            std::size_t rank);

/// Over items both raters labeled in the first round.
Agreement cohen_kappa(const RatingStore& store, const std::string& rater_a,
                      const std::string& rater_b);

// ---- verdicts ----

enum class Plausibility { pass, fail, not_run };
enum class Semantic { unlabeled, correct, incorrect };
std::string to_string(Plausibility p);
std::string to_string(Semantic s);

struct AssessmentVerdict {
  std::string bug_id;
  std::size_t rank = 0;
  bool parse_ok = false;
  Plausibility plausible = Plausibility::not_run;
  bool exact = false;
  bool ast = false;
  Semantic semantic = Semantic::unlabeled;
  std::optional<TestOutcome> test_outcome;
  /// Reconstruction or splice error, if any.
  std::string note;
};

/// Everything needed to run the tests of one bug.
struct PlausibilityJob {
  std::string project;
  FunctionLocation location;
  TestSpec spec;
};

/// Test outcomes keyed by project, file and candidate text; may be shared
/// across calls and threads.
class OutcomeCache {
 public:
  std::optional<TestRun> find(const std::string& key) const;
  void store(const std::string& key, const TestRun& run);
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, TestRun> runs_;
};

struct ClassifyOptions {
  std::string language = "java";
  const RatingStore* ratings = nullptr;
  OutcomeCache* cache = nullptr;
  /// Receives every test run that was actually executed.
  std::vector<TestRun>* runs = nullptr;
};

/// Tiers: exact match (plausible by fiat, no test run), else plausibility,
/// then AST match for plausible candidates. AST matches are semantically
/// correct; other plausible candidates take the resolved rating if any.
std::vector<AssessmentVerdict> classify(const std::string& bug_id,
                                        const std::vector<gen::CandidatePatch>& candidates,
                                        const std::string& reference,
                                        const PlausibilityJob& job,
                                        const ClassifyOptions& options = {});

std::string verdict_to_json(const AssessmentVerdict& v);
AssessmentVerdict verdict_from_json(std::string_view line);

}  // namespace aprkit::assess
