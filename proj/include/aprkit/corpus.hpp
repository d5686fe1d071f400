#pragma once

// Fine-tuning dataset construction from a corpus of bug-fix diffs.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/error.hpp"
#include "aprkit/repr.hpp"
#include "aprkit/syntax.hpp"

namespace aprkit::corpus {

using repr::Region;
using repr::ReprPair;
using syntax::SourceFunction;

using LogSink = std::function<void(const std::string&)>;

struct FunctionPair {
  std::string id;
  SourceFunction buggy;
  SourceFunction fixed;
  Region region;
  /// Diff file (or before-file) the pair came from, relative to the corpus root.
  std::string provenance;
};

enum class Layout { megadiff, file_pairs };

/// Megadiff layout: `<id>.diff` files next to `<id>/before/...` (and
/// optionally `<id>/after/...`; otherwise the diff is applied to before/).
/// File-pairs layout: `<name>_before.<ext>` next to `<name>_after.<ext>`.
/// A root containing any `.diff` or `.patch` file is treated as Megadiff.
Layout detect_layout(const std::string& root);

/// Why a diff did or did not yield a pair.
enum class Outcome {
  pair,
  parse_failure,
  missing_source,
  multiple_files,
  multiple_functions,
  no_function_change,
  change_outside_function,
  function_added_or_removed,
};

std::string_view to_string(Outcome o);

struct DiffResult {
  std::string provenance;
  Outcome outcome = Outcome::pair;
  std::string detail;
  std::optional<FunctionPair> pair;
};

struct IngestOptions {
  std::size_t workers = 0;
  std::string language = "java";
  LogSink log;
};

/// Every diff in the corpus, in sorted provenance order.
std::vector<DiffResult> scan_corpus(const std::string& root, const IngestOptions& options = {});

/// Pairs from diffs that change exactly one function of one file and nothing
/// else. Rejections are logged, never fatal.
std::vector<FunctionPair> ingest_diff_corpus(const std::string& root,
                                             const IngestOptions& options = {});

/// Classifies a single before/after file revision.
DiffResult pair_from_revisions(const syntax::SourceFile& before, const syntax::SourceFile& after,
                               std::string id, std::string provenance);

Region derive_region(const FunctionPair& pair);

/// Keeps the first of each (buggy, fixed) text pair, comparing lines with
/// trailing whitespace removed.
std::vector<FunctionPair> dedupe(const std::vector<FunctionPair>& pairs);

struct LeakageEntry {
  std::string bug_id;
  std::string function;
};

/// JSONL records {bug_id, function}.
std::vector<LeakageEntry> load_denylist(const std::string& path);

/// Bug ids excluded for training-data overlap with Defects4J.
const std::vector<std::string>& default_leakage_ids();

/// Drops pairs whose fixed text contains a denylisted function (whitespace
/// runs are collapsed before comparison).
std::vector<FunctionPair> exclude_leakage(const std::vector<FunctionPair>& pairs,
                                          const std::vector<LeakageEntry>& denylist,
                                          const LogSink& log = {});

class UnknownTokenizer : public Error {
 public:
  using Error::Error;
};

class TokenizerFailure : public Error {
 public:
  using Error::Error;
};

/// "approximate": identifier/number runs, each other character, and each
/// whitespace run count one token. "external:<command>": the command reads
/// the text on stdin and prints the count.
std::size_t count_tokens(std::string_view text, std::string_view tokenizer = "approximate");

/// Throws UnknownTokenizer for unsupported ids without counting anything.
void check_tokenizer(std::string_view tokenizer);

struct CorpusFilterConfig {
  std::size_t max_length = 1024;
  std::string tokenizer = "approximate";
};

struct TrainingSample {
  std::string id;
  ReprPair pair;
  std::string input;
  std::string output;
  std::size_t token_count = 0;
};

struct DatasetStats {
  std::size_t considered = 0;
  std::size_t emitted = 0;
  std::size_t dropped_over_length = 0;
  std::size_t region_mismatch = 0;
  /// Samples whose output does not reconstruct the fixed function.
  std::size_t unrepresentable = 0;
};

struct BuildOptions {
  std::size_t workers = 0;
  LogSink log;
};

/// Samples in input order. Throws InvalidPair.
std::vector<TrainingSample> build_dataset(const std::vector<FunctionPair>& pairs, ReprPair pair,
                                          const CorpusFilterConfig& filter,
                                          const repr::Markers& markers = {},
                                          DatasetStats* stats = nullptr,
                                          const BuildOptions& options = {});

/// JSONL records {id, pair, input, output, token_count}. Returns the count.
std::size_t emit_dataset(const std::vector<TrainingSample>& samples, const std::string& out);

std::vector<TrainingSample> read_dataset(const std::string& path);

struct TrainingConfig {
  std::string base_model = "codellama-7b";
  std::string learning_rate = "5e-4";
  std::string schedule = "cosine";
  int epochs = 2;
  int batch_size_per_device = 16;
  std::string optimizer = "adamw";
  int lora_rank = 8;
  int lora_alpha = 16;
  std::string lora_dropout = "0.05";
  std::vector<std::string> target_layers = {"q_proj", "v_proj"};
  std::size_t max_length = 1024;
};

class MixedDataset : public Error {
 public:
  using Error::Error;
};

/// The single pair tag used in a dataset file; nullopt when it is empty.
/// Throws MixedDataset when records carry different tags.
std::optional<ReprPair> dataset_pair(const std::string& path);

/// Flat `key=value` lines. `pair` adds a representation line.
std::string render_training_config(const TrainingConfig& config,
                                   std::optional<ReprPair> pair = std::nullopt);

}  // namespace aprkit::corpus
