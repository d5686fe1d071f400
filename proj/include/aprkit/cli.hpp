#pragma once

// Command-line front end. `run_cli` is the whole program minus process
// setup, so tests drive it in-process.

#include <cstddef>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "aprkit/bench.hpp"
#include "aprkit/corpus.hpp"
#include "aprkit/error.hpp"
#include "aprkit/gen.hpp"
#include "aprkit/repr.hpp"

namespace aprkit::cli {

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct Paths {
  std::string workdir = ".";
  std::string record_store = "records.jsonl";
  std::string ratings = "ratings.jsonl";
};

struct ToolConfig {
  repr::Markers markers;
  corpus::CorpusFilterConfig filter;
  gen::GenerationConfig generation;
  bench::AssessConfig assessment;
  corpus::TrainingConfig training;
  bench::PromptMode prompt_mode = bench::PromptMode::infill;
  /// Empty means the built-in template.
  std::string chat_template;
  /// 0 = one worker per hardware thread.
  std::size_t parallelism = 0;
  Paths paths;
};

using Environment = std::map<std::string, std::string>;

/// REPAIR_BACKEND_URL and REPAIR_CONFIG from the process environment.
Environment process_environment();

/// Applies a JSON config document over `base`. Unknown keys are rejected.
ToolConfig parse_tool_config(const std::string& json_text, ToolConfig base = {});

/// Defaults, then the file (`config_path`, else REPAIR_CONFIG), then
/// REPAIR_BACKEND_URL. Relative paths in the file resolve against its
/// directory. Flags are applied by the caller on top.
ToolConfig load_tool_config(const std::optional<std::string>& config_path,
                            const Environment& env);

/// JSON rendering of every field, suitable as a starting config file.
std::string dump_tool_config(const ToolConfig& config);

/// Exit codes: 0 success, 1 runtime failure, 2 usage error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const Environment& env);

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Environment& env = {});

}  // namespace aprkit::cli
