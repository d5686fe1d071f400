#include "aprkit/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "aprkit/assess.hpp"
#include "aprkit/syntax.hpp"
#include "aprkit/text.hpp"

namespace aprkit::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using repr::ReprPair;

namespace {

// ---- config ----

template <class Fn>
void each_field(const json& obj, const std::string& section, Fn&& fn) {
  if (!obj.is_object()) throw ConfigError(section + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!fn(key, value)) throw ConfigError("unknown config key: " + section + key);
  }
}

template <class T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ConfigError("bad value for config key " + key + ": " + v.dump());
  }
}

std::size_t get_count(const json& v, const std::string& key) {
  if (!v.is_number_unsigned()) throw ConfigError("expected a non-negative integer for " + key);
  return v.get<std::size_t>();
}

std::chrono::milliseconds get_ms(const json& v, const std::string& key) {
  return std::chrono::milliseconds(get_count(v, key));
}

bench::PromptMode parse_prompt_mode(std::string_view s) {
  if (s == "infill") return bench::PromptMode::infill;
  if (s == "chat") return bench::PromptMode::chat;
  throw ConfigError("prompt mode must be infill or chat, got " + std::string(s));
}

std::string_view to_string(bench::PromptMode m) {
  return m == bench::PromptMode::chat ? "chat" : "infill";
}

void apply_config(const json& doc, ToolConfig& c) {
  each_field(doc, "", [&](const std::string& key, const json& v) {
    if (key == "markers") {
      each_field(v, "markers.", [&](const std::string& k, const json& x) {
        auto s = get_as<std::string>(x, "markers." + k);
        if (k == "fill_token") c.markers.fill_token = s;
        else if (k == "start_comment") c.markers.start_comment = s;
        else if (k == "end_comment") c.markers.end_comment = s;
        else if (k == "buggy_header") c.markers.buggy_header = s;
        else if (k == "comment_prefix") c.markers.comment_prefix = s;
        else return false;
        return true;
      });
    } else if (key == "filter") {
      each_field(v, "filter.", [&](const std::string& k, const json& x) {
        if (k == "max_length") c.filter.max_length = get_count(x, "filter." + k);
        else if (k == "tokenizer") c.filter.tokenizer = get_as<std::string>(x, "filter." + k);
        else return false;
        return true;
      });
    } else if (key == "generation") {
      auto& g = c.generation;
      each_field(v, "generation.", [&](const std::string& k, const json& x) {
        auto name = "generation." + k;
        if (k == "backend") g.backend = get_as<std::string>(x, name);
        else if (k == "num_candidates") g.num_candidates = get_count(x, name);
        else if (k == "max_new_tokens") g.max_new_tokens = get_count(x, name);
        else if (k == "stop_tokens") g.stop_tokens = get_as<std::vector<std::string>>(x, name);
        else if (k == "timeout_ms") g.timeout = get_ms(x, name);
        else if (k == "retries") g.retries = static_cast<int>(get_count(x, name));
        else if (k == "backoff_ms") g.backoff = get_ms(x, name);
        else if (k == "max_in_flight") g.max_in_flight = get_count(x, name);
        else if (k == "prompt_mode") c.prompt_mode = parse_prompt_mode(get_as<std::string>(x, name));
        else if (k == "chat_template") c.chat_template = get_as<std::string>(x, name);
        else return false;
        return true;
      });
    } else if (key == "assessment") {
      auto& a = c.assessment;
      each_field(v, "assessment.", [&](const std::string& k, const json& x) {
        auto name = "assessment." + k;
        if (k == "timeout_ms") a.timeout = get_ms(x, name);
        else if (k == "retries") a.retries = static_cast<int>(get_count(x, name));
        else if (k == "env_denylist") a.env_denylist = get_as<std::vector<std::string>>(x, name);
        else if (k == "env_extra") a.env_extra = get_as<std::vector<std::string>>(x, name);
        else return false;
        return true;
      });
    } else if (key == "training") {
      auto& t = c.training;
      each_field(v, "training.", [&](const std::string& k, const json& x) {
        auto name = "training." + k;
        if (k == "base_model") t.base_model = get_as<std::string>(x, name);
        else if (k == "learning_rate") t.learning_rate = get_as<std::string>(x, name);
        else if (k == "schedule") t.schedule = get_as<std::string>(x, name);
        else if (k == "epochs") t.epochs = static_cast<int>(get_count(x, name));
        else if (k == "batch_size_per_device")
          t.batch_size_per_device = static_cast<int>(get_count(x, name));
        else if (k == "optimizer") t.optimizer = get_as<std::string>(x, name);
        else if (k == "lora_rank") t.lora_rank = static_cast<int>(get_count(x, name));
        else if (k == "lora_alpha") t.lora_alpha = static_cast<int>(get_count(x, name));
        else if (k == "lora_dropout") t.lora_dropout = get_as<std::string>(x, name);
        else if (k == "target_layers") t.target_layers = get_as<std::vector<std::string>>(x, name);
        else return false;
        return true;
      });
    } else if (key == "parallelism") {
      c.parallelism = get_count(v, key);
    } else if (key == "paths") {
      each_field(v, "paths.", [&](const std::string& k, const json& x) {
        auto s = get_as<std::string>(x, "paths." + k);
        if (k == "workdir") c.paths.workdir = s;
        else if (k == "record_store") c.paths.record_store = s;
        else if (k == "ratings") c.paths.ratings = s;
        else return false;
        return true;
      });
    } else {
      return false;
    }
    return true;
  });
}

std::string in_workdir(const ToolConfig& c, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(c.paths.workdir) / p).lexically_normal().string();
}

// ---- helpers ----

struct UsageError : Error {
  using Error::Error;
};

std::string valid_pairs_text() {
  std::string s;
  for (const auto& p : repr::all_valid_pairs()) s += (s.empty() ? "" : ", ") + p.to_string();
  return s;
}

ReprPair parse_pair_arg(const std::string& s) {
  auto p = ReprPair::parse(s);
  if (!p) throw UsageError("cannot parse representation pair '" + s + "'; valid pairs: " +
                           valid_pairs_text());
  if (!repr::valid_pair(*p))
    throw UsageError(p->to_string() + " is not a valid representation pair; OR2 requires a "
                     "localized input (IR2-IR4) and localized inputs pair only with OR2. "
                     "Valid pairs: " + valid_pairs_text());
  return *p;
}

repr::Region parse_region_arg(const std::string& s) {
  auto sep = s.find_first_of(":-");
  try {
    std::size_t used = 0;
    if (sep == std::string::npos) {
      int line = std::stoi(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return {line, line};
    }
    auto a = s.substr(0, sep), b = s.substr(sep + 1);
    int start = std::stoi(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    int end = std::stoi(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return {start, end};
  } catch (const std::logic_error&) {
    throw UsageError("region must be START:END (function-relative, inclusive), got '" + s + "'");
  }
}

syntax::SourceFunction find_function(const std::string& path, const std::string& name,
                                     std::optional<int> line) {
  if (!fs::is_regular_file(path)) throw Error("cannot read " + path);
  syntax::SourceFile file{path, text::read_file(path)};
  std::vector<syntax::SourceFunction> hits;
  for (auto& fn : syntax::extract_functions(file)) {
    if (fn.name != name) continue;
    if (line && (*line < fn.start_line || *line > fn.end_line)) continue;
    hits.push_back(std::move(fn));
  }
  if (hits.empty()) throw Error("function not found: " + name + " in " + path);
  if (hits.size() > 1) {
    std::string where;
    for (const auto& h : hits) where += " " + std::to_string(h.start_line);
    throw Error("function " + name + " is ambiguous in " + path + " (starts at lines" + where +
                "); pass --line");
  }
  return hits.front();
}

assess::Semantic to_semantic(assess::Resolution r) {
  switch (r) {
    case assess::Resolution::correct: return assess::Semantic::correct;
    case assess::Resolution::incorrect: return assess::Semantic::incorrect;
    default: return assess::Semantic::unlabeled;
  }
}

/// Plausible non-AST candidates take their current resolved rating.
void apply_ratings(std::vector<bench::RunRecord>& records, const assess::RatingStore& store) {
  for (auto& r : records)
    for (auto& v : r.verdicts)
      if (v.plausible == assess::Plausibility::pass && !v.ast)
        v.semantic = to_semantic(assess::resolve_semantic(store, v.bug_id, v.rank));
}

void write_verdicts(const std::vector<bench::RunRecord>& records, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  for (const auto& r : records)
    for (const auto& v : r.verdicts) out << assess::verdict_to_json(v) << '\n';
  if (!out) throw Error("write failed: " + path);
}

std::string fixed4(double x) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << x;
  return s.str();
}

// ---- commands ----

struct Globals {
  std::optional<std::string> config;
  std::optional<std::size_t> workers;
  bool verbose = false;
};

struct Context {
  const Globals& globals;
  const Environment& env;
  std::ostream& out;
  std::ostream& err;

  ToolConfig config() const {
    auto c = load_tool_config(globals.config, env);
    if (globals.workers) c.parallelism = *globals.workers;
    return c;
  }
  std::function<void(const std::string&)> log() const {
    if (!globals.verbose) return {};
    return [this](const std::string& m) { err << m << '\n'; };
  }
};

struct DatasetArgs {
  std::string corpus;
  std::string pair;
  std::string out;
  std::optional<std::string> denylist;
  std::optional<std::size_t> max_length;
  std::optional<std::string> tokenizer;
};

int cmd_dataset(const Context& ctx, const DatasetArgs& a) {
  auto pair = parse_pair_arg(a.pair);
  auto cfg = ctx.config();
  if (a.max_length) cfg.filter.max_length = *a.max_length;
  if (a.tokenizer) cfg.filter.tokenizer = *a.tokenizer;
  corpus::check_tokenizer(cfg.filter.tokenizer);
  if (!fs::is_directory(a.corpus)) throw Error("corpus root is not a directory: " + a.corpus);

  auto log = ctx.log();
  auto pairs = corpus::ingest_diff_corpus(a.corpus, {cfg.parallelism, "java", log});
  auto unique = corpus::dedupe(pairs);
  std::vector<corpus::LeakageEntry> denylist;
  if (a.denylist) denylist = corpus::load_denylist(*a.denylist);
  auto clean = corpus::exclude_leakage(unique, denylist, log);
  corpus::DatasetStats stats;
  auto samples = corpus::build_dataset(clean, pair, cfg.filter, cfg.markers, &stats,
                                       {cfg.parallelism, log});
  corpus::emit_dataset(samples, a.out);

  ctx.out << "ingested=" << pairs.size() << " deduped=" << pairs.size() - unique.size()
          << " excluded=" << unique.size() - clean.size()
          << " dropped-over-length=" << stats.dropped_over_length
          << " unrepresentable=" << stats.unrepresentable + stats.region_mismatch
          << " emitted=" << samples.size() << '\n';
  return 0;
}

struct ExportArgs {
  std::optional<std::string> dataset;
  std::optional<std::string> out;
  std::optional<std::size_t> max_length;
};

int cmd_export_config(const Context& ctx, const ExportArgs& a) {
  auto cfg = ctx.config();
  if (a.max_length) cfg.filter.max_length = *a.max_length;
  cfg.training.max_length = cfg.filter.max_length;
  std::optional<ReprPair> pair;
  if (a.dataset) {
    if (!fs::is_regular_file(*a.dataset)) throw Error("cannot read " + *a.dataset);
    pair = corpus::dataset_pair(*a.dataset);
  }
  auto rendered = corpus::render_training_config(cfg.training, pair);
  if (a.out) text::write_file(*a.out, rendered);
  else ctx.out << rendered;
  return 0;
}

struct ShowArgs {
  std::string file;
  std::string function;
  std::optional<int> line;
  std::optional<std::string> region;
  std::string kind;
  std::optional<std::string> fixed;
};

int cmd_show(const Context& ctx, const ShowArgs& a) {
  auto in_kind = repr::parse_input_kind(a.kind);
  auto out_kind = repr::parse_output_kind(a.kind);
  if (!in_kind && !out_kind) throw UsageError("--kind must be one of IR1-IR4 or OR1-OR4");
  if (out_kind && !a.fixed) throw UsageError(a.kind + " needs the fixed revision (--fixed)");
  auto cfg = ctx.config();

  auto fn = find_function(a.file, a.function, a.line);
  std::optional<syntax::SourceFunction> fixed;
  if (a.fixed) fixed = find_function(*a.fixed, a.function, std::nullopt);

  repr::Region region;
  if (a.region) region = parse_region_arg(*a.region);
  else if (fixed) region = repr::derive_region(fn.text, fixed->text);
  else if (in_kind == repr::InputKind::IR1) region = {1, fn.line_count()};
  else throw UsageError("--region is required without --fixed");
  repr::validate_region(region, fn.line_count());

  if (in_kind) ctx.out << repr::build_input(fn, region, *in_kind, cfg.markers) << '\n';
  else ctx.out << repr::build_output(fn, *fixed, region, *out_kind) << '\n';
  return 0;
}

struct RepairArgs {
  std::string manifest;
  std::string pair = "IR4xOR2";
  std::optional<std::string> backend;
  std::optional<std::string> records;
  bool no_records = false;
  std::optional<std::string> ratings;
  std::optional<std::string> verdicts;
  std::string format = "plain";
  std::string profile = "custom";
  bool check_count = false;
  std::optional<std::size_t> num_candidates;
  std::optional<double> test_timeout;
  std::optional<std::string> prompt_mode;
  bool top_k = false;
};

int cmd_repair(const Context& ctx, const RepairArgs& a) {
  auto pair = parse_pair_arg(a.pair);
  auto format = bench::parse_report_format(a.format);
  auto cfg = ctx.config();
  if (a.backend) cfg.generation.backend = *a.backend;
  if (a.num_candidates) cfg.generation.num_candidates = *a.num_candidates;
  if (a.test_timeout)
    cfg.assessment.timeout = std::chrono::milliseconds(static_cast<long>(*a.test_timeout * 1000));
  if (a.prompt_mode) cfg.prompt_mode = parse_prompt_mode(*a.prompt_mode);

  auto log = ctx.log();
  auto manifest = bench::load_manifest(a.manifest, {a.profile, a.check_count, log});

  std::optional<assess::RatingStore> ratings;
  auto ratings_path = a.ratings ? *a.ratings : in_workdir(cfg, cfg.paths.ratings);
  if (fs::exists(ratings_path)) ratings.emplace(ratings_path);

  bench::RunOptions opts;
  opts.workers = cfg.parallelism;
  if (!a.no_records) opts.record_store = a.records ? *a.records : in_workdir(cfg, cfg.paths.record_store);
  opts.prompt_mode = cfg.prompt_mode;
  opts.chat_template = cfg.chat_template.empty() ? gen::default_chat_template() : cfg.chat_template;
  opts.markers = cfg.markers;
  opts.ratings = ratings ? &*ratings : nullptr;
  opts.log = log;

  auto records = bench::run_benchmark(manifest, pair, cfg.generation, cfg.assessment, opts);
  if (ratings) apply_ratings(records, *ratings);
  auto table = bench::aggregate(records, {pair}, cfg.generation.num_candidates);

  std::size_t failed = 0, unreachable = 0;
  for (const auto& r : records) {
    if (r.error.empty()) continue;
    ++failed;
    if (r.error.starts_with("BackendUnreachable")) ++unreachable;
  }
  if (unreachable > 0)
    ctx.err << "warning: backend unreachable at " << cfg.generation.backend << " for "
            << unreachable << " bug(s); those bugs count as unrepaired\n";
  if (failed > 0) {
    ctx.err << "warning: " << failed << " of " << records.size() << " bugs failed\n";
    for (const auto& r : records)
      if (!r.error.empty()) ctx.err << "  " << r.bug_id << ": " << r.error << '\n';
  }

  ctx.out << bench::report(table, format);
  if (a.top_k) ctx.out << bench::report_top_k(table);
  if (a.verdicts) write_verdicts(records, *a.verdicts);
  return 0;
}

struct ReportArgs {
  std::optional<std::string> records;
  std::optional<std::string> ratings;
  std::vector<std::string> pairs;
  std::string format = "plain";
  bool top_k = false;
  std::optional<std::string> verdicts;
};

int cmd_report(const Context& ctx, const ReportArgs& a) {
  auto format = bench::parse_report_format(a.format);
  std::vector<ReprPair> pairs;
  for (const auto& p : a.pairs) pairs.push_back(parse_pair_arg(p));
  auto cfg = ctx.config();
  auto path = a.records ? *a.records : in_workdir(cfg, cfg.paths.record_store);
  if (!fs::is_regular_file(path)) throw Error("no record store at " + path);
  auto records = bench::RecordStore(path).load();
  auto ratings_path = a.ratings ? *a.ratings : in_workdir(cfg, cfg.paths.ratings);
  if (fs::exists(ratings_path)) apply_ratings(records, assess::RatingStore(ratings_path));
  if (!pairs.empty()) {
    std::erase_if(records, [&](const bench::RunRecord& r) {
      return std::find(pairs.begin(), pairs.end(), r.pair) == pairs.end();
    });
  }
  auto table = bench::aggregate(records, pairs, cfg.generation.num_candidates);
  ctx.out << bench::report(table, format);
  if (a.top_k) ctx.out << bench::report_top_k(table);
  if (a.verdicts) write_verdicts(records, *a.verdicts);
  return 0;
}

struct RateArgs {
  std::optional<std::string> ratings;
  std::string bug;
  std::size_t rank = 0;
  std::string label;
  std::string rater;
  bool tiebreak = false;
};

int cmd_rate(const Context& ctx, const RateArgs& a) {
  auto cfg = ctx.config();
  auto label = assess::parse_label(a.label);
  assess::RatingStore store(a.ratings ? *a.ratings : in_workdir(cfg, cfg.paths.ratings));
  store.record({a.bug, a.rank, a.rater, label,
                a.tiebreak ? assess::Round::tiebreak : assess::Round::first, {}});
  ctx.out << a.bug << " #" << a.rank << ": " << assess::to_string(store.resolve(a.bug, a.rank))
          << '\n';
  return 0;
}

struct KappaArgs {
  std::optional<std::string> ratings;
  std::string rater_a;
  std::string rater_b;
};

int cmd_kappa(const Context& ctx, const KappaArgs& a) {
  auto cfg = ctx.config();
  auto path = a.ratings ? *a.ratings : in_workdir(cfg, cfg.paths.ratings);
  if (!fs::is_regular_file(path)) throw Error("no ratings at " + path);
  auto agreement = assess::cohen_kappa(assess::RatingStore(path), a.rater_a, a.rater_b);
  ctx.out << "kappa=" << fixed4(agreement.kappa) << " observed=" << fixed4(agreement.observed)
          << " expected=" << fixed4(agreement.expected) << " items=" << agreement.items << '\n';
  return 0;
}

}  // namespace

Environment process_environment() {
  Environment env;
  for (const char* name : {"REPAIR_BACKEND_URL", "REPAIR_CONFIG"})
    if (const char* v = std::getenv(name)) env[name] = v;
  return env;
}

ToolConfig parse_tool_config(const std::string& json_text, ToolConfig base) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  apply_config(doc, base);
  return base;
}

ToolConfig load_tool_config(const std::optional<std::string>& config_path,
                            const Environment& env) {
  ToolConfig c;
  std::optional<std::string> path = config_path;
  if (!path) {
    if (auto it = env.find("REPAIR_CONFIG"); it != env.end() && !it->second.empty())
      path = it->second;
  }
  if (path) {
    if (!fs::is_regular_file(*path)) throw ConfigError("config file not found: " + *path);
    try {
      c = parse_tool_config(text::read_file(*path));
    } catch (const ConfigError& e) {
      throw ConfigError(*path + ": " + e.what());
    }
    auto dir = fs::absolute(*path).parent_path();
    if (fs::path(c.paths.workdir).is_relative())
      c.paths.workdir = (dir / c.paths.workdir).lexically_normal().string();
  }
  if (auto it = env.find("REPAIR_BACKEND_URL"); it != env.end() && !it->second.empty())
    c.generation.backend = it->second;
  return c;
}

std::string dump_tool_config(const ToolConfig& c) {
  json j;
  j["markers"] = {{"fill_token", c.markers.fill_token},
                  {"start_comment", c.markers.start_comment},
                  {"end_comment", c.markers.end_comment},
                  {"buggy_header", c.markers.buggy_header},
                  {"comment_prefix", c.markers.comment_prefix}};
  j["filter"] = {{"max_length", c.filter.max_length}, {"tokenizer", c.filter.tokenizer}};
  const auto& g = c.generation;
  j["generation"] = {{"backend", g.backend},
                     {"num_candidates", g.num_candidates},
                     {"max_new_tokens", g.max_new_tokens},
                     {"stop_tokens", g.stop_tokens},
                     {"timeout_ms", g.timeout.count()},
                     {"retries", g.retries},
                     {"backoff_ms", g.backoff.count()},
                     {"max_in_flight", g.max_in_flight},
                     {"prompt_mode", to_string(c.prompt_mode)},
                     {"chat_template", c.chat_template}};
  const auto& a = c.assessment;
  j["assessment"] = {{"timeout_ms", a.timeout.count()},
                     {"retries", a.retries},
                     {"env_denylist", a.env_denylist},
                     {"env_extra", a.env_extra}};
  const auto& t = c.training;
  j["training"] = {{"base_model", t.base_model},
                   {"learning_rate", t.learning_rate},
                   {"schedule", t.schedule},
                   {"epochs", t.epochs},
                   {"batch_size_per_device", t.batch_size_per_device},
                   {"optimizer", t.optimizer},
                   {"lora_rank", t.lora_rank},
                   {"lora_alpha", t.lora_alpha},
                   {"lora_dropout", t.lora_dropout},
                   {"target_layers", t.target_layers}};
  j["parallelism"] = c.parallelism;
  j["paths"] = {{"workdir", c.paths.workdir},
                {"record_store", c.paths.record_store},
                {"ratings", c.paths.ratings}};
  return j.dump(2) + "\n";
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            const Environment& env) {
  CLI::App app{"Program-repair toolkit: code representations, fine-tuning datasets, "
               "candidate generation and patch assessment.",
               "aprkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "aprkit 0.1.0");

  Globals globals;
  app.add_option("--config", globals.config,
                 "JSON configuration file (default: $REPAIR_CONFIG)");
  app.add_option("-j,--workers", globals.workers, "Worker threads, 0 = one per core");
  app.add_flag("-v,--verbose", globals.verbose, "Log progress to stderr");

  Context ctx{globals, env, out, err};
  std::function<int()> action;

  DatasetArgs ds;
  auto* dataset = app.add_subcommand("dataset", "Build a fine-tuning dataset from a diff corpus");
  dataset->add_option("corpus", ds.corpus, "Corpus root directory")->required();
  dataset->add_option("--pair", ds.pair, "Representation pair, e.g. IR4xOR2")->required();
  dataset->add_option("-o,--out", ds.out, "Output JSONL file")->required();
  dataset->add_option("--denylist", ds.denylist, "JSONL of {bug_id, function} to exclude");
  dataset->add_option("--max-length", ds.max_length, "Token limit for input + output");
  dataset->add_option("--tokenizer", ds.tokenizer, "approximate | external:<command>");
  dataset->callback([&] { action = [&] { return cmd_dataset(ctx, ds); }; });

  ExportArgs ex;
  auto* exporter = app.add_subcommand("export-config", "Write the fine-tuning job configuration");
  exporter->add_option("--dataset", ex.dataset, "Dataset whose representation pair is recorded");
  exporter->add_option("--max-length", ex.max_length, "Token limit");
  exporter->add_option("-o,--out", ex.out, "Output file (default: stdout)");
  exporter->callback([&] { action = [&] { return cmd_export_config(ctx, ex); }; });

  ShowArgs sh;
  auto* show = app.add_subcommand("show", "Render one input or output representation");
  show->add_option("file", sh.file, "Java source file (buggy revision)")->required();
  show->add_option("-f,--function", sh.function, "Function name")->required();
  show->add_option("--line", sh.line, "Any line inside the function, for overloads");
  show->add_option("-r,--region", sh.region, "Function-relative START:END");
  show->add_option("-k,--kind", sh.kind, "IR1-IR4 or OR1-OR4")->required();
  show->add_option("--fixed", sh.fixed, "Fixed revision of the file (required for OR kinds)");
  show->callback([&] { action = [&] { return cmd_show(ctx, sh); }; });

  RepairArgs rp;
  auto* repair = app.add_subcommand("repair", "Generate and assess patches for a benchmark");
  repair->add_option("manifest", rp.manifest, "Bug manifest (JSONL)")->required();
  repair->add_option("--pair", rp.pair, "Representation pair")->capture_default_str();
  repair->add_option("--backend", rp.backend, "Generation endpoint (default: $REPAIR_BACKEND_URL)");
  repair->add_option("--records", rp.records, "Record store for resuming runs");
  repair->add_flag("--no-records", rp.no_records, "Do not persist or resume");
  repair->add_option("--ratings", rp.ratings, "Semantic rating log");
  repair->add_option("--verdicts", rp.verdicts, "Write per-candidate verdicts (JSONL)");
  repair->add_option("--format", rp.format, "plain | delimited | markdown")->capture_default_str();
  repair->add_option("--profile", rp.profile, "custom | defects4j-sf | humaneval-java")
      ->capture_default_str();
  repair->add_flag("--check-count", rp.check_count, "Require the profile's bug count");
  repair->add_option("-n,--num-candidates", rp.num_candidates, "Candidates per bug");
  repair->add_option("--test-timeout", rp.test_timeout, "Seconds per candidate test run");
  repair->add_option("--prompt-mode", rp.prompt_mode, "infill | chat");
  repair->add_flag("--top-k", rp.top_k, "Also print counts by candidate budget");
  repair->callback([&] { action = [&] { return cmd_repair(ctx, rp); }; });

  ReportArgs rr;
  auto* rep = app.add_subcommand("report", "Aggregate a record store into a results table");
  rep->add_option("--records", rr.records, "Record store");
  rep->add_option("--ratings", rr.ratings, "Semantic rating log");
  rep->add_option("--pair", rr.pairs, "Restrict to these pairs (repeatable)");
  rep->add_option("--format", rr.format, "plain | delimited | markdown")->capture_default_str();
  rep->add_flag("--top-k", rr.top_k, "Also print counts by candidate budget");
  rep->add_option("--verdicts", rr.verdicts, "Write per-candidate verdicts (JSONL)");
  rep->callback([&] { action = [&] { return cmd_report(ctx, rr); }; });

  RateArgs ra;
  auto* rate = app.add_subcommand("rate", "Record a semantic-equivalence rating");
  rate->add_option("bug", ra.bug, "Bug id")->required();
  rate->add_option("rank", ra.rank, "Candidate rank")->required();
  rate->add_option("label", ra.label, "correct | incorrect")->required();
  rate->add_option("--rater", ra.rater, "Rater name")->required();
  rate->add_option("--ratings", ra.ratings, "Rating log (JSONL)");
  rate->add_flag("--tiebreak", ra.tiebreak, "Third-rater decision after a disagreement");
  rate->callback([&] { action = [&] { return cmd_rate(ctx, ra); }; });

  KappaArgs ka;
  auto* kappa = app.add_subcommand("kappa", "Cohen's kappa between two raters");
  kappa->add_option("rater_a", ka.rater_a, "First rater")->required();
  kappa->add_option("rater_b", ka.rater_b, "Second rater")->required();
  kappa->add_option("--ratings", ka.ratings, "Rating log (JSONL)");
  kappa->callback([&] { action = [&] { return cmd_kappa(ctx, ka); }; });

  auto* config = app.add_subcommand("config", "Print the effective configuration as JSON");
  config->callback([&] { action = [&] {
    out << dump_tool_config(ctx.config());
    return 0;
  }; });

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const bench::ManifestError& e) {
    err << "error: manifest line " << e.line() << ": " << e.reason() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const Environment& env) {
  std::vector<const char*> argv{"aprkit"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err, env);
}

}  // namespace aprkit::cli
