#include "aprkit/bench.hpp"

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <semaphore>
#include <set>
#include <sstream>

#include "aprkit/corpus.hpp"
#include "aprkit/parallel.hpp"
#include "aprkit/process.hpp"
#include "aprkit/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace aprkit::bench {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

std::mutex stats_mutex;
AggregateStats stats;

std::chrono::milliseconds since(Clock::time_point start) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
}

std::pair<int, int> read_range(const json& j, std::size_t line, const char* key) {
  if (!j.contains(key)) throw ManifestError(line, std::string("missing \"") + key + "\"");
  const auto& r = j[key];
  if (!r.is_array() || r.size() != 2 || !r[0].is_number_integer() || !r[1].is_number_integer())
    throw ManifestError(line, std::string("\"") + key + "\" must be [start, end]");
  return {r[0].get<int>(), r[1].get<int>()};
}

std::string required_string(const json& j, std::size_t line, const char* key) {
  if (!j.contains(key) || !j[key].is_string())
    throw ManifestError(line, std::string("missing \"") + key + "\"");
  auto s = j[key].get<std::string>();
  if (text::trim(s).empty()) throw ManifestError(line, std::string("empty \"") + key + "\"");
  return s;
}

ordered_json candidate_json(const gen::CandidatePatch& c) {
  ordered_json j;
  j["rank"] = c.rank;
  j["raw_output"] = c.raw_output;
  j["reconstructed"] = c.reconstructed ? ordered_json(*c.reconstructed) : ordered_json(nullptr);
  j["reconstruct_error"] =
      c.reconstruct_error ? ordered_json(*c.reconstruct_error) : ordered_json(nullptr);
  return j;
}

template <class Fn>
void log_to(const Fn& log, const std::string& msg) {
  if (log) log(msg);
}

RunRecord run_one(const BugManifestEntry& e, repr::ReprPair pair,
                  const gen::GenerationConfig& gen_cfg, const AssessConfig& assess_cfg,
                  const RunOptions& options, std::counting_semaphore<>& in_flight,
                  assess::OutcomeCache& cache) {
  RunRecord rec;
  rec.bug_id = e.bug_id;
  rec.pair = pair;

  if (!fs::exists(e.project_root) && !e.checkout.empty()) {
    process::Options o;
    o.command = e.checkout;
    o.workdir = fs::path(e.project_root).parent_path().string();
    auto r = process::run_shell(o);
    if (!r.ok()) {
      rec.error = "CheckoutError: exit " + std::to_string(r.exit_code) + ": " + r.output;
      return rec;
    }
  }

  syntax::SourceFunction fn;
  try {
    auto path = (fs::path(e.project_root) / e.file).string();
    auto lines = text::split_lines(text::read_file(path));
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    if (static_cast<std::size_t>(e.end_line) > lines.size())
      throw assess::SpliceError(e.file + " has only " + std::to_string(lines.size()) + " lines");
    fn.file = e.file;
    fn.start_line = e.start_line;
    fn.end_line = e.end_line;
    fn.text = text::join_lines(lines, e.start_line - 1, e.end_line);
    if (options.prompt_mode == PromptMode::chat)
      rec.prompt = gen::build_chat_prompt(fn, e.region, options.markers,
                                          options.chat_template.empty()
                                              ? gen::default_chat_template()
                                              : options.chat_template);
    else
      rec.prompt = gen::build_infill_prompt(fn, e.region, pair.input, options.markers);
  } catch (const Error& ex) {
    rec.error = std::string("InputError: ") + ex.what();
    return rec;
  }

  auto t0 = Clock::now();
  gen::GenerationResult gen;
  try {
    in_flight.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{in_flight};
    gen = gen::request_candidates(gen_cfg, rec.prompt, e.bug_id);
  } catch (const gen::BackendUnreachable& ex) {
    rec.error = std::string("BackendUnreachable: ") + ex.what();
  } catch (const gen::BackendError& ex) {
    rec.error = std::string("BackendError: ") + ex.what();
  } catch (const gen::Timeout& ex) {
    rec.error = std::string("Timeout: ") + ex.what();
  }
  rec.timings.generation = since(t0);
  if (!rec.error.empty()) return rec;
  if (gen.shortfall() > 0)
    log_to(options.log, e.bug_id + ": backend returned " + std::to_string(gen.outputs.size()) +
                            " of " + std::to_string(gen.requested) + " candidates");

  rec.candidates = gen::make_candidates(e.bug_id, gen.outputs, fn, e.region, pair, options.markers);

  auto t1 = Clock::now();
  assess::PlausibilityJob job;
  job.project = e.project_root;
  job.location = {e.file, e.start_line, e.end_line, fn.text};
  job.spec.build_command = e.build_command;
  job.spec.test_command = e.test_command;
  job.spec.timeout = assess_cfg.timeout;
  job.spec.retries = assess_cfg.retries;
  job.spec.env_denylist = assess_cfg.env_denylist;
  job.spec.env_extra = assess_cfg.env_extra;

  std::vector<assess::TestRun> runs;
  assess::ClassifyOptions copts;
  copts.ratings = options.ratings;
  copts.cache = &cache;
  copts.runs = &runs;
  std::string before;
  if (options.on_tree_check) before = assess::tree_digest(e.project_root);
  rec.verdicts = assess::classify(e.bug_id, rec.candidates, e.reference, job, copts);
  if (options.on_tree_check && !runs.empty())
    options.on_tree_check(e.bug_id, before, assess::tree_digest(e.project_root));
  rec.timings.assessment = since(t1);
  return rec;
}

}  // namespace

ManifestError::ManifestError(std::size_t line, std::string reason)
    : Error("manifest line " + std::to_string(line) + ": " + reason),
      line_(line),
      reason_(std::move(reason)) {}

const Profile& profile(std::string_view name) {
  static const std::vector<Profile> profiles = {
      {"custom", std::nullopt, {}},
      {"defects4j-sf", 488, corpus::default_leakage_ids()},
      {"humaneval-java", 162, {}},
  };
  for (const auto& p : profiles)
    if (p.name == name) return p;
  throw Error("unknown benchmark profile '" + std::string(name) + "'");
}

std::vector<std::string> profile_names() { return {"custom", "defects4j-sf", "humaneval-java"}; }

std::vector<BugManifestEntry> load_manifest(const std::string& path, const LoadOptions& options) {
  const auto& prof = profile(options.profile);
  std::ifstream in(path);
  if (!in) throw ManifestError(0, "cannot open " + path);
  auto base = fs::absolute(path).parent_path();
  std::set<std::string> denied(prof.denylist.begin(), prof.denylist.end());
  std::set<std::string> seen;
  std::vector<BugManifestEntry> out;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    auto trimmed = text::trim(raw);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    json j;
    try {
      j = json::parse(trimmed);
    } catch (const json::exception& ex) {
      throw ManifestError(lineno, std::string("invalid JSON: ") + ex.what());
    }
    if (!j.is_object()) throw ManifestError(lineno, "expected an object");

    BugManifestEntry e;
    e.bug_id = required_string(j, lineno, "bug_id");
    if (!seen.insert(e.bug_id).second)
      throw ManifestError(lineno, "duplicate bug_id " + e.bug_id);
    e.project_root = (base / required_string(j, lineno, "project_root")).lexically_normal().string();
    e.checkout = j.value("checkout", std::string());
    e.file = required_string(j, lineno, "file");
    std::tie(e.start_line, e.end_line) = read_range(j, lineno, "span");
    if (e.start_line < 1 || e.end_line < e.start_line)
      throw ManifestError(lineno, "invalid function span");
    auto [rs, re] = read_range(j, lineno, "region");
    e.region = {rs, re};
    try {
      repr::validate_region(e.region, e.end_line - e.start_line + 1);
    } catch (const repr::InvalidRegion& ex) {
      throw ManifestError(lineno, std::string("region outside the function span: ") + ex.what());
    }
    e.reference = required_string(j, lineno, "reference");
    e.build_command = j.value("build_command", std::string());
    e.test_command = required_string(j, lineno, "test_command");
    if (j.contains("tags")) {
      if (!j["tags"].is_array()) throw ManifestError(lineno, "\"tags\" must be a list");
      for (const auto& t : j["tags"]) e.tags.push_back(t.get<std::string>());
    }
    if (denied.count(e.bug_id)) {
      log_to(options.log, "excluded " + e.bug_id + " (" + prof.name + " denylist)");
      continue;
    }
    out.push_back(std::move(e));
  }
  if (options.check_count && prof.expected_bugs && out.size() != *prof.expected_bugs)
    throw ManifestError(lineno, "profile " + prof.name + " expects " +
                                    std::to_string(*prof.expected_bugs) + " bugs, found " +
                                    std::to_string(out.size()));
  return out;
}

bool RunRecord::complete() const {
  return error.rfind("Backend", 0) != 0 && error.rfind("Timeout", 0) != 0 &&
         error.rfind("CheckoutError", 0) != 0;
}

std::string record_to_json(const RunRecord& r) {
  ordered_json j;
  j["bug_id"] = r.bug_id;
  j["pair"] = r.pair.to_string();
  j["prompt"] = r.prompt;
  j["candidates"] = ordered_json::array();
  for (const auto& c : r.candidates) j["candidates"].push_back(candidate_json(c));
  j["verdicts"] = ordered_json::array();
  for (const auto& v : r.verdicts)
    j["verdicts"].push_back(ordered_json::parse(assess::verdict_to_json(v)));
  j["timings"] = {{"generation_ms", r.timings.generation.count()},
                  {"assessment_ms", r.timings.assessment.count()}};
  j["error"] = r.error;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

RunRecord record_from_json(std::string_view line) {
  auto j = json::parse(line);
  RunRecord r;
  r.bug_id = j.at("bug_id");
  auto pair = repr::ReprPair::parse(j.at("pair").get<std::string>());
  if (!pair) throw Error("record has an unknown pair");
  r.pair = *pair;
  r.prompt = j.value("prompt", std::string());
  for (const auto& c : j.at("candidates")) {
    gen::CandidatePatch p;
    p.bug_id = r.bug_id;
    p.rank = c.at("rank");
    p.raw_output = c.at("raw_output");
    if (!c.at("reconstructed").is_null()) p.reconstructed = c["reconstructed"].get<std::string>();
    if (!c.at("reconstruct_error").is_null())
      p.reconstruct_error = c["reconstruct_error"].get<std::string>();
    r.candidates.push_back(std::move(p));
  }
  for (const auto& v : j.at("verdicts")) r.verdicts.push_back(assess::verdict_from_json(v.dump()));
  if (j.contains("timings")) {
    r.timings.generation = std::chrono::milliseconds(j["timings"].value("generation_ms", 0));
    r.timings.assessment = std::chrono::milliseconds(j["timings"].value("assessment_ms", 0));
  }
  r.error = j.value("error", std::string());
  return r;
}

RecordStore::RecordStore(std::string path) : path_(std::move(path)) {}

std::vector<RunRecord> RecordStore::load() const {
  std::vector<RunRecord> out;
  std::ifstream in(path_);
  if (!in) return out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      out.push_back(record_from_json(line));
    } catch (const std::exception& ex) {
      // A torn final line from an interrupted run is dropped.
      if (in.peek() == EOF) break;
      throw Error(path_ + ":" + std::to_string(lineno) + ": " + ex.what());
    }
  }
  return out;
}

void RecordStore::drop_torn_tail() {
  std::lock_guard lock(mutex_);
  if (!fs::exists(path_)) return;
  auto content = text::read_file(path_);
  if (content.empty() || content.back() == '\n') return;
  auto keep = content.rfind('\n');
  fs::resize_file(path_, keep == std::string::npos ? 0 : keep + 1);
}

void RecordStore::append(const RunRecord& r) {
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << record_to_json(r) << '\n';
  out.flush();
  if (!out) throw Error("cannot append to " + path_);
}

std::vector<RunRecord> run_benchmark(const std::vector<BugManifestEntry>& manifest,
                                     repr::ReprPair pair, const gen::GenerationConfig& gen_cfg,
                                     const AssessConfig& assess_cfg, const RunOptions& options) {
  if (!repr::valid_pair(pair))
    throw repr::InvalidPair(pair.to_string() + " is not a valid representation pair");

  std::optional<RecordStore> store;
  std::map<std::string, RunRecord> done;
  if (!options.record_store.empty()) {
    store.emplace(options.record_store);
    store->drop_torn_tail();
    for (auto& r : store->load())
      if (r.pair == pair) done[r.bug_id] = std::move(r);
  }

  std::vector<RunRecord> out(manifest.size());
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < manifest.size(); ++i) {
    auto it = done.find(manifest[i].bug_id);
    if (it != done.end() && it->second.complete())
      out[i] = it->second;
    else
      todo.push_back(i);
  }
  if (todo.size() < manifest.size())
    log_to(options.log, "resuming: " + std::to_string(manifest.size() - todo.size()) +
                            " bugs already done");

  std::counting_semaphore<> in_flight(
      static_cast<std::ptrdiff_t>(std::max<std::size_t>(1, gen_cfg.max_in_flight)));
  assess::OutcomeCache cache;
  parallel_for(todo.size(), options.workers, [&](std::size_t k) {
    auto i = todo[k];
    RunRecord rec;
    try {
      rec = run_one(manifest[i], pair, gen_cfg, assess_cfg, options, in_flight, cache);
    } catch (const std::exception& ex) {
      rec = RunRecord{};
      rec.bug_id = manifest[i].bug_id;
      rec.pair = pair;
      rec.error = std::string("Error: ") + ex.what();
    }
    if (!rec.error.empty()) log_to(options.log, rec.bug_id + ": " + rec.error);
    if (store) store->append(rec);
    out[i] = std::move(rec);
  });
  return out;
}

bool AggregateTable::monotone() const {
  for (const auto& r : rows)
    if (!r.violations.empty()) return false;
  return true;
}

AggregateStats aggregate_stats() {
  std::lock_guard lock(stats_mutex);
  return stats;
}

std::vector<std::string> check_monotone(const AggregateRow& row) {
  std::vector<std::string> v;
  const auto& c = row.counts;
  auto need = [&](std::size_t a, const char* an, std::size_t b, const char* bn) {
    if (a > b)
      v.push_back(std::string(an) + " (" + std::to_string(a) + ") > " + bn + " (" +
                  std::to_string(b) + ")");
  };
  need(c.exact, "exact", c.ast, "ast");
  need(c.ast, "ast", c.semantic, "semantic");
  need(c.semantic, "semantic", c.plausible, "plausible");
  need(c.plausible, "plausible", row.universe, "universe");
  need(c.semantic + c.pending, "semantic+pending", c.plausible, "plausible");
  return v;
}

AggregateTable aggregate(const std::vector<RunRecord>& records,
                         const std::vector<repr::ReprPair>& pairs, std::size_t max_k) {
  AggregateTable table;
  std::set<std::string> have;
  std::map<std::string, std::map<std::string, const RunRecord*>> latest;
  auto add_row = [&](const std::string& label) {
    if (have.insert(label).second) table.rows.push_back({label, 0, {}, {}, 0, {}});
  };
  for (const auto& p : pairs) add_row(p.to_string());
  for (const auto& r : records) {
    auto label = r.pair.to_string();
    add_row(label);
    latest[label][r.bug_id] = &r;
  }
  for (auto& row : table.rows) {
    row.top_k.assign(max_k, {});
    for (const auto& [bug, rec] : latest[row.label]) {
      ++row.universe;
      if (!rec->error.empty()) ++row.failed_bugs;
      for (std::size_t k = 0; k <= max_k; ++k) {
        bool plausible = false, exact = false, ast = false, semantic = false, unrated = false;
        for (const auto& v : rec->verdicts) {
          if (k > 0 && v.rank >= k) continue;
          if (v.exact && !v.ast)
            row.violations.push_back(bug + " #" + std::to_string(v.rank) +
                                     ": exact match without AST match");
          bool p = v.plausible == assess::Plausibility::pass;
          plausible |= p;
          exact |= v.exact;
          ast |= v.ast;
          semantic |= v.ast || v.semantic == assess::Semantic::correct;
          unrated |= p && !v.ast && v.semantic == assess::Semantic::unlabeled;
        }
        Counts& c = k == 0 ? row.counts : row.top_k[k - 1];
        c.plausible += plausible;
        c.exact += exact;
        c.ast += ast;
        c.semantic += semantic;
        c.pending += !semantic && unrated;
      }
    }
    // Verdict violations were collected once per k; keep one copy.
    std::sort(row.violations.begin(), row.violations.end());
    row.violations.erase(std::unique(row.violations.begin(), row.violations.end()),
                         row.violations.end());
    for (auto& m : check_monotone(row)) row.violations.push_back(std::move(m));
  }
  std::lock_guard lock(stats_mutex);
  ++stats.tables;
  stats.rows += table.rows.size();
  for (const auto& r : table.rows) stats.violations += r.violations.size();
  return table;
}

ReportFormat parse_report_format(std::string_view s) {
  if (s == "plain") return ReportFormat::plain;
  if (s == "delimited" || s == "tsv" || s == "csv") return ReportFormat::delimited;
  if (s == "markdown" || s == "md") return ReportFormat::markdown;
  throw Error("unknown report format '" + std::string(s) + "'");
}

std::string report(const AggregateTable& table, ReportFormat format, char delimiter) {
  static const std::vector<std::string> header = {"Representation", "Bugs",      "Plausible",
                                                  "Exact Match",    "AST Match", "Semantic Match",
                                                  "Pending"};
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : table.rows)
    cells.push_back({r.label, std::to_string(r.universe), std::to_string(r.counts.plausible),
                     std::to_string(r.counts.exact), std::to_string(r.counts.ast),
                     std::to_string(r.counts.semantic), std::to_string(r.counts.pending)});

  std::ostringstream out;
  for (const auto& r : table.rows)
    for (const auto& v : r.violations)
      out << "WARNING: monotonicity violated in " << r.label << ": " << v << "\n";
  if (!table.monotone()) out << "\n";

  switch (format) {
    case ReportFormat::delimited: {
      auto emit = [&](const std::vector<std::string>& row) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? std::string(1, delimiter) : "") << row[i];
        out << "\n";
      };
      emit(header);
      for (const auto& row : cells) emit(row);
      break;
    }
    case ReportFormat::markdown: {
      out << "|";
      for (const auto& h : header) out << " " << h << " |";
      out << "\n|---|";
      for (std::size_t i = 1; i < header.size(); ++i) out << "---:|";
      out << "\n";
      for (const auto& row : cells) {
        out << "|";
        for (const auto& c : row) out << " " << c << " |";
        out << "\n";
      }
      break;
    }
    case ReportFormat::plain: {
      std::vector<std::size_t> width(header.size());
      for (std::size_t i = 0; i < header.size(); ++i) width[i] = header[i].size();
      for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
      auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
          if (i) line += "  ";
          auto pad = std::string(width[i] - row[i].size(), ' ');
          line += i == 0 ? row[i] + pad : pad + row[i];
        }
        out << text::rtrim(line) << "\n";
      };
      emit(header);
      for (const auto& row : cells) emit(row);
      break;
    }
  }
  return out.str();
}

std::string report_top_k(const AggregateTable& table) {
  std::ostringstream out;
  for (const auto& r : table.rows) {
    out << r.label << " (" << r.universe << " bugs)\n";
    out << "  k  plausible  exact  ast  semantic\n";
    for (std::size_t k = 0; k < r.top_k.size(); ++k) {
      const auto& c = r.top_k[k];
      char buf[96];
      std::snprintf(buf, sizeof buf, "%3zu  %9zu  %5zu  %3zu  %8zu\n", k + 1, c.plausible, c.exact,
                    c.ast, c.semantic);
      out << buf;
    }
  }
  return out.str();
}

}  // namespace aprkit::bench
