#include "aprkit/assess.hpp"

#include <algorithm>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>

#include "aprkit/process.hpp"
#include "aprkit/syntax.hpp"
#include "aprkit/text.hpp"
#include "json.hpp"

namespace fs = std::filesystem;

namespace aprkit::assess {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

class ScratchDir {
 public:
  ScratchDir() {
    std::random_device rd;
    for (int i = 0; i < 100; ++i) {
      auto p = fs::temp_directory_path() / ("aprkit-plausible-" + std::to_string(rd()));
      if (fs::create_directory(p)) {
        path_ = p;
        return;
      }
    }
    throw Error("cannot create a scratch directory");
  }
  ~ScratchDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

std::string utc_now() {
  std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

process::Result run_step(const std::string& command, const fs::path& dir, const TestSpec& spec,
                         std::chrono::milliseconds timeout) {
  process::Options o;
  o.command = command;
  o.workdir = dir.string();
  o.timeout = timeout;
  o.env_denylist = spec.env_denylist;
  o.env_extra = spec.env_extra;
  return process::run_shell(o);
}

std::chrono::milliseconds remaining(const TestSpec& spec, std::chrono::milliseconds used) {
  if (spec.timeout.count() <= 0) return std::chrono::milliseconds(0);
  return std::max(std::chrono::milliseconds(1), spec.timeout - used);
}

std::string rating_key(const SemanticRating& r) {
  return r.bug_id + '\0' + std::to_string(r.rank) + '\0' + r.rater + '\0' + to_string(r.round);
}

ordered_json rating_to_json(const SemanticRating& r) {
  ordered_json j;
  j["bug_id"] = r.bug_id;
  j["rank"] = r.rank;
  j["rater"] = r.rater;
  j["label"] = to_string(r.label);
  j["round"] = to_string(r.round);
  j["timestamp"] = r.timestamp;
  return j;
}

}  // namespace

bool exact_match(std::string_view candidate, std::string_view reference) {
  return text::normalize_newlines(candidate) == text::normalize_newlines(reference);
}

AstResult ast_match(std::string_view candidate, std::string_view reference,
                    std::string_view language) {
  auto ref = syntax::normalize(syntax::parse(reference, language));
  syntax::NormalizedTree cand;
  try {
    cand = syntax::normalize(syntax::parse(candidate, language));
  } catch (const syntax::ParseError&) {
    return AstResult::parse_failure;
  }
  return cand == ref ? AstResult::match : AstResult::no_match;
}

std::string to_string(TestOutcome o) {
  switch (o) {
    case TestOutcome::pass: return "pass";
    case TestOutcome::fail: return "fail";
    case TestOutcome::timeout: return "timeout";
    case TestOutcome::build_error: return "build-error";
  }
  return "fail";
}

std::string splice_function(const std::string& file_text, const FunctionLocation& loc,
                            const std::string& function_text) {
  auto lines = text::split_lines(file_text);
  bool terminated = !file_text.empty() && file_text.back() == '\n';
  if (terminated) lines.pop_back();
  if (loc.start_line < 1 || loc.end_line < loc.start_line ||
      static_cast<std::size_t>(loc.end_line) > lines.size())
    throw SpliceError(loc.file + ": lines " + std::to_string(loc.start_line) + "-" +
                      std::to_string(loc.end_line) + " are outside a file of " +
                      std::to_string(lines.size()) + " lines");
  auto begin = lines.begin() + (loc.start_line - 1);
  auto end = lines.begin() + loc.end_line;
  if (loc.expected &&
      text::join_lines(lines, loc.start_line - 1, loc.end_line) != *loc.expected)
    throw SpliceError(loc.file + ": lines " + std::to_string(loc.start_line) + "-" +
                      std::to_string(loc.end_line) + " no longer hold the expected function");
  auto replacement = text::split_lines(function_text);
  lines.erase(begin, end);
  lines.insert(lines.begin() + (loc.start_line - 1), replacement.begin(), replacement.end());
  auto out = text::join_lines(lines);
  if (terminated) out += '\n';
  return out;
}

TestRun check_plausible(const std::string& project, const FunctionLocation& loc,
                        const std::string& candidate, const TestSpec& spec) {
  if (!fs::is_directory(project)) throw Error("project directory not found: " + project);
  ScratchDir scratch;
  auto work = scratch.path() / "project";
  fs::copy(project, work, fs::copy_options::recursive | fs::copy_options::copy_symlinks);

  auto target = work / loc.file;
  if (!fs::is_regular_file(target)) throw SpliceError("file not found in project: " + loc.file);
  text::write_file(target.string(), splice_function(text::read_file(target.string()), loc, candidate));

  TestRun run;
  run.command = spec.test_command;
  run.workdir = project;
  run.timeout = spec.timeout;
  auto start = std::chrono::steady_clock::now();
  auto used = [&] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                                 start);
  };
  auto finish = [&](TestOutcome o, const process::Result& r) {
    run.outcome = o;
    run.exit_code = r.exit_code;
    run.output += r.output;
    run.elapsed = used();
    return run;
  };

  if (!spec.build_command.empty()) {
    auto b = run_step(spec.build_command, work, spec, remaining(spec, used()));
    if (b.timed_out) return finish(TestOutcome::timeout, b);
    if (!b.ok()) return finish(TestOutcome::build_error, b);
    run.output += b.output;
  }
  for (int attempt = 0;; ++attempt) {
    auto t = run_step(spec.test_command, work, spec, remaining(spec, used()));
    if (t.timed_out) return finish(TestOutcome::timeout, t);
    if (t.ok()) return finish(TestOutcome::pass, t);
    if (attempt >= spec.retries) return finish(TestOutcome::fail, t);
    run.output += t.output;
  }
}

std::string tree_digest(const std::string& root) {
  std::vector<std::string> entries;
  for (auto it = fs::recursive_directory_iterator(root); it != fs::recursive_directory_iterator();
       ++it) {
    auto rel = fs::relative(it->path(), root).generic_string();
    if (it->is_symlink())
      entries.push_back("l " + rel + '\0' + fs::read_symlink(it->path()).string());
    else if (it->is_regular_file())
      entries.push_back("f " + rel + '\0' + text::read_file(it->path().string()));
    else if (it->is_directory())
      entries.push_back("d " + rel);
  }
  std::sort(entries.begin(), entries.end());
  std::size_t h = 0;
  std::hash<std::string> hasher;
  for (const auto& e : entries) h = h * 1000003u ^ hasher(e);
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016zx", h);
  return buf;
}

std::string to_string(Label l) { return l == Label::correct ? "correct" : "incorrect"; }
std::string to_string(Round r) { return r == Round::first ? "first" : "tiebreak"; }

Label parse_label(std::string_view s) {
  if (s == "correct") return Label::correct;
  if (s == "incorrect") return Label::incorrect;
  throw InvalidRating("unknown label '" + std::string(s) + "'");
}

Round parse_round(std::string_view s) {
  if (s == "first") return Round::first;
  if (s == "tiebreak") return Round::tiebreak;
  throw InvalidRating("unknown round '" + std::string(s) + "'");
}

std::string to_string(Resolution r) {
  switch (r) {
    case Resolution::correct: return "correct";
    case Resolution::incorrect: return "incorrect";
    case Resolution::pending: return "pending";
  }
  return "pending";
}

RatingStore::RatingStore(std::string path) : path_(std::move(path)) {
  std::ifstream in(path_);
  if (!in) return;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      auto j = json::parse(line);
      SemanticRating r{j.at("bug_id"), j.at("rank").get<std::size_t>(), j.at("rater"),
                       parse_label(j.at("label").get<std::string>()),
                       parse_round(j.value("round", std::string("first"))),
                       j.value("timestamp", std::string())};
      index_[{r.bug_id, r.rank}].push_back(ratings_.size());
      ratings_.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw Error(path_ + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::vector<const SemanticRating*> RatingStore::for_item(const std::string& bug_id,
                                                         std::size_t rank) const {
  std::vector<const SemanticRating*> out;
  if (auto it = index_.find({bug_id, rank}); it != index_.end())
    for (auto i : it->second) out.push_back(&ratings_[i]);
  return out;
}

void RatingStore::record(SemanticRating rating) {
  if (rating.bug_id.empty()) throw InvalidRating("rating has no bug id");
  if (rating.rater.empty()) throw InvalidRating("rating has no rater");
  std::lock_guard lock(mutex_);
  auto key = rating_key(rating);
  auto item = for_item(rating.bug_id, rating.rank);
  for (const auto* r : item) {
    if (rating_key(*r) == key)
      throw DuplicateRating(rating.rater + " already rated " + rating.bug_id + " #" +
                            std::to_string(rating.rank) + " (" + to_string(rating.round) + ")");
    if (rating.round == Round::tiebreak && r->round == Round::tiebreak)
      throw DuplicateRating(rating.bug_id + " #" + std::to_string(rating.rank) +
                            " already has a tiebreak");
  }
  if (rating.round == Round::tiebreak) {
    std::set<Label> labels;
    for (const auto* r : item)
      if (r->round == Round::first) labels.insert(r->label);
    if (labels.size() < 2)
      throw InvalidRating("tiebreak for " + rating.bug_id + " #" + std::to_string(rating.rank) +
                          " without a first-round disagreement");
  }
  if (rating.timestamp.empty()) rating.timestamp = utc_now();
  if (!path_.empty()) {
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << rating_to_json(rating).dump() << '\n';
    if (!out) throw Error("cannot append to " + path_);
  }
  index_[{rating.bug_id, rating.rank}].push_back(ratings_.size());
  ratings_.push_back(std::move(rating));
}

Resolution RatingStore::resolve(const std::string& bug_id, std::size_t rank) const {
  std::lock_guard lock(mutex_);
  std::set<Label> first;
  std::size_t n_first = 0;
  std::optional<Label> tiebreak;
  for (const auto* r : for_item(bug_id, rank)) {
    if (r->round == Round::first) {
      first.insert(r->label);
      ++n_first;
    } else {
      tiebreak = r->label;
    }
  }
  if (n_first < 2) return Resolution::pending;
  if (first.size() == 1)
    return *first.begin() == Label::correct ? Resolution::correct : Resolution::incorrect;
  if (!tiebreak) return Resolution::pending;
  return *tiebreak == Label::correct ? Resolution::correct : Resolution::incorrect;
}

std::vector<SemanticRating> RatingStore::ratings() const {
  std::lock_guard lock(mutex_);
  return ratings_;
}

std::size_t RatingStore::size() const {
  std::lock_guard lock(mutex_);
  return ratings_.size();
}

Resolution resolve_semantic(const RatingStore& store, const std::string& bug_id,
                            std::size_t rank) {
  return store.resolve(bug_id, rank);
}

Agreement cohen_kappa(const RatingStore& store, const std::string& rater_a,
                      const std::string& rater_b) {
  std::map<std::pair<std::string, std::size_t>, Label> a, b;
  for (const auto& r : store.ratings()) {
    if (r.round != Round::first) continue;
    if (r.rater == rater_a) a[{r.bug_id, r.rank}] = r.label;
    if (r.rater == rater_b) b[{r.bug_id, r.rank}] = r.label;
  }
  std::size_t n = 0, agree = 0, a_correct = 0, b_correct = 0;
  for (const auto& [item, la] : a) {
    auto it = b.find(item);
    if (it == b.end()) continue;
    ++n;
    agree += la == it->second;
    a_correct += la == Label::correct;
    b_correct += it->second == Label::correct;
  }
  if (n == 0) throw NoOverlap("raters " + rater_a + " and " + rater_b + " share no rated item");
  Agreement out;
  out.items = n;
  double dn = static_cast<double>(n);
  out.observed = agree / dn;
  double pa = a_correct / dn, pb = b_correct / dn;
  out.expected = pa * pb + (1 - pa) * (1 - pb);
  if (out.expected >= 1.0) {
    if (out.observed < 1.0)
      throw DegenerateMarginals("chance agreement is 1 but observed agreement is not");
    out.kappa = 1.0;
    return out;
  }
  out.kappa = (out.observed - out.expected) / (1 - out.expected);
  return out;
}

std::string to_string(Plausibility p) {
  switch (p) {
    case Plausibility::pass: return "pass";
    case Plausibility::fail: return "fail";
    case Plausibility::not_run: return "not-run";
  }
  return "not-run";
}

std::string to_string(Semantic s) {
  switch (s) {
    case Semantic::unlabeled: return "unlabeled";
    case Semantic::correct: return "correct";
    case Semantic::incorrect: return "incorrect";
  }
  return "unlabeled";
}

std::optional<TestRun> OutcomeCache::find(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = runs_.find(key);
  if (it == runs_.end()) return std::nullopt;
  return it->second;
}

void OutcomeCache::store(const std::string& key, const TestRun& run) {
  std::lock_guard lock(mutex_);
  runs_.emplace(key, run);
}

std::size_t OutcomeCache::size() const {
  std::lock_guard lock(mutex_);
  return runs_.size();
}

std::vector<AssessmentVerdict> classify(const std::string& bug_id,
                                        const std::vector<gen::CandidatePatch>& candidates,
                                        const std::string& reference,
                                        const PlausibilityJob& job,
                                        const ClassifyOptions& options) {
  OutcomeCache local;
  OutcomeCache& cache = options.cache ? *options.cache : local;
  std::vector<AssessmentVerdict> out;
  for (const auto& c : candidates) {
    AssessmentVerdict v;
    v.bug_id = bug_id;
    v.rank = c.rank;
    if (!c.reconstructed) {
      v.note = c.reconstruct_error.value_or("reconstruct-error");
      out.push_back(std::move(v));
      continue;
    }
    const auto& cand = *c.reconstructed;
    if (exact_match(cand, reference)) {
      v.parse_ok = v.exact = v.ast = true;
      v.plausible = Plausibility::pass;
      v.semantic = Semantic::correct;
      out.push_back(std::move(v));
      continue;
    }
    try {
      syntax::parse(cand, options.language);
      v.parse_ok = true;
    } catch (const syntax::ParseError& e) {
      v.note = std::string("parse-failure: ") + e.what();
      out.push_back(std::move(v));
      continue;
    }

    auto key = job.project + '\0' + job.location.file + '\0' + cand;
    auto run = cache.find(key);
    if (!run) {
      try {
        run = check_plausible(job.project, job.location, cand, job.spec);
      } catch (const SpliceError& e) {
        v.note = std::string("splice-error: ") + e.what();
        out.push_back(std::move(v));
        continue;
      }
      cache.store(key, *run);
      if (options.runs) options.runs->push_back(*run);
    }
    v.test_outcome = run->outcome;
    v.plausible = run->outcome == TestOutcome::pass ? Plausibility::pass : Plausibility::fail;

    if (v.plausible == Plausibility::pass) {
      v.ast = ast_match(cand, reference, options.language) == AstResult::match;
      if (v.ast) {
        v.semantic = Semantic::correct;
      } else if (options.ratings) {
        auto r = options.ratings->resolve(bug_id, c.rank);
        if (r == Resolution::correct) v.semantic = Semantic::correct;
        if (r == Resolution::incorrect) v.semantic = Semantic::incorrect;
      }
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::string verdict_to_json(const AssessmentVerdict& v) {
  ordered_json j;
  j["bug_id"] = v.bug_id;
  j["rank"] = v.rank;
  j["parse_ok"] = v.parse_ok;
  j["plausible"] = to_string(v.plausible);
  j["exact"] = v.exact;
  j["ast"] = v.ast;
  j["semantic"] = to_string(v.semantic);
  j["test_outcome"] = v.test_outcome ? json(to_string(*v.test_outcome)) : json(nullptr);
  j["note"] = v.note;
  return j.dump(-1, ' ', false, json::error_handler_t::replace);
}

AssessmentVerdict verdict_from_json(std::string_view line) {
  auto j = json::parse(line);
  AssessmentVerdict v;
  v.bug_id = j.at("bug_id");
  v.rank = j.at("rank");
  v.parse_ok = j.at("parse_ok");
  auto p = j.at("plausible").get<std::string>();
  v.plausible = p == "pass" ? Plausibility::pass
                : p == "fail" ? Plausibility::fail
                              : Plausibility::not_run;
  v.exact = j.at("exact");
  v.ast = j.at("ast");
  auto s = j.at("semantic").get<std::string>();
  v.semantic = s == "correct" ? Semantic::correct
               : s == "incorrect" ? Semantic::incorrect
                                  : Semantic::unlabeled;
  if (j.contains("test_outcome") && !j["test_outcome"].is_null()) {
    auto t = j["test_outcome"].get<std::string>();
    for (auto o : {TestOutcome::pass, TestOutcome::fail, TestOutcome::timeout,
                   TestOutcome::build_error})
      if (to_string(o) == t) v.test_outcome = o;
  }
  v.note = j.value("note", std::string());
  return v;
}

}  // namespace aprkit::assess
