// Acceptance checks: one PASS/FAIL line per criterion, exit 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aprkit/assess.hpp"
#include "aprkit/bench.hpp"
#include "aprkit/corpus.hpp"
#include "aprkit/diff.hpp"
#include "aprkit/gen.hpp"
#include "aprkit/repr.hpp"
#include "aprkit/text.hpp"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace std::chrono_literals;
using json = nlohmann::json;
using repr::InputKind;
using repr::OutputKind;
using repr::Region;
using repr::ReprPair;

namespace {

/// Collects failed conditions of one criterion.
struct Check {
  std::vector<std::string> failures;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 20) failures.push_back(what);
  }
};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Outcome finish(const Check& c, const std::string& ok_detail) {
  if (c.failures.empty()) return {true, ok_detail};
  std::string d;
  for (const auto& f : c.failures) d += (d.empty() ? "" : "; ") + f;
  return {false, d};
}

// ---- 1: representation round trip ----

Outcome round_trip() {
  Check c;
  std::ifstream in(testutil::fixture_path("triples/triples.jsonl"));
  std::string line;
  std::size_t triples = 0, spread = 0, checks = 0;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    auto buggy = syntax::function_from_text(j["buggy"]);
    auto fixed = syntax::function_from_text(j["fixed"]);
    Region region{j["region"][0], j["region"][1]};
    std::string id = j["id"];
    ++triples;

    // Edit sites measured from the texts themselves, not from fixture tags.
    auto sites = diff::make_unified_diff(buggy.text + "\n", fixed.text + "\n", 0);
    int widest = 0;
    for (std::size_t h = 1; h < sites.hunks.size(); ++h) {
      const auto& a = sites.hunks[h - 1];
      const auto& b = sites.hunks[h];
      int a_end = a.old_len == 0 ? a.old_start : a.old_start + a.old_len - 1;
      int b_begin = b.old_len == 0 ? b.old_start + 1 : b.old_start;
      widest = std::max(widest, b_begin - a_end - 1);
    }
    if (widest >= 10) ++spread;

    for (auto pair : repr::all_valid_pairs()) {
      ++checks;
      try {
        auto out = repr::build_output(buggy, fixed, region, pair.output);
        c.expect(repr::reconstruct(buggy, region, pair, out) == fixed.text,
                 id + " " + pair.to_string() + " differs");
      } catch (const std::exception& e) {
        c.expect(false, id + " " + pair.to_string() + ": " + e.what());
      }
    }
  }
  c.expect(triples >= 50, "only " + std::to_string(triples) + " triples");
  c.expect(spread >= 5, "only " + std::to_string(spread) + " multi-location triples with >= 10 "
                        "lines between edits");
  return finish(c, std::to_string(triples) + " triples (" + std::to_string(spread) +
                       " multi-location), " + std::to_string(checks) + " round trips");
}

// ---- 2: pairing matrix ----

Outcome pairing_matrix() {
  Check c;
  const std::set<std::string> table = {"IR1xOR1", "IR1xOR3", "IR1xOR4",
                                       "IR2xOR2", "IR3xOR2", "IR4xOR2"};
  int valid = 0, invalid = 0;
  for (auto in : {InputKind::IR1, InputKind::IR2, InputKind::IR3, InputKind::IR4}) {
    for (auto out : {OutputKind::OR1, OutputKind::OR2, OutputKind::OR3, OutputKind::OR4}) {
      ReprPair p{in, out};
      bool expected = table.count(p.to_string()) > 0;
      c.expect(repr::valid_pair(p) == expected, p.to_string());
      (repr::valid_pair(p) ? valid : invalid)++;
    }
  }
  c.expect(valid == 6 && invalid == 10, "counts");
  return finish(c, "6 valid, 10 invalid");
}

// ---- 3: region enumeration ----

Outcome region_enumeration() {
  Check c;
  for (int n = 1; n <= 50; ++n) {
    std::string body = "void f() {";
    for (int i = 2; i < n; ++i) body += "\n  x += " + std::to_string(i) + ";";
    if (n > 1) body += "\n}";
    else body += " }";
    auto fn = syntax::function_from_text(body);
    auto regions = repr::enumerate_regions(fn);
    // Brute-force count of distinct valid spans.
    std::set<std::pair<int, int>> seen;
    for (const auto& r : regions) {
      if (r.start_line >= 1 && r.start_line <= r.end_line && r.end_line <= n)
        seen.insert({r.start_line, r.end_line});
    }
    std::size_t expected = static_cast<std::size_t>(n) * (n + 1) / 2;
    c.expect(regions.size() == expected && seen.size() == expected, "n=" + std::to_string(n));
  }
  return finish(c, "n = 1..50");
}

// ---- 4: diff engine ----

std::string random_text(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 40);
  std::uniform_int_distribution<int> word(0, 6);
  std::bernoulli_distribution final_newline(0.8);
  int n = len(rng);
  std::string s;
  for (int i = 0; i < n; ++i) {
    s += "t" + std::to_string(word(rng));
    if (i + 1 < n || final_newline(rng)) s += '\n';
  }
  return s;
}

std::string mutate(const std::string& a, std::mt19937& rng) {
  auto lines = text::split_lines(a);
  std::uniform_int_distribution<int> ops(0, 5);
  int k = ops(rng);
  for (int i = 0; i < k && !lines.empty(); ++i) {
    std::uniform_int_distribution<std::size_t> at(0, lines.size() - 1);
    auto p = static_cast<long>(at(rng));
    switch (ops(rng) % 3) {
      case 0: lines.insert(lines.begin() + p, "ins" + std::to_string(i)); break;
      case 1: lines.erase(lines.begin() + p); break;
      default: lines[static_cast<std::size_t>(p)] = "chg" + std::to_string(i); break;
    }
  }
  return text::join_lines(lines);
}

Outcome diff_engine() {
  Check c;
  std::mt19937 rng(20240101);
  int pairs = 0;
  for (int i = 0; i < 1000; ++i) {
    auto a = random_text(rng);
    auto b = i % 4 == 0 ? random_text(rng) : mutate(a, rng);
    ++pairs;
    for (int ctx : {1, 3}) {
      try {
        auto d = diff::make_unified_diff(a, b, ctx);
        c.expect(diff::apply_diff(d, a, 0) == b, "pair " + std::to_string(i));
        if (!d.empty())
          c.expect(diff::apply_diff(diff::UnifiedDiff::parse(d.to_string()), a, 0) == b,
                   "pair " + std::to_string(i) + " reparsed");
      } catch (const std::exception& e) {
        c.expect(false, "pair " + std::to_string(i) + ": " + e.what());
      }
    }
  }

  // Shifted targets: the hunk still lands on the changed line.
  std::string a;
  for (int i = 1; i <= 40; ++i) a += "row " + std::to_string(i) + "\n";
  auto b_lines = text::split_lines(a);
  b_lines[19] = "patched";
  auto d = diff::make_unified_diff(a, text::join_lines(b_lines), 3);
  for (int shift : {-2, -1, 1, 2}) {
    auto lines = text::split_lines(a);
    if (shift > 0) lines.insert(lines.begin(), static_cast<std::size_t>(shift), "prefix");
    else lines.erase(lines.begin(), lines.begin() - shift);
    auto expected = lines;
    std::replace(expected.begin(), expected.end(), std::string("row 20"), std::string("patched"));
    try {
      c.expect(diff::apply_diff(d, text::join_lines(lines), 3) == text::join_lines(expected),
               "shift " + std::to_string(shift));
    } catch (const std::exception& e) {
      c.expect(false, "shift " + std::to_string(shift) + ": " + e.what());
    }
  }

  // Two equally close windows: application must refuse.
  std::string amb;
  for (int i = 0; i < 3; ++i) amb += "p\nq\nr\n";
  diff::UnifiedDiff ad;
  diff::Hunk h;
  h.old_start = 5;
  h.old_len = 3;
  h.new_start = 5;
  h.new_len = 3;
  h.lines = {{diff::LineTag::context, "p"}, {diff::LineTag::removed, "q"},
             {diff::LineTag::added, "Q"}, {diff::LineTag::context, "r"}};
  ad.hunks.push_back(h);
  bool refused = false;
  try {
    diff::apply_diff(ad, amb, 3);
  } catch (const diff::HunkApplyFailure&) {
    refused = true;
  }
  c.expect(refused, "ambiguous hunk applied");
  return finish(c, std::to_string(pairs) + " pairs x 2 contexts, 4 shifts, ambiguity refused");
}

// ---- 5: AST oracle ----

Outcome ast_oracle() {
  Check c;
  std::ifstream in(testutil::fixture_path("ast/cases.jsonl"));
  std::string line;
  int cases = 0;
  std::set<std::string> categories;
  while (std::getline(in, line)) {
    auto j = json::parse(line);
    std::string id = j["id"];
    ++cases;
    categories.insert(j["category"].get<std::string>());
    std::string candidate = j["candidate"], reference = j["reference"];
    bool exact = assess::exact_match(candidate, reference);
    bool ast = assess::ast_match(candidate, reference) == assess::AstResult::match;
    c.expect(exact == j["exact"].get<bool>(), id + " exact");
    c.expect(ast == j["ast"].get<bool>(), id + " ast");
    c.expect(!exact || ast, id + " exact without ast");
  }
  c.expect(cases == 30, std::to_string(cases) + " cases");
  c.expect(categories.size() >= 5, "categories");
  return finish(c, std::to_string(cases) + " cases, " + std::to_string(categories.size()) +
                       " categories");
}

// ---- 6: corpus pipeline ----

Outcome corpus_pipeline() {
  Check c;
  auto root = testutil::fixture_path("corpus/megadiff");
  auto denylist = corpus::load_denylist(testutil::fixture_path("corpus/denylist.jsonl"));
  c.expect(corpus::scan_corpus(root).size() == 20, "fixture does not hold 20 diffs");
  testutil::TempDir dir;
  for (auto pair : repr::all_valid_pairs()) {
    std::string first;
    for (std::size_t workers : {1u, 4u}) {
      auto tag = pair.to_string() + "/" + std::to_string(workers);
      auto pairs = corpus::ingest_diff_corpus(root, {workers, "java", {}});
      auto unique = corpus::dedupe(pairs);
      auto clean = corpus::exclude_leakage(unique, denylist);
      corpus::DatasetStats stats;
      auto samples = corpus::build_dataset(clean, pair, {}, {}, &stats, {workers, {}});
      c.expect(pairs.size() == 13, tag + " pairs " + std::to_string(pairs.size()));
      c.expect(unique.size() == 11, tag + " deduped " + std::to_string(unique.size()));
      c.expect(clean.size() == 10, tag + " after leakage " + std::to_string(clean.size()));
      c.expect(stats.dropped_over_length == 1, tag + " dropped");
      c.expect(samples.size() == 9, tag + " emitted " + std::to_string(samples.size()));
      auto out = dir / (pair.to_string() + std::to_string(workers) + ".jsonl");
      corpus::emit_dataset(samples, out);
      auto bytes = text::read_file(out);
      if (first.empty()) first = bytes;
      else c.expect(bytes == first, tag + " output differs between runs");
    }
  }
  return finish(c, "20 diffs -> 13 pairs, 11 deduped, 1 dropped, 9 emitted; 6 pairs x 2 runs "
                   "byte-identical");
}

// ---- 7: end to end ----

std::vector<bench::RunRecord> e2e_records;

Outcome end_to_end() {
  Check c;
  auto manifest = bench::load_manifest(testutil::fixture_path("bench/manifest.jsonl"));
  auto outputs = json::parse(testutil::read_fixture("bench/mock.json"))
                     .get<std::map<std::string, std::vector<std::string>>>();
  gen::MockBackend mock(outputs);
  gen::GenerationConfig g;
  g.backend = mock.endpoint();
  g.timeout = 10s;
  g.backoff = 1ms;
  bench::AssessConfig a;
  a.timeout = 3s;
  a.env_extra = {std::string("MINIJAVA=") + MINIJAVA};

  bench::RunOptions opts;
  opts.workers = 4;
  std::mutex m;
  std::set<std::string> checked;
  int mismatches = 0, checks = 0;
  opts.on_tree_check = [&](const std::string& bug, const std::string& before,
                           const std::string& after) {
    std::lock_guard lock(m);
    ++checks;
    checked.insert(bug);
    if (before != after) ++mismatches;
  };
  e2e_records = bench::run_benchmark(manifest, {}, g, a, opts);
  auto table = bench::aggregate(e2e_records);

  c.expect(manifest.size() == 10, "manifest size");
  c.expect(table.rows.size() == 1, "rows");
  if (table.rows.size() == 1) {
    const auto& k = table.rows[0].counts;
    c.expect(k.plausible == 8, "plausible " + std::to_string(k.plausible));
    c.expect(k.exact == 6, "exact " + std::to_string(k.exact));
    c.expect(k.ast >= 6, "ast " + std::to_string(k.ast));
    c.expect(k.pending == 2, "pending " + std::to_string(k.pending));
  }
  // Every bug that ran tests was hash-checked, and every check matched.
  for (const auto& r : e2e_records) {
    c.expect(r.error.empty(), r.bug_id + ": " + r.error);
    for (const auto& v : r.verdicts)
      if (v.test_outcome && !v.exact) c.expect(checked.count(r.bug_id) > 0, r.bug_id + " unchecked");
  }
  c.expect(checks > 0, "no plausibility runs");
  c.expect(mismatches == 0, std::to_string(mismatches) + " tree mismatches");
  std::ostringstream detail;
  if (table.rows.size() == 1) {
    const auto& k = table.rows[0].counts;
    detail << "plausible " << k.plausible << ", exact " << k.exact << ", ast " << k.ast
           << ", pending " << k.pending << "; " << checks << " tree checks clean";
  }
  return finish(c, detail.str());
}

// ---- 8: monotonicity ----

Outcome monotonicity() {
  Check c;
  // Random records under the classifier's invariants: exact implies AST,
  // AST and exact imply plausible.
  std::mt19937 rng(99);
  std::bernoulli_distribution coin(0.5);
  for (int t = 0; t < 300; ++t) {
    std::vector<bench::RunRecord> records;
    std::uniform_int_distribution<int> bugs(0, 12), cands(0, 10), label(0, 2);
    int nb = bugs(rng);
    for (int b = 0; b < nb; ++b) {
      bench::RunRecord r;
      r.bug_id = "R" + std::to_string(b);
      if (coin(rng)) r.pair = {InputKind::IR1, OutputKind::OR1};
      int nc = cands(rng);
      for (int k = 0; k < nc; ++k) {
        assess::AssessmentVerdict v;
        v.bug_id = r.bug_id;
        v.rank = static_cast<std::size_t>(k);
        v.parse_ok = coin(rng);
        if (v.parse_ok) {
          v.plausible = coin(rng) ? assess::Plausibility::pass : assess::Plausibility::fail;
          if (v.plausible == assess::Plausibility::pass) {
            v.ast = coin(rng);
            v.exact = v.ast && coin(rng);
            v.semantic = v.ast ? assess::Semantic::correct
                               : static_cast<assess::Semantic>(label(rng));
          }
        }
        r.verdicts.push_back(v);
      }
      records.push_back(std::move(r));
    }
    auto table = bench::aggregate(records, {}, 10);
    for (const auto& row : table.rows) {
      c.expect(bench::check_monotone(row).empty() && row.violations.empty(),
               "random table " + std::to_string(t) + " " + row.label);
      for (const auto& k : row.top_k) {
        bench::AggregateRow sub{row.label, row.universe, k, {}, 0, {}};
        c.expect(bench::check_monotone(sub).empty(), "top-k " + std::to_string(t));
      }
    }
  }
  // Verdict level on the end-to-end run.
  for (const auto& r : e2e_records)
    for (const auto& v : r.verdicts) c.expect(!v.exact || v.ast, r.bug_id + " exact without ast");

  // Every aggregate computed in this process, including the end-to-end one.
  auto stats = bench::aggregate_stats();
  c.expect(stats.tables > 0, "no aggregates produced");
  c.expect(stats.violations == 0, std::to_string(stats.violations) + " violations");
  return finish(c, std::to_string(stats.tables) + " aggregates, " + std::to_string(stats.rows) +
                       " rows, 0 violations");
}

// ---- 9: kappa ----

Outcome kappa_oracle() {
  Check c;
  // 10000 co-rated items: both correct 4271, only A 1229, only B 330, neither 4170.
  assess::RatingStore store;
  int id = 0;
  auto add = [&](int count, assess::Label la, assess::Label lb) {
    for (int i = 0; i < count; ++i, ++id) {
      auto bug = "K" + std::to_string(id);
      store.record({bug, 0, "a", la, assess::Round::first, "t"});
      store.record({bug, 0, "b", lb, assess::Round::first, "t"});
    }
  };
  add(4271, assess::Label::correct, assess::Label::correct);
  add(1229, assess::Label::correct, assess::Label::incorrect);
  add(330, assess::Label::incorrect, assess::Label::correct);
  add(4170, assess::Label::incorrect, assess::Label::incorrect);
  auto k = assess::cohen_kappa(store, "a", "b");
  // Hand calculation: p_e = .55 * .4601 + .45 * .5399 = .49601.
  const double hand = (0.8441 - 0.49601) / (1 - 0.49601);
  c.expect(std::abs(k.observed - 0.8441) < 1e-9, "observed " + std::to_string(k.observed));
  c.expect(std::abs(k.kappa - 0.69) <= 0.01, "kappa " + std::to_string(k.kappa));
  c.expect(std::abs(k.kappa - hand) < 1e-9, "hand calculation " + std::to_string(hand));
  std::ostringstream d;
  d << "kappa " << std::fixed;
  d.precision(4);
  d << k.kappa << " at observed " << k.observed << " (hand " << hand << ")";
  return finish(c, d.str());
}

// ---- 10: training config ----

Outcome training_config() {
  Check c;
  auto rendered = corpus::render_training_config({});
  c.expect(rendered == testutil::read_fixture("golden/training_config.txt"), "golden mismatch");
  for (const char* kv : {"learning_rate=5e-4", "schedule=cosine", "epochs=2",
                         "batch_size_per_device=16", "lora_rank=8", "lora_alpha=16",
                         "lora_dropout=0.05", "target_layers=q_proj,v_proj"}) {
    c.expect(("\n" + rendered).find("\n" + std::string(kv) + "\n") != std::string::npos, kv);
  }
  return finish(c, "golden file matches");
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    const char* name;
    std::function<Outcome()> run;
    std::chrono::milliseconds budget;
  };
  const std::vector<Criterion> criteria = {
      {1, "representation round trip", round_trip, 5s},
      {2, "pairing matrix", pairing_matrix, 0ms},
      {3, "region enumeration", region_enumeration, 0ms},
      {4, "diff engine", diff_engine, 10s},
      {5, "AST-match oracle", ast_oracle, 0ms},
      {6, "corpus pipeline determinism", corpus_pipeline, 0ms},
      {7, "end to end with mock backend", end_to_end, 120s},
      {8, "metric monotonicity", monotonicity, 0ms},
      {9, "kappa oracle", kappa_oracle, 0ms},
      {10, "training-config export", training_config, 0ms},
  };
  int failed = 0;
  for (const auto& cr : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - start);
    if (cr.budget.count() > 0 && ms > cr.budget) {
      o.pass = false;
      o.detail += "; over time budget of " + std::to_string(cr.budget.count() / 1000) + " s";
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.2f s", static_cast<double>(ms.count()) / 1000.0);
    std::cout << (o.pass ? "PASS" : "FAIL") << " " << cr.number << " " << cr.name << " (" << secs
              << "): " << o.detail << std::endl;
    failed += !o.pass;
  }
  return failed == 0 ? 0 : 1;
}
