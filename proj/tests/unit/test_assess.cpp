#include <cmath>
#include <fstream>

#include "aprkit/assess.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::assess;
using namespace std::chrono_literals;
using nlohmann::json;

namespace {

std::vector<json> read_jsonl(const std::string& path) {
  std::vector<json> out;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(json::parse(line));
  return out;
}

struct BenchBug {
  std::string id;
  std::string project;
  std::string buggy;
  std::string reference;
  PlausibilityJob job;
};

BenchBug bench_bug(const std::string& id) {
  for (const auto& e : read_jsonl(testutil::fixture_path("bench/manifest.jsonl"))) {
    if (e["bug_id"] != id) continue;
    BenchBug b;
    b.id = id;
    b.project = testutil::fixture_path("bench/" + e["project_root"].get<std::string>());
    b.reference = e["reference"];
    int start = e["span"][0], end = e["span"][1];
    auto lines = text::split_lines(text::read_file(b.project + "/Main.java"));
    b.buggy = text::join_lines(lines, start - 1, end);
    b.job.project = b.project;
    b.job.location = {e["file"], start, end, b.buggy};
    b.job.spec.build_command = e["build_command"];
    b.job.spec.test_command = e["test_command"];
    b.job.spec.env_extra = {std::string("MINIJAVA=") + MINIJAVA};
    b.job.spec.timeout = 5s;
    return b;
  }
  throw std::runtime_error("no bug " + id);
}

gen::CandidatePatch candidate(std::size_t rank, std::optional<std::string> text) {
  gen::CandidatePatch c;
  c.bug_id = "X";
  c.rank = rank;
  if (text)
    c.reconstructed = text;
  else
    c.reconstruct_error = "malformed-output";
  return c;
}

SemanticRating rating(std::string bug, std::size_t rank, std::string rater, Label l,
                      Round r = Round::first) {
  return {std::move(bug), rank, std::move(rater), l, r, "2024-01-01T00:00:00Z"};
}

}  // namespace

TEST_CASE("exact match") {
  CHECK(exact_match("int f() {}", "int f() {}"));
  CHECK_FALSE(exact_match("int f() {} ", "int f() {}"));
  CHECK_FALSE(exact_match("int f() {\n  return 1;\n}", "int f() {\n    return 1;\n}"));
  CHECK(exact_match("a\r\nb\r\n", "a\nb\n"));
  CHECK(exact_match("a\rb", "a\nb"));
  CHECK_FALSE(exact_match("a\n", "a"));
}

TEST_CASE("AST match against the hand-labeled corpus") {
  auto cases = read_jsonl(testutil::fixture_path("ast/cases.jsonl"));
  REQUIRE(cases.size() == 30);
  std::map<std::string, int> per_category;
  for (const auto& c : cases) {
    CAPTURE(c["id"].get<std::string>());
    std::string cand = c["candidate"], ref = c["reference"];
    auto got = ast_match(cand, ref);
    CHECK(got != AstResult::parse_failure);
    CHECK((got == AstResult::match) == c["ast"].get<bool>());
    CHECK(exact_match(cand, ref) == c["exact"].get<bool>());
    if (exact_match(cand, ref)) CHECK(got == AstResult::match);
    per_category[c["category"]]++;
  }
  for (const auto& cat : {"formatting", "comment", "rename", "literal", "reorder"})
    CHECK(per_category[cat] == 6);
}

TEST_CASE("AST match parse failures") {
  CHECK(ast_match("int f( {", "int f() { return 1; }") == AstResult::parse_failure);
  CHECK(ast_match("int f() { return 1 }", "int f() { return 1; }") == AstResult::parse_failure);
  CHECK_THROWS_AS(ast_match("int f() {}", "int f( {"), syntax::ParseError);
}

TEST_CASE("splice_function") {
  std::string file = "class A {\n  int f() {\n    return 0;\n  }\n}\n";
  FunctionLocation loc{"A.java", 2, 4, std::nullopt};
  CHECK(splice_function(file, loc, "  int f() { return 1; }") ==
        "class A {\n  int f() { return 1; }\n}\n");
  CHECK(splice_function(file, loc, "  int f() {\n    int x = 1;\n    return x;\n  }") ==
        "class A {\n  int f() {\n    int x = 1;\n    return x;\n  }\n}\n");
  CHECK(splice_function("a\nb\nc", {"x", 2, 2, std::nullopt}, "B") == "a\nB\nc");
  CHECK_THROWS_AS(splice_function(file, {"A.java", 4, 6, std::nullopt}, "x"), SpliceError);
  CHECK_THROWS_AS(splice_function(file, {"A.java", 3, 2, std::nullopt}, "x"), SpliceError);
  loc.expected = "  int f() {\n    return 0;\n  }";
  CHECK_NOTHROW(splice_function(file, loc, "x"));
  loc.expected = "  int g() {\n    return 0;\n  }";
  CHECK_THROWS_AS(splice_function(file, loc, "x"), SpliceError);
}

TEST_CASE("plausibility on a fixture project") {
  auto bug = bench_bug("B01");
  auto before = tree_digest(bug.project);
  const auto& spec = bug.job.spec;
  const auto& loc = bug.job.location;

  auto ref = check_plausible(bug.project, loc, bug.reference, spec);
  CHECK(ref.outcome == TestOutcome::pass);
  CHECK(ref.output.find("3/3 tests passed") != std::string::npos);

  auto buggy = check_plausible(bug.project, loc, bug.buggy, spec);
  CHECK(buggy.outcome == TestOutcome::fail);
  CHECK(buggy.exit_code == 1);

  auto unresolved = check_plausible(
      bug.project, loc, "    static int absDiff(int a, int b) {\n        return nope(a);\n    }", spec);
  CHECK(unresolved.outcome == TestOutcome::build_error);

  auto spec_short = spec;
  spec_short.timeout = 1500ms;
  auto start = std::chrono::steady_clock::now();
  auto spin = check_plausible(
      bug.project, loc,
      "    static int absDiff(int a, int b) {\n        while (true) {\n        }\n    }", spec_short);
  CHECK(spin.outcome == TestOutcome::timeout);
  CHECK(std::chrono::steady_clock::now() - start < 4s);

  CHECK(tree_digest(bug.project) == before);

  auto stale = loc;
  stale.start_line += 1;
  CHECK_THROWS_AS(check_plausible(bug.project, stale, bug.reference, spec), SpliceError);
  auto missing = loc;
  missing.file = "Nope.java";
  CHECK_THROWS_AS(check_plausible(bug.project, missing, bug.reference, spec), SpliceError);
  CHECK(tree_digest(bug.project) == before);
}

TEST_CASE("test execution defaults and environment") {
  TestSpec defaults;
  CHECK(defaults.timeout == 300s);
  CHECK(defaults.retries == 0);

  testutil::TempDir dir;
  text::write_file(dir / "f.txt", "x\n");
  ::setenv("APRKIT_TOKEN", "secret", 1);
  TestSpec spec;
  spec.test_command = "test -z \"$APRKIT_TOKEN\"";
  CHECK(check_plausible(dir.path().string(), {"f.txt", 1, 1, std::nullopt}, "y", spec).outcome ==
        TestOutcome::fail);
  spec.env_denylist = {"APRKIT_TOKEN"};
  CHECK(check_plausible(dir.path().string(), {"f.txt", 1, 1, std::nullopt}, "y", spec).outcome ==
        TestOutcome::pass);
  ::unsetenv("APRKIT_TOKEN");

  // The spliced file is what the command sees.
  spec.test_command = "grep -qx y f.txt";
  CHECK(check_plausible(dir.path().string(), {"f.txt", 1, 1, std::nullopt}, "y", spec).outcome ==
        TestOutcome::pass);
  CHECK(text::read_file(dir / "f.txt") == "x\n");

  spec.test_command = "test -e once || { touch once; false; }";
  CHECK(check_plausible(dir.path().string(), {"f.txt", 1, 1, std::nullopt}, "y", spec).outcome ==
        TestOutcome::fail);
  spec.retries = 1;
  CHECK(check_plausible(dir.path().string(), {"f.txt", 1, 1, std::nullopt}, "y", spec).outcome ==
        TestOutcome::pass);
}

TEST_CASE("tree digest") {
  testutil::TempDir dir;
  text::write_file(dir / "a.txt", "1");
  std::filesystem::create_directory(dir.path() / "sub");
  text::write_file(dir / "sub/b.txt", "2");
  auto d = tree_digest(dir.path().string());
  CHECK(d.size() == 16);
  CHECK(tree_digest(dir.path().string()) == d);
  text::write_file(dir / "sub/b.txt", "3");
  CHECK(tree_digest(dir.path().string()) != d);
  text::write_file(dir / "sub/b.txt", "2");
  CHECK(tree_digest(dir.path().string()) == d);
  text::write_file(dir / "c.txt", "");
  CHECK(tree_digest(dir.path().string()) != d);
}

TEST_CASE("rating store") {
  RatingStore s;
  s.record(rating("B1", 0, "ann", Label::correct));
  CHECK(s.size() == 1);
  CHECK_THROWS_AS(s.record(rating("B1", 0, "ann", Label::incorrect)), DuplicateRating);
  CHECK_NOTHROW(s.record(rating("B1", 1, "ann", Label::incorrect)));
  CHECK_THROWS_AS(s.record(rating("B1", 0, "carl", Label::correct, Round::tiebreak)),
                  InvalidRating);
  CHECK(s.resolve("B1", 0) == Resolution::pending);

  s.record(rating("B1", 0, "bob", Label::correct));
  CHECK(resolve_semantic(s, "B1", 0) == Resolution::correct);
  CHECK_THROWS_AS(s.record(rating("B1", 0, "carl", Label::correct, Round::tiebreak)),
                  InvalidRating);

  s.record(rating("B1", 1, "bob", Label::correct));
  CHECK(s.resolve("B1", 1) == Resolution::pending);
  s.record(rating("B1", 1, "carl", Label::incorrect, Round::tiebreak));
  CHECK(s.resolve("B1", 1) == Resolution::incorrect);
  CHECK_THROWS_AS(s.record(rating("B1", 1, "dan", Label::correct, Round::tiebreak)),
                  DuplicateRating);

  s.record(rating("B2", 0, "ann", Label::incorrect));
  s.record(rating("B2", 0, "bob", Label::incorrect));
  CHECK(s.resolve("B2", 0) == Resolution::incorrect);
  CHECK(s.resolve("B9", 0) == Resolution::pending);
  CHECK_THROWS_AS(s.record(rating("", 0, "ann", Label::correct)), InvalidRating);
  CHECK_THROWS_AS(s.record(rating("B3", 0, "", Label::correct)), InvalidRating);
}

TEST_CASE("rating store persistence") {
  testutil::TempDir dir;
  auto path = dir / "ratings.jsonl";
  {
    RatingStore s(path);
    s.record(rating("B1", 0, "ann", Label::correct));
    SemanticRating fresh{"B1", 0, "bob", Label::incorrect, Round::first, ""};
    s.record(fresh);
  }
  auto lines = text::split_lines(text::read_file(path));
  REQUIRE(lines.size() == 3);
  CHECK(lines[0] ==
        R"({"bug_id":"B1","rank":0,"rater":"ann","label":"correct","round":"first","timestamp":"2024-01-01T00:00:00Z"})");
  auto j = json::parse(lines[1]);
  CHECK(j["timestamp"].get<std::string>().size() == 20);

  RatingStore again(path);
  CHECK(again.size() == 2);
  CHECK(again.resolve("B1", 0) == Resolution::pending);
  CHECK_THROWS_AS(again.record(rating("B1", 0, "ann", Label::correct)), DuplicateRating);
  again.record(rating("B1", 0, "carl", Label::correct, Round::tiebreak));
  CHECK(RatingStore(path).resolve("B1", 0) == Resolution::correct);
}

TEST_CASE("kappa basics") {
  RatingStore s;
  const Label pattern[] = {Label::correct, Label::incorrect, Label::correct, Label::incorrect};
  for (int i = 0; i < 4; ++i) {
    s.record(rating("B" + std::to_string(i), 0, "a", pattern[i]));
    s.record(rating("B" + std::to_string(i), 0, "b", pattern[i]));
  }
  auto k = cohen_kappa(s, "a", "b");
  CHECK(k.kappa == doctest::Approx(1.0));
  CHECK(k.observed == doctest::Approx(1.0));
  CHECK(k.items == 4);

  // Each rater says correct half the time; they agree on half the items.
  RatingStore half;
  const Label a[] = {Label::correct, Label::correct, Label::incorrect, Label::incorrect};
  const Label b[] = {Label::correct, Label::incorrect, Label::correct, Label::incorrect};
  for (int i = 0; i < 4; ++i) {
    half.record(rating("B" + std::to_string(i), 0, "a", a[i]));
    half.record(rating("B" + std::to_string(i), 0, "b", b[i]));
  }
  auto h = cohen_kappa(half, "a", "b");
  CHECK(h.observed == doctest::Approx(0.5));
  CHECK(h.expected == doctest::Approx(0.5));
  CHECK(h.kappa == doctest::Approx(0.0));
  CHECK(cohen_kappa(half, "b", "a").kappa == doctest::Approx(h.kappa));
  CHECK(cohen_kappa(half, "a", "a").kappa == doctest::Approx(1.0));

  RatingStore same;
  same.record(rating("B1", 0, "a", Label::correct));
  same.record(rating("B1", 0, "b", Label::correct));
  CHECK(cohen_kappa(same, "a", "b").kappa == 1.0);

  RatingStore apart;
  apart.record(rating("B1", 0, "a", Label::correct));
  apart.record(rating("B2", 0, "b", Label::correct));
  CHECK_THROWS_AS(cohen_kappa(apart, "a", "b"), NoOverlap);
  CHECK_THROWS_AS(cohen_kappa(apart, "a", "zed"), NoOverlap);
}

TEST_CASE("kappa reproduces the reported agreement figures") {
  // 2x2 table over 10000 co-rated candidates:
  //                  b correct  b incorrect
  //   a correct         4271        1229
  //   a incorrect        330        4170
  const int both = 4271, only_a = 1229, only_b = 330, neither = 4170;
  RatingStore s;
  int id = 0;
  auto add = [&](int count, Label la, Label lb) {
    for (int i = 0; i < count; ++i, ++id) {
      s.record(rating("K" + std::to_string(id), 0, "a", la));
      s.record(rating("K" + std::to_string(id), 0, "b", lb));
    }
  };
  add(both, Label::correct, Label::correct);
  add(only_a, Label::correct, Label::incorrect);
  add(only_b, Label::incorrect, Label::correct);
  add(neither, Label::incorrect, Label::incorrect);

  // Hand calculation: p_o = 8441/10000; marginals a: 5500 correct, b: 4601
  // correct; p_e = .55 * .4601 + .45 * .5399 = .49601;
  // kappa = (.8441 - .49601) / (1 - .49601) = .34809 / .50399 = .690668...
  const double hand = 0.34809 / 0.50399;
  auto k = cohen_kappa(s, "a", "b");
  CHECK(k.items == 10000);
  CHECK(k.observed == doctest::Approx(0.8441).epsilon(1e-12));
  CHECK(k.expected == doctest::Approx(0.49601).epsilon(1e-12));
  CHECK(k.kappa == doctest::Approx(hand).epsilon(1e-12));
  CHECK(std::abs(k.kappa - 0.69) <= 0.01);
  CHECK(cohen_kappa(s, "b", "a").kappa == doctest::Approx(k.kappa).epsilon(1e-12));
}

TEST_CASE("classify tiers") {
  auto bug = bench_bug("B01");
  std::string reformatted = text::split_lines(bug.reference)[0] +
                            " int d = a - b; if (d < 0) { d = -d; } return d; }";
  std::string alternative =
      "    static int absDiff(int a, int b) {\n        return Math.abs(a - b);\n    }";
  std::vector<gen::CandidatePatch> cands = {
      candidate(0, bug.reference), candidate(1, reformatted), candidate(2, bug.buggy),
      candidate(3, std::nullopt),  candidate(4, "    static int absDiff(int a {"),
      candidate(5, alternative),   candidate(6, bug.buggy)};

  RatingStore ratings;
  std::vector<TestRun> runs;
  OutcomeCache cache;
  ClassifyOptions opts;
  opts.ratings = &ratings;
  opts.runs = &runs;
  opts.cache = &cache;
  auto v = classify(bug.id, cands, bug.reference, bug.job, opts);
  REQUIRE(v.size() == 7);

  CHECK(v[0].exact);
  CHECK(v[0].ast);
  CHECK(v[0].plausible == Plausibility::pass);
  CHECK_FALSE(v[0].test_outcome.has_value());
  CHECK(v[0].semantic == Semantic::correct);

  CHECK_FALSE(v[1].exact);
  CHECK(v[1].plausible == Plausibility::pass);
  CHECK(v[1].ast);

  CHECK(v[2].plausible == Plausibility::fail);
  CHECK(v[2].parse_ok);
  CHECK_FALSE(v[2].ast);
  CHECK(v[2].semantic == Semantic::unlabeled);

  CHECK_FALSE(v[3].parse_ok);
  CHECK(v[3].plausible == Plausibility::not_run);
  CHECK(v[3].note == "malformed-output");

  CHECK_FALSE(v[4].parse_ok);
  CHECK(v[4].plausible == Plausibility::not_run);
  CHECK_FALSE(v[4].ast);

  CHECK(v[5].plausible == Plausibility::pass);
  CHECK_FALSE(v[5].ast);
  CHECK(v[5].semantic == Semantic::unlabeled);

  // Only reformatted, buggy and alternative ran; the repeated buggy
  // candidate came from the cache.
  CHECK(runs.size() == 3);
  CHECK(v[6].plausible == Plausibility::fail);

  for (const auto& x : v) {
    if (x.exact) CHECK(x.ast);
    if (x.ast) CHECK(x.parse_ok);
  }

  ratings.record(rating(bug.id, 5, "ann", Label::correct));
  ratings.record(rating(bug.id, 5, "bob", Label::correct));
  runs.clear();
  auto again = classify(bug.id, cands, bug.reference, bug.job, opts);
  CHECK(runs.empty());
  CHECK(again[5].semantic == Semantic::correct);
  for (std::size_t i = 0; i < v.size(); ++i)
    if (i != 5) CHECK(verdict_to_json(again[i]) == verdict_to_json(v[i]));
}

TEST_CASE("verdict records") {
  AssessmentVerdict v{"B7", 3, true, Plausibility::pass, false, true, Semantic::correct,
                      TestOutcome::pass, ""};
  auto line = verdict_to_json(v);
  CHECK(line ==
        R"({"bug_id":"B7","rank":3,"parse_ok":true,"plausible":"pass","exact":false,"ast":true,"semantic":"correct","test_outcome":"pass","note":""})");
  CHECK(verdict_to_json(verdict_from_json(line)) == line);
  AssessmentVerdict w{"B8", 0, false, Plausibility::not_run, false, false, Semantic::unlabeled,
                      std::nullopt, "malformed-output"};
  CHECK(verdict_to_json(verdict_from_json(verdict_to_json(w))) == verdict_to_json(w));
}
