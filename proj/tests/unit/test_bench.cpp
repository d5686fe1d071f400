#include <filesystem>
#include <fstream>
#include <map>

#include "aprkit/bench.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::bench;
using namespace std::chrono_literals;
using nlohmann::json;
using repr::InputKind;
using repr::OutputKind;

namespace {

using Outputs = std::map<std::string, std::vector<std::string>>;

Outputs mock_outputs(const std::string& rel) {
  return json::parse(testutil::read_fixture(rel)).get<Outputs>();
}

AssessConfig fixture_assess() {
  AssessConfig a;
  a.timeout = 3s;
  a.env_extra = {std::string("MINIJAVA=") + MINIJAVA};
  return a;
}

gen::GenerationConfig gen_for(const gen::MockBackend& mock) {
  gen::GenerationConfig g;
  g.backend = mock.endpoint();
  g.timeout = 10s;
  g.backoff = 1ms;
  return g;
}

std::string write_manifest(const testutil::TempDir& dir, const std::vector<std::string>& lines) {
  auto path = dir / "m.jsonl";
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  text::write_file(path, s);
  return path;
}

std::string entry(const std::string& id, const std::string& extra = "") {
  return R"({"bug_id":")" + id +
         R"(","project_root":"p","file":"A.java","span":[3,8],"region":[2,3],"reference":"x","test_command":"true")" +
         extra + "}";
}

RunRecord record(const std::string& bug, std::vector<assess::AssessmentVerdict> verdicts,
                 repr::ReprPair pair = {}) {
  RunRecord r;
  r.bug_id = bug;
  r.pair = pair;
  for (auto& v : verdicts) v.bug_id = bug;
  r.verdicts = std::move(verdicts);
  return r;
}

assess::AssessmentVerdict verdict(std::size_t rank, assess::Plausibility p, bool exact, bool ast,
                                  assess::Semantic s = assess::Semantic::unlabeled) {
  return {"", rank, true, p, exact, ast, s, std::nullopt, ""};
}

void require_monotone(const AggregateTable& t) {
  for (const auto& r : t.rows) {
    CAPTURE(r.label);
    CHECK(r.violations.empty());
  }
}

}  // namespace

TEST_CASE("load the fixture manifest") {
  auto m = load_manifest(testutil::fixture_path("bench/manifest.jsonl"));
  REQUIRE(m.size() == 10);
  CHECK(m[0].bug_id == "B01");
  CHECK(std::filesystem::path(m[0].project_root).is_absolute());
  CHECK(std::filesystem::exists(std::filesystem::path(m[0].project_root) / "Main.java"));
  CHECK(m[0].start_line == 7);
  CHECK(m[0].end_line == 13);
  CHECK(m[0].region == repr::Region{4, 4});
  CHECK(m[5].tags == std::vector<std::string>{"multi-location"});
  CHECK(load_manifest(testutil::fixture_path("bench/manifest3.jsonl")).size() == 3);
}

TEST_CASE("manifest validation") {
  testutil::TempDir dir;
  auto fails_at = [&](const std::vector<std::string>& lines, std::size_t line,
                      const std::string& reason) {
    try {
      load_manifest(write_manifest(dir, lines));
      FAIL("expected ManifestError");
    } catch (const ManifestError& e) {
      CHECK(e.line() == line);
      CHECK(e.reason().find(reason) != std::string::npos);
    }
  };
  CHECK(load_manifest(write_manifest(dir, {entry("a"), "", "# note", entry("b")})).size() == 2);
  fails_at({entry("a"), entry("b"), entry("a")}, 3, "duplicate");
  fails_at({entry("a"), R"({"bug_id":"b","project_root":"p","file":"A.java","span":[3,8],"region":[5,7],"reference":"x","test_command":"true"})"},
           2, "region outside");
  fails_at({R"({"bug_id":"b","project_root":"p","file":"A.java","span":[8,3],"region":[1,1],"reference":"x","test_command":"true"})"},
           1, "span");
  fails_at({R"({"bug_id":"b","project_root":"p","file":"A.java","span":[3,8],"region":[1,1],"reference":"x","test_command":"  "})"},
           1, "test_command");
  fails_at({R"({"bug_id":"b","project_root":"p","file":"A.java","span":[3,8],"region":[1,1],"test_command":"t"})"},
           1, "reference");
  fails_at({R"({"bug_id":"b","project_root":"p","file":"A.java","span":3,"region":[1,1],"reference":"x","test_command":"t"})"},
           1, "span");
  fails_at({entry("a"), "{not json"}, 2, "invalid JSON");
  // An empty insertion region just past the last line is valid.
  CHECK(load_manifest(write_manifest(
                          dir, {R"({"bug_id":"b","project_root":"p","file":"A.java","span":[3,8],"region":[7,6],"reference":"x","test_command":"t"})"}))
            .size() == 1);
  CHECK_THROWS_AS(load_manifest(dir / "missing.jsonl"), ManifestError);
}

TEST_CASE("benchmark profiles") {
  testutil::TempDir dir;
  auto path = write_manifest(
      dir, {entry("Math-27"), entry("Math-28"), entry("Math-44"), entry("JacksonDatabind-82")});
  std::vector<std::string> logged;
  LoadOptions opts;
  opts.profile = "defects4j-sf";
  opts.log = [&](const std::string& m) { logged.push_back(m); };
  auto m = load_manifest(path, opts);
  REQUIRE(m.size() == 1);
  CHECK(m[0].bug_id == "Math-27");
  CHECK(logged.size() == 3);
  CHECK(load_manifest(path).size() == 4);
  CHECK(profile("defects4j-sf").expected_bugs == 488u);
  CHECK(profile("humaneval-java").expected_bugs == 162u);
  opts.check_count = true;
  CHECK_THROWS_AS(load_manifest(path, opts), ManifestError);
  opts.profile = "nope";
  CHECK_THROWS_AS(load_manifest(path, opts), Error);

  std::vector<std::string> many;
  for (int i = 0; i < 162; ++i) many.push_back(entry("H" + std::to_string(i)));
  LoadOptions he;
  he.profile = "humaneval-java";
  he.check_count = true;
  CHECK(load_manifest(write_manifest(dir, many), he).size() == 162);
}

TEST_CASE("mixed fixture benchmark") {
  auto manifest = load_manifest(testutil::fixture_path("bench/manifest.jsonl"));
  gen::MockBackend mock(mock_outputs("bench/mock.json"));
  testutil::TempDir dir;
  RunOptions opts;
  opts.workers = 4;
  opts.record_store = dir / "records.jsonl";
  int tree_checks = 0, tree_mismatches = 0;
  std::mutex m;
  opts.on_tree_check = [&](const std::string&, const std::string& before, const std::string& after) {
    std::lock_guard lock(m);
    ++tree_checks;
    tree_mismatches += before != after;
  };

  auto records = run_benchmark(manifest, {}, gen_for(mock), fixture_assess(), opts);
  REQUIRE(records.size() == 10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].bug_id == manifest[i].bug_id);
    CHECK(records[i].error.empty());
    CHECK(records[i].verdicts.size() == records[i].candidates.size());
  }
  // B01, B03, B07, B08 and B10 ran tests; the rest were exact matches or unparsable.
  CHECK(tree_checks == 5);
  CHECK(tree_mismatches == 0);

  auto table = aggregate(records);
  REQUIRE(table.rows.size() == 1);
  const auto& row = table.rows[0];
  CHECK(row.label == "IR4xOR2");
  CHECK(row.universe == 10);
  CHECK(row.counts.plausible == 8);
  CHECK(row.counts.exact == 6);
  CHECK(row.counts.ast >= 6);
  CHECK(row.counts.ast == 6);
  CHECK(row.counts.semantic == 6);
  CHECK(row.counts.pending == 2);
  CHECK(row.top_k[0] == row.counts);
  require_monotone(table);

  // Per-candidate detail for the garbage bugs.
  const auto& b09 = records[8];
  CHECK_FALSE(b09.verdicts[0].parse_ok);
  CHECK(b09.verdicts[0].plausible == assess::Plausibility::not_run);
  const auto& b10 = records[9];
  CHECK(b10.verdicts[0].test_outcome == assess::TestOutcome::fail);
  CHECK(b10.verdicts[1].test_outcome == assess::TestOutcome::timeout);

  // Resume: nothing is re-queried and the aggregate is identical.
  auto requests = mock.request_count();
  auto again = run_benchmark(manifest, {}, gen_for(mock), fixture_assess(), opts);
  CHECK(mock.request_count() == requests);
  CHECK(aggregate(again).rows[0].counts == row.counts);
  RecordStore store(opts.record_store);
  CHECK(store.load().size() == 10);
  CHECK(aggregate(store.load()).rows[0].counts == row.counts);

  // A partially completed store only runs the missing bugs.
  auto lines = text::split_lines(text::read_file(opts.record_store));
  text::write_file(dir / "partial.jsonl", lines[0] + "\n" + lines[1] + "\n" + lines[2] + "\n" +
                                              lines[3].substr(0, 20));
  opts.record_store = dir / "partial.jsonl";
  auto before = mock.request_count();
  auto resumed = run_benchmark(manifest, {}, gen_for(mock), fixture_assess(), opts);
  CHECK(mock.request_count() - before == 7);
  CHECK(RecordStore(opts.record_store).load().size() == 10);
  CHECK(aggregate(resumed).rows[0].counts == row.counts);
}

TEST_CASE("seeded mock gives exact matches") {
  auto manifest = load_manifest(testutil::fixture_path("bench/manifest3.jsonl"));
  gen::MockBackend mock(mock_outputs("bench/mock3.json"));
  auto records = run_benchmark(manifest, {}, gen_for(mock), fixture_assess());
  auto t = aggregate(records);
  CHECK(t.rows[0].counts == Counts{3, 3, 3, 3, 0});
  require_monotone(t);
}

TEST_CASE("unreachable backend") {
  auto manifest = load_manifest(testutil::fixture_path("bench/manifest3.jsonl"));
  gen::GenerationConfig g;
  g.backend = "http://127.0.0.1:9/generate";
  g.retries = 0;
  g.timeout = 2s;
  testutil::TempDir dir;
  RunOptions opts;
  opts.record_store = dir / "r.jsonl";
  auto records = run_benchmark(manifest, {}, g, fixture_assess(), opts);
  for (const auto& r : records) {
    CHECK(r.error.rfind("BackendUnreachable", 0) == 0);
    CHECK_FALSE(r.complete());
  }
  auto t = aggregate(records);
  CHECK(t.rows[0].counts == Counts{});
  CHECK(t.rows[0].failed_bugs == 3);
  require_monotone(t);

  // Failed generations are retried on resume.
  gen::MockBackend mock(mock_outputs("bench/mock3.json"));
  auto retry = run_benchmark(manifest, {}, gen_for(mock), fixture_assess(), opts);
  CHECK(mock.request_count() == 3);
  CHECK(aggregate(retry).rows[0].counts.exact == 3);
  CHECK(aggregate(RecordStore(opts.record_store).load()).rows[0].counts.exact == 3);
}

TEST_CASE("invalid pairs are rejected") {
  CHECK_THROWS_AS(run_benchmark({}, {InputKind::IR1, OutputKind::OR2}, {}, {}), repr::InvalidPair);
}

TEST_CASE("other representation pairs") {
  auto manifest = load_manifest(testutil::fixture_path("bench/manifest3.jsonl"));
  // Full fixed functions as OR1 outputs for IR1.
  Outputs full;
  for (const auto& e : manifest) full[e.bug_id] = {e.reference};
  gen::MockBackend mock(full);
  auto records = run_benchmark(manifest, {InputKind::IR1, OutputKind::OR1}, gen_for(mock),
                               fixture_assess());
  auto t = aggregate(records);
  CHECK(t.rows[0].label == "IR1xOR1");
  CHECK(t.rows[0].counts.exact == 3);
  CHECK(records[0].prompt.find("<FILL_ME>") == std::string::npos);
}

TEST_CASE("aggregate semantics") {
  using assess::Plausibility;
  using assess::Semantic;
  SUBCASE("empty") {
    auto t = aggregate({});
    CHECK(t.rows.empty());
    auto z = aggregate({}, {repr::ReprPair{}});
    REQUIRE(z.rows.size() == 1);
    CHECK(z.rows[0].counts == Counts{});
    CHECK(z.rows[0].universe == 0);
    require_monotone(z);
  }
  SUBCASE("single exact match") {
    auto t = aggregate({record("B", {verdict(0, Plausibility::pass, true, true, Semantic::correct)})});
    CHECK(t.rows[0].counts == Counts{1, 1, 1, 1, 0});
    require_monotone(t);
  }
  SUBCASE("any candidate counts and rank curves") {
    auto t = aggregate({record("B1", {verdict(0, Plausibility::fail, false, false),
                                      verdict(1, Plausibility::pass, false, false),
                                      verdict(2, Plausibility::pass, false, true, Semantic::correct)}),
                        record("B2", {verdict(0, Plausibility::pass, false, false, Semantic::correct)}),
                        record("B3", {})});
    const auto& r = t.rows[0];
    CHECK(r.universe == 3);
    CHECK(r.counts == Counts{2, 0, 1, 2, 0});
    CHECK(r.top_k[0] == Counts{1, 0, 0, 1, 0});
    CHECK(r.top_k[1] == Counts{2, 0, 0, 1, 1});
    CHECK(r.top_k[2] == r.counts);
    CHECK(r.top_k[9] == r.counts);
    require_monotone(t);
  }
  SUBCASE("adding a worse candidate never lowers a count") {
    std::vector<RunRecord> base = {
        record("B1", {verdict(0, Plausibility::pass, true, true, Semantic::correct)}),
        record("B2", {verdict(0, Plausibility::pass, false, false)}),
        record("B3", {verdict(0, Plausibility::fail, false, false)})};
    auto before = aggregate(base).rows[0].counts;
    for (std::size_t i = 0; i < base.size(); ++i) {
      auto more = base;
      more[i].verdicts.push_back(verdict(1, Plausibility::fail, false, false));
      more[i].verdicts.push_back({more[i].bug_id, 2, false, Plausibility::not_run, false, false,
                                  Semantic::unlabeled, std::nullopt, "parse-failure"});
      auto after = aggregate(more).rows[0].counts;
      CHECK(after.plausible >= before.plausible);
      CHECK(after.exact >= before.exact);
      CHECK(after.ast >= before.ast);
      CHECK(after.semantic >= before.semantic);
    }
  }
  SUBCASE("later records supersede earlier ones and pairs get their own rows") {
    repr::ReprPair other{InputKind::IR3, OutputKind::OR2};
    auto t = aggregate({record("B1", {verdict(0, Plausibility::fail, false, false)}),
                        record("B1", {verdict(0, Plausibility::pass, true, true)}),
                        record("B1", {verdict(0, Plausibility::pass, false, false)}, other)});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[0].universe == 1);
    CHECK(t.rows[0].counts.exact == 1);
    CHECK(t.rows[1].label == "IR3xOR2");
    CHECK(t.rows[1].counts == Counts{1, 0, 0, 0, 1});
  }
  SUBCASE("violations are detected") {
    auto t = aggregate({record("B1", {verdict(0, Plausibility::pass, true, false)})});
    CHECK_FALSE(t.monotone());
    CHECK_FALSE(t.rows[0].violations.empty());
    AggregateRow row{"x", 2, {1, 2, 1, 1, 0}, {}, 0, {}};
    CHECK(check_monotone(row).size() == 1);
    row.counts = {3, 0, 0, 0, 0};
    CHECK(check_monotone(row).size() == 1);
  }
}

TEST_CASE("record serialization") {
  RunRecord r;
  r.bug_id = "B1";
  r.pair = {InputKind::IR3, OutputKind::OR2};
  r.prompt = "int f() {\n<FILL_ME>\n}";
  r.candidates = {{"B1", 0, "return 1;", std::string("int f() {\nreturn 1;\n}"), std::nullopt},
                  {"B1", 1, "@@", std::nullopt, std::string("malformed-output")}};
  r.verdicts = {verdict(0, assess::Plausibility::pass, false, true, assess::Semantic::correct),
                verdict(1, assess::Plausibility::not_run, false, false)};
  r.verdicts[0].bug_id = r.verdicts[1].bug_id = "B1";
  r.timings = {12ms, 34ms};
  auto line = record_to_json(r);
  CHECK(line.find('\n') == std::string::npos);
  auto back = record_from_json(line);
  CHECK(record_to_json(back) == line);
  CHECK(back.candidates[1].reconstruct_error == "malformed-output");
  CHECK(back.timings.assessment == 34ms);
}

TEST_CASE("reports") {
  AggregateTable published;
  const std::vector<std::tuple<std::string, Counts>> rows = {
      {"IR3xOR2 (no fine-tuning)", {131, 52, 70, 83, 0}},
      {"IR4xOR2 (no fine-tuning)", {107, 50, 60, 69, 0}},
      {"IR1xOR1", {79, 29, 31, 45, 0}},
      {"IR1xOR3", {41, 15, 17, 24, 0}},
      {"IR1xOR4", {12, 2, 2, 3, 0}},
      {"IR2xOR2", {198, 121, 122, 139, 0}},
      {"IR3xOR2", {153, 83, 86, 102, 0}},
      {"IR4xOR2", {195, 124, 125, 144, 0}}};
  for (const auto& [label, c] : rows) {
    AggregateRow r{label, 488, c, {}, 0, {}};
    r.violations = check_monotone(r);
    CHECK(r.violations.empty());
    published.rows.push_back(r);
  }
  CHECK(report(published, ReportFormat::markdown) == testutil::read_fixture("golden/report_markdown.md"));
  CHECK(report(published, parse_report_format("markdown")) == report(published, ReportFormat::markdown));

  AggregateTable one;
  one.rows.push_back({"IR4xOR2", 488, {195, 124, 125, 144, 3}, {}, 0, {}});
  CHECK(report(one, ReportFormat::delimited) ==
        "Representation\tBugs\tPlausible\tExact Match\tAST Match\tSemantic Match\tPending\n"
        "IR4xOR2\t488\t195\t124\t125\t144\t3\n");
  CHECK(report(one, ReportFormat::delimited, ',') ==
        "Representation,Bugs,Plausible,Exact Match,AST Match,Semantic Match,Pending\n"
        "IR4xOR2,488,195,124,125,144,3\n");
  CHECK(report(one, ReportFormat::plain) ==
        "Representation  Bugs  Plausible  Exact Match  AST Match  Semantic Match  Pending\n"
        "IR4xOR2          488        195          124        125             144        3\n");

  auto zeros = aggregate({}, {repr::ReprPair{}});
  CHECK(report(zeros, ReportFormat::delimited) ==
        "Representation\tBugs\tPlausible\tExact Match\tAST Match\tSemantic Match\tPending\n"
        "IR4xOR2\t0\t0\t0\t0\t0\t0\n");

  AggregateTable bad;
  bad.rows.push_back({"IR4xOR2", 10, {1, 2, 2, 2, 0}, {}, 0, {}});
  bad.rows[0].violations = check_monotone(bad.rows[0]);
  auto text = report(bad, ReportFormat::plain);
  CHECK(text.rfind("WARNING: monotonicity violated in IR4xOR2", 0) == 0);

  CHECK_THROWS_AS(parse_report_format("html"), Error);
  CHECK(parse_report_format("plain") == ReportFormat::plain);
  CHECK(parse_report_format("delimited") == ReportFormat::delimited);
}

TEST_CASE("top-k report") {
  auto t = aggregate({record("B1", {verdict(0, assess::Plausibility::fail, false, false),
                                    verdict(1, assess::Plausibility::pass, true, true,
                                            assess::Semantic::correct)})},
                     {}, 3);
  CHECK(report_top_k(t) ==
        "IR4xOR2 (1 bugs)\n"
        "  k  plausible  exact  ast  semantic\n"
        "  1          0      0    0         0\n"
        "  2          1      1    1         1\n"
        "  3          1      1    1         1\n");
}
