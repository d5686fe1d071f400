#include <filesystem>
#include <sstream>

#include "aprkit/bench.hpp"
#include "aprkit/cli.hpp"
#include "aprkit/corpus.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::cli;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args, const Environment& env = {}) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err, env);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Minijava on the path of every fixture build/test command, short timeouts.
std::string write_config(const testutil::TempDir& dir, json extra = json::object()) {
  json c = {{"generation", {{"backoff_ms", 1}, {"timeout_ms", 10000}}},
            {"assessment",
             {{"timeout_ms", 3000}, {"env_extra", {std::string("MINIJAVA=") + MINIJAVA}}}}};
  c.merge_patch(extra);
  auto path = dir / "config.json";
  text::write_file(path, c.dump());
  return path;
}

using Outputs = std::map<std::string, std::vector<std::string>>;

Outputs mock_outputs(const std::string& rel) {
  return json::parse(testutil::read_fixture(rel)).get<Outputs>();
}

}  // namespace

TEST_CASE("--help is a stable contract") {
  auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(r.out == testutil::read_fixture("golden/cli_help.txt"));
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"dataset"}).code == 2);
}

TEST_CASE("config precedence: flags > env > file > defaults") {
  testutil::TempDir dir;
  auto defaults = load_tool_config(std::nullopt, {});
  CHECK(defaults.generation.num_candidates == 10);
  CHECK(defaults.generation.backend == gen::GenerationConfig{}.backend);
  CHECK(defaults.assessment.timeout == std::chrono::milliseconds(300000));
  CHECK(defaults.filter.max_length == 1024);
  CHECK(defaults.markers.fill_token == "<FILL_ME>");
  CHECK(defaults.paths.record_store == "records.jsonl");

  auto file = dir / "c.json";
  text::write_file(file, R"({"generation":{"backend":"http://file:1/g","num_candidates":4},
                             "filter":{"max_length":512},"paths":{"workdir":"runs"}})");
  auto from_file = load_tool_config(file, {});
  CHECK(from_file.generation.backend == "http://file:1/g");
  CHECK(from_file.generation.num_candidates == 4);
  CHECK(from_file.filter.max_length == 512);
  CHECK(from_file.paths.workdir == (dir.path() / "runs").string());

  Environment env{{"REPAIR_CONFIG", file}, {"REPAIR_BACKEND_URL", "http://env:2/g"}};
  auto from_env = load_tool_config(std::nullopt, env);
  CHECK(from_env.generation.backend == "http://env:2/g");
  CHECK(from_env.generation.num_candidates == 4);

  // The config subcommand prints the effective result, so flags win last.
  auto shown = json::parse(run({"config", "-j", "3"}, env).out);
  CHECK(shown["generation"]["backend"] == "http://env:2/g");
  CHECK(shown["parallelism"] == 3);
  auto explicit_file = dir / "d.json";
  text::write_file(explicit_file, R"({"parallelism":7})");
  shown = json::parse(run({"--config", explicit_file, "config"}, env).out);
  CHECK(shown["parallelism"] == 7);
  CHECK(shown["generation"]["num_candidates"] == 10);

  // Round trip of the dump.
  auto again = parse_tool_config(dump_tool_config(from_file));
  CHECK(dump_tool_config(again) == dump_tool_config(from_file));

  CHECK_THROWS_AS(parse_tool_config(R"({"generation":{"bakend":"x"}})"), ConfigError);
  CHECK_THROWS_AS(parse_tool_config(R"({"parallelism":-1})"), ConfigError);
  CHECK_THROWS_AS(parse_tool_config("{"), ConfigError);
  CHECK_THROWS_AS(load_tool_config(dir / "missing.json", {}), ConfigError);
  CHECK(run({"--config", dir / "missing.json", "config"}).code == 1);
}

TEST_CASE("dataset") {
  testutil::TempDir dir;
  auto corpus = testutil::fixture_path("corpus/megadiff");
  auto denylist = testutil::fixture_path("corpus/denylist.jsonl");
  const std::string counts =
      "ingested=13 deduped=2 excluded=1 dropped-over-length=1 unrepresentable=0 emitted=9\n";
  auto a = run({"dataset", corpus, "--pair", "IR4xOR2", "-o", dir / "a.jsonl", "--denylist",
                denylist});
  CHECK(a.code == 0);
  CHECK(a.out == counts);
  auto b = run({"-j", "4", "dataset", corpus, "--pair", "ir4xor2", "-o", dir / "b.jsonl",
                "--denylist", denylist});
  CHECK(b.out == counts);
  CHECK(text::read_file(dir / "a.jsonl") == text::read_file(dir / "b.jsonl"));
  CHECK(corpus::read_dataset(dir / "a.jsonl").size() == 9);

  auto bad = run({"dataset", corpus, "--pair", "IR1xOR2", "-o", dir / "x.jsonl"});
  CHECK(bad.code == 2);
  CHECK(bad.err.find("IR1xOR2 is not a valid representation pair") != std::string::npos);
  CHECK(bad.err.find("IR1xOR1, IR1xOR3, IR1xOR4, IR2xOR2, IR3xOR2, IR4xOR2") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "x.jsonl"));
  CHECK(run({"dataset", corpus, "--pair", "IR9", "-o", dir / "x.jsonl"}).code == 2);

  std::filesystem::create_directory(dir / "empty");
  auto empty = run({"dataset", dir / "empty", "--pair", "IR1xOR1", "-o", dir / "e.jsonl"});
  CHECK(empty.code == 0);
  CHECK(empty.out.ends_with(" emitted=0\n"));

  CHECK(run({"dataset", dir / "nope", "--pair", "IR1xOR1", "-o", dir / "e.jsonl"}).code == 1);
  CHECK(run({"dataset", corpus, "--pair", "IR1xOR1", "-o", dir / "e.jsonl", "--tokenizer",
             "bpe"}).code == 1);
}

TEST_CASE("export-config") {
  testutil::TempDir dir;
  auto plain = run({"export-config"});
  CHECK(plain.code == 0);
  CHECK(plain.out == testutil::read_fixture("golden/training_config.txt"));

  auto corpus = testutil::fixture_path("corpus/megadiff");
  REQUIRE(run({"dataset", corpus, "--pair", "IR3xOR2", "-o", dir / "d.jsonl"}).code == 0);
  auto tagged = run({"export-config", "--dataset", dir / "d.jsonl", "-o", dir / "cfg.txt"});
  CHECK(tagged.code == 0);
  CHECK(text::read_file(dir / "cfg.txt") ==
        testutil::read_fixture("golden/training_config.txt") + "representation=IR3xOR2\n");

  auto mixed = text::read_file(dir / "d.jsonl");
  REQUIRE(run({"dataset", corpus, "--pair", "IR1xOR1", "-o", dir / "e.jsonl"}).code == 0);
  text::write_file(dir / "mixed.jsonl", mixed + text::read_file(dir / "e.jsonl"));
  auto rejected = run({"export-config", "--dataset", dir / "mixed.jsonl"});
  CHECK(rejected.code == 1);
  CHECK(rejected.err.find("error:") == 0);
}

TEST_CASE("show") {
  auto file = testutil::fixture_path("java/TwoMethods.java");
  auto ir1 = run({"show", file, "-f", "first", "-k", "IR1"});
  CHECK(ir1.code == 0);
  CHECK(ir1.out == "    public int first(int a) {\n        return a + count;\n    }\n");

  auto ir3 = run({"show", file, "-f", "first", "-k", "IR3", "-r", "2:2"});
  CHECK(ir3.code == 0);
  CHECK(ir3.out == "    public int first(int a) {\n        <FILL_ME>\n    }\n");

  // Annotations belong to the function text.
  auto ir4 = run({"show", file, "-f", "second", "-k", "IR4", "-r", "3"});
  CHECK(ir4.out.starts_with("    @Override\n"));
  CHECK(ir4.out.find("        // buggy code\n        // int twice = b * 2;\n        <FILL_ME>\n") !=
        std::string::npos);

  auto buggy = testutil::fixture_path("repr/closure10/buggy.java");
  auto fixed = testutil::fixture_path("repr/closure10/fixed.java");
  auto name = syntax::extract_functions({buggy, text::read_file(buggy)}).at(0).name;
  for (const char* kind : {"IR2", "IR3", "IR4", "OR2"}) {
    CAPTURE(kind);
    auto r = run({"show", buggy, "-f", name, "-k", kind, "--fixed", fixed});
    CHECK(r.code == 0);
    CHECK(r.out == testutil::read_fixture(std::string("repr/closure10/") + kind + ".txt"));
  }

  CHECK(run({"show", file, "-f", "nope", "-k", "IR1"}).code == 1);
  auto bad_region = run({"show", file, "-f", "second", "-k", "IR3", "-r", "3:9"});
  CHECK(bad_region.code == 1);
  CHECK(bad_region.err.find("error:") == 0);
  CHECK(run({"show", file, "-f", "second", "-k", "IR3", "-r", "x"}).code == 2);
  CHECK(run({"show", file, "-f", "second", "-k", "IR3"}).code == 2);
  CHECK(run({"show", file, "-f", "second", "-k", "OR2", "-r", "2:2"}).code == 2);
  CHECK(run({"show", file, "-f", "second", "-k", "XR1"}).code == 2);
}

TEST_CASE("repair on the seeded 3-bug fixture") {
  testutil::TempDir dir;
  auto cfg = write_config(dir);
  auto manifest = testutil::fixture_path("bench/manifest3.jsonl");
  gen::MockBackend mock(mock_outputs("bench/mock3.json"));
  const std::string table =
      "Representation\tBugs\tPlausible\tExact Match\tAST Match\tSemantic Match\tPending\n"
      "IR4xOR2\t3\t3\t3\t3\t3\t0\n";

  std::vector<std::string> args{"--config", cfg, "repair", manifest, "--backend", mock.endpoint(),
                                "--records", dir / "r.jsonl", "--format", "delimited",
                                "--verdicts", dir / "v.jsonl"};
  auto first = run(args);
  CHECK(first.code == 0);
  CHECK(first.out == table);
  CHECK(first.err.empty());
  CHECK(mock.request_count() == 3);
  CHECK(text::split_lines(text::read_file(dir / "v.jsonl")).size() >= 3);

  // Resumed: nothing is regenerated, same table.
  auto resumed = run(args);
  CHECK(resumed.out == table);
  CHECK(mock.request_count() == 3);

  auto report = run({"--config", cfg, "report", "--records", dir / "r.jsonl", "--format", "tsv"});
  CHECK(report.code == 0);
  CHECK(report.out == table);

  // Backend taken from the environment when no flag is given.
  testutil::TempDir other;
  auto via_env = run({"--config", cfg, "repair", manifest, "--no-records", "--format", "tsv"},
                     {{"REPAIR_BACKEND_URL", mock.endpoint()}});
  CHECK(via_env.out == table);
  CHECK(mock.request_count() == 6);
}

TEST_CASE("repair with a missing backend reports zeros and succeeds") {
  testutil::TempDir dir;
  auto cfg = write_config(dir, {{"generation", {{"retries", 0}}}});
  auto r = run({"--config", cfg, "repair", testutil::fixture_path("bench/manifest3.jsonl"),
                "--backend", "http://127.0.0.1:9/generate", "--records", dir / "r.jsonl",
                "--format", "delimited"});
  CHECK(r.code == 0);
  CHECK(r.out ==
        "Representation\tBugs\tPlausible\tExact Match\tAST Match\tSemantic Match\tPending\n"
        "IR4xOR2\t3\t0\t0\t0\t0\t0\n");
  CHECK(r.err.find("warning: backend unreachable at http://127.0.0.1:9/generate") == 0);
  CHECK(r.err.find("3 of 3 bugs failed") != std::string::npos);
}

TEST_CASE("repair rejects bad input") {
  testutil::TempDir dir;
  auto manifest = testutil::fixture_path("bench/manifest3.jsonl");
  CHECK(run({"repair", manifest, "--pair", "IR2xOR1", "--no-records"}).code == 2);
  text::write_file(dir / "m.jsonl", "{\"bug_id\": \"X\"}\n");
  auto broken = run({"repair", dir / "m.jsonl", "--no-records"});
  CHECK(broken.code == 1);
  CHECK(broken.err.find("manifest line 1") != std::string::npos);
  CHECK(run({"repair", dir / "none.jsonl", "--no-records"}).code == 1);
  CHECK(run({"repair", manifest, "--profile", "defects4j-sf", "--check-count", "--no-records"})
            .code == 1);
}

TEST_CASE("rate, kappa and rating-aware reports") {
  testutil::TempDir dir;
  auto ratings = dir / "ratings.jsonl";
  auto rate = [&](const std::string& bug, const std::string& label, const std::string& rater,
                  bool tiebreak = false) {
    std::vector<std::string> args{"rate", bug, "0", label, "--rater", rater, "--ratings", ratings};
    if (tiebreak) args.push_back("--tiebreak");
    return run(args);
  };
  auto first = rate("B1", "correct", "alice");
  CHECK(first.code == 0);
  CHECK(first.out == "B1 #0: pending\n");
  CHECK(rate("B1", "correct", "bob").out == "B1 #0: correct\n");
  auto dup = rate("B1", "incorrect", "bob");
  CHECK(dup.code == 1);
  CHECK(dup.err.find("error:") == 0);
  CHECK(rate("B1", "maybe", "carol").code == 1);
  CHECK(rate("B2", "correct", "alice").code == 0);
  CHECK(rate("B2", "correct", "bob").code == 0);

  auto agree = run({"kappa", "alice", "bob", "--ratings", ratings});
  CHECK(agree.code == 0);
  CHECK(agree.out.find("observed=1.0000") != std::string::npos);
  CHECK(run({"kappa", "alice", "nobody", "--ratings", ratings}).code == 1);

  // 2x2 table with observed agreement 0.8441 (hand calculation: kappa 0.6907).
  std::string lines;
  int id = 0;
  auto add = [&](int count, const char* la, const char* lb) {
    for (int i = 0; i < count; ++i, ++id) {
      auto bug = "K" + std::to_string(id);
      lines += json{{"bug_id", bug}, {"rank", 0}, {"rater", "a"}, {"label", la}}.dump() + "\n";
      lines += json{{"bug_id", bug}, {"rank", 0}, {"rater", "b"}, {"label", lb}}.dump() + "\n";
    }
  };
  add(4271, "correct", "correct");
  add(1229, "correct", "incorrect");
  add(330, "incorrect", "correct");
  add(4170, "incorrect", "incorrect");
  text::write_file(dir / "k.jsonl", lines);
  auto k = run({"kappa", "a", "b", "--ratings", dir / "k.jsonl"});
  CHECK(k.code == 0);
  CHECK(k.out == "kappa=0.6907 observed=0.8441 expected=0.4960 items=10000\n");

  // A plausible-but-different candidate moves from pending to semantic once rated.
  auto cfg = write_config(dir);
  auto manifest = testutil::fixture_path("bench/manifest.jsonl");
  gen::MockBackend mock(mock_outputs("bench/mock.json"));
  auto rec = dir / "r.jsonl";
  auto before = run({"--config", cfg, "repair", manifest, "--backend", mock.endpoint(),
                     "--records", rec, "--format", "tsv", "--ratings", dir / "r2.jsonl"});
  CHECK(before.code == 0);
  CHECK(before.out.ends_with("IR4xOR2\t10\t8\t6\t6\t6\t2\n"));
  CHECK(run({"rate", "B07", "0", "correct", "--rater", "a", "--ratings", dir / "r2.jsonl"}).code == 0);
  CHECK(run({"rate", "B07", "0", "correct", "--rater", "b", "--ratings", dir / "r2.jsonl"}).code == 0);
  auto after = run({"--config", cfg, "report", "--records", rec, "--format", "tsv", "--ratings",
                    dir / "r2.jsonl"});
  CHECK(after.out.ends_with("IR4xOR2\t10\t8\t6\t6\t7\t1\n"));
}
