#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "aprkit/corpus.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::corpus;
using repr::InputKind;
using repr::OutputKind;
using syntax::function_from_text;

namespace {

const std::string kMegadiff = testutil::fixture_path("corpus/megadiff");

FunctionPair make_pair(std::string id, std::string buggy, std::string fixed,
                       std::string path = "A.java") {
  FunctionPair p{std::move(id), function_from_text(std::move(buggy), "f"),
                 function_from_text(std::move(fixed), "f"), {}, path};
  p.buggy.file = p.fixed.file = path;
  p.region = derive_region(p);
  return p;
}

std::vector<std::string> ids(const std::vector<FunctionPair>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.id);
  return out;
}

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  std::string l;
  while (std::getline(in, l)) ++n;
  return n;
}

std::string long_function(int statements) {
  std::string s = "int f(int x) {\n";
  for (int i = 0; i < statements; ++i) s += "  x = x * 31 + " + std::to_string(i) + ";\n";
  return s + "  return x;\n}";
}

}  // namespace

TEST_CASE("layout detection") {
  CHECK(detect_layout(kMegadiff) == Layout::megadiff);
  CHECK(detect_layout(testutil::fixture_path("corpus/pairs")) == Layout::file_pairs);
  CHECK_THROWS_AS(detect_layout(testutil::fixture_path("corpus/nope")), Error);
}

TEST_CASE("per-diff outcomes on the 20-diff fixture") {
  // Hand-counted key; see fixtures/corpus/README.md.
  const std::map<std::string, Outcome> expected = {
      {"d01.diff", Outcome::pair}, {"d02.diff", Outcome::pair}, {"d03.diff", Outcome::pair},
      {"d04.diff", Outcome::pair}, {"d05.diff", Outcome::pair}, {"d06.diff", Outcome::pair},
      {"d07.diff", Outcome::pair}, {"d08.diff", Outcome::pair}, {"d09.diff", Outcome::pair},
      {"d10.diff", Outcome::pair}, {"d11.diff", Outcome::pair}, {"d12.diff", Outcome::pair},
      {"d13.diff", Outcome::pair},
      {"d14.diff", Outcome::multiple_functions}, {"d15.diff", Outcome::multiple_functions},
      {"d16.diff", Outcome::multiple_functions},
      {"d17.diff", Outcome::multiple_files}, {"d18.diff", Outcome::multiple_files},
      {"d19.diff", Outcome::no_function_change}, {"d20.diff", Outcome::parse_failure},
  };
  std::vector<std::string> logged;
  IngestOptions opts;
  opts.log = [&](const std::string& m) { logged.push_back(m); };
  auto results = scan_corpus(kMegadiff, opts);
  REQUIRE(results.size() == 20);
  for (const auto& r : results) {
    CAPTURE(r.provenance);
    CAPTURE(r.detail);
    CHECK(r.outcome == expected.at(r.provenance));
    CHECK(r.pair.has_value() == (r.outcome == Outcome::pair));
  }
  CHECK(logged.size() == 7);
}

TEST_CASE("ingested pairs carry exact functions and regions") {
  auto pairs = ingest_diff_corpus(kMegadiff);
  REQUIRE(pairs.size() == 13);
  const auto& d01 = pairs[0];
  CHECK(d01.id == "d01");
  CHECK(d01.buggy.name == "add");
  CHECK(d01.buggy.file == "src/demo/Calculator.java");
  CHECK(d01.buggy.start_line == 6);
  CHECK(d01.buggy.end_line == 9);
  CHECK(d01.region == Region{2, 2});
  CHECK(d01.fixed.text.find("last = a + b;") != std::string::npos);

  std::map<std::string, FunctionPair> by_id;
  for (const auto& p : pairs) by_id[p.id] = p;
  CHECK(by_id["d06"].region == Region::insertion_before(2));  // pure insertion
  CHECK(by_id["d07"].region == Region{2, 2});                 // deletion
  CHECK(by_id["d12"].region == Region{2, 16});                // two sites, minimal cover
  CHECK(by_id["d13"].buggy.name == "Account");                // constructor
  for (const auto& p : pairs) CHECK(p.buggy.text != p.fixed.text);
}

TEST_CASE("single-function filter") {
  const std::string before =
      "class A {\n  int f() {\n    return 1;\n  }\n\n  int g() {\n    return 2;\n  }\n}\n";
  syntax::SourceFile b{"A.java", before};
  SUBCASE("one function changed") {
    syntax::SourceFile a{"A.java", before};
    a.content.replace(a.content.find("return 1"), 8, "return 3");
    auto r = pair_from_revisions(b, a, "x", "x.diff");
    CHECK(r.outcome == Outcome::pair);
    CHECK(r.pair->buggy.name == "f");
  }
  SUBCASE("two functions changed") {
    syntax::SourceFile a{"A.java", before};
    a.content.replace(a.content.find("return 1"), 8, "return 3");
    a.content.replace(a.content.find("return 2"), 8, "return 4");
    CHECK(pair_from_revisions(b, a, "x", "x.diff").outcome == Outcome::multiple_functions);
  }
  SUBCASE("function change plus a field") {
    syntax::SourceFile a{"A.java", before};
    a.content.replace(a.content.find("return 1"), 8, "return 3");
    a.content.replace(a.content.find("\n\n"), 2, "\n  int z;\n");
    CHECK(pair_from_revisions(b, a, "x", "x.diff").outcome == Outcome::change_outside_function);
  }
  SUBCASE("function added") {
    syntax::SourceFile a{"A.java", before};
    a.content.insert(a.content.rfind('}'), "  int h() { return 0; }\n");
    CHECK(pair_from_revisions(b, a, "x", "x.diff").outcome ==
          Outcome::function_added_or_removed);
  }
  SUBCASE("unparsable revision") {
    syntax::SourceFile a{"A.java", "class A { int f( }"};
    CHECK(pair_from_revisions(b, a, "x", "x.diff").outcome == Outcome::parse_failure);
  }
}

TEST_CASE("file-pairs layout") {
  auto results = scan_corpus(testutil::fixture_path("corpus/pairs"));
  REQUIRE(results.size() == 3);
  CHECK(results[0].provenance == "Lonely_before.java");
  CHECK(results[0].outcome == Outcome::missing_source);
  CHECK(results[1].outcome == Outcome::pair);
  CHECK(results[1].pair->id == "Max");
  CHECK(results[2].pair->id == "sub/Sign");
  CHECK(results[2].pair->region == Region::insertion_before(3));
}

TEST_CASE("derive_region on function pairs") {
  std::string base;
  for (int i = 1; i <= 10; ++i) base += "s" + std::to_string(i) + "();\n";
  base += "end();";
  auto with = [&](std::map<int, std::string> edits) {
    auto lines = text::split_lines(base);
    for (auto& [k, v] : edits) lines[static_cast<std::size_t>(k - 1)] = v;
    return text::join_lines(lines);
  };
  CHECK(make_pair("a", base, with({{7, "x();"}})).region == Region{7, 7});
  CHECK(make_pair("b", base, with({{3, "x();"}, {9, "y();"}})).region == Region{3, 9});
  auto lines = text::split_lines(base);
  lines.insert(lines.begin() + 4, "inserted();");
  CHECK(make_pair("c", base, text::join_lines(lines)).region == Region{5, 4});
}

TEST_CASE("dedupe") {
  auto a = make_pair("a", "int f() {\n  return 1;\n}", "int f() {\n  return 2;\n}");
  auto a_copy = a;
  a_copy.id = "a2";
  auto a_path = make_pair("a3", a.buggy.text, a.fixed.text, "other/B.java");
  auto a_ws = make_pair("a4", "int f() {  \n  return 1;\n}", "int f() {\n  return 2;\t\n}");
  auto b = make_pair("b", "int f() {\n  return 1;\n}", "int f() {\n  return 3;\n}");

  CHECK(ids(dedupe({a, a_copy})) == std::vector<std::string>{"a"});
  CHECK(ids(dedupe({a, a_path})) == std::vector<std::string>{"a"});
  CHECK(ids(dedupe({a, b})) == std::vector<std::string>{"a", "b"});
  CHECK(ids(dedupe({a, a_ws, b})) == std::vector<std::string>{"a", "b"});
  CHECK(ids(dedupe({b, a, a_copy})) == std::vector<std::string>{"b", "a"});
  auto all = std::vector<FunctionPair>{a, b, a_copy, a_path, a_ws};
  CHECK(ids(dedupe(dedupe(all))) == ids(dedupe(all)));
}

TEST_CASE("exclude_leakage") {
  auto pairs = ingest_diff_corpus(kMegadiff);
  auto denylist = load_denylist(testutil::fixture_path("corpus/denylist.jsonl"));
  REQUIRE(denylist.size() == 1);
  CHECK(denylist[0].bug_id == "Math-28");
  CHECK(ids(exclude_leakage(pairs, {})) == ids(pairs));
  std::vector<std::string> logged;
  auto kept = exclude_leakage(pairs, denylist, [&](const std::string& m) { logged.push_back(m); });
  CHECK(kept.size() == pairs.size() - 1);
  for (const auto& p : kept) CHECK(p.id != "d10");
  REQUIRE(logged.size() == 1);
  CHECK(logged[0].find("Math-28") != std::string::npos);
  CHECK(default_leakage_ids() == std::vector<std::string>{"Math-28", "Math-44", "JacksonDatabind-82"});
}

TEST_CASE("approximate tokenizer") {
  CHECK(count_tokens("") == 0);
  // int, ' ', x, ;
  CHECK(count_tokens("int x;") == 4);
  // return, ' ', a, +, b, ;
  CHECK(count_tokens("return a+b;") == 6);
  // if _ ( x _ > = _ 10 ) _ { \n__ y_1 ( ) ; \n }
  CHECK(count_tokens("if (x >= 10) {\n  y_1();\n}") == 19);
  // "s", ' ', =, ' ', ", é, ", ;  (non-ASCII code point is one token)
  CHECK(count_tokens("s = \"\xC3\xA9\";") == 8);
  CHECK(count_tokens("   \n\t ") == 1);
}

TEST_CASE("external tokenizer agrees with the external tool") {
  auto src = testutil::read_fixture("java/XYSeries.java");
  testutil::TempDir dir;
  text::write_file(dir / "in.txt", src);
  auto oracle = testutil::run_command("wc -w < " + (dir / "in.txt"));
  CHECK(count_tokens(src, "external:wc -w") == std::stoul(oracle.output));
  CHECK_THROWS_AS(count_tokens("x", "external:echo nope"), TokenizerFailure);
  CHECK_THROWS_AS(count_tokens("x", "sentencepiece"), UnknownTokenizer);
  CHECK_THROWS_AS(count_tokens("x", "external:"), UnknownTokenizer);
}

TEST_CASE("build_dataset") {
  auto small = make_pair("small", "int f() {\n  return 1;\n}", "int f() {\n  return 2;\n}");
  auto big_text = long_function(400);
  auto big = make_pair("big", big_text, big_text + " ");
  CHECK(count_tokens(big.buggy.text) > 2000);
  CorpusFilterConfig filter;
  DatasetStats stats;

  auto samples = build_dataset({small, big}, {InputKind::IR4, OutputKind::OR2}, filter, {}, &stats);
  REQUIRE(samples.size() == 1);
  CHECK(stats.dropped_over_length == 1);
  CHECK(stats.considered == 2);
  CHECK(stats.emitted == 1);
  const auto& s = samples[0];
  CHECK(s.input.find("<FILL_ME>") != std::string::npos);
  CHECK(s.input.find("  // buggy code\n  // return 1;\n  <FILL_ME>") != std::string::npos);
  CHECK(s.output == "return 2;");
  CHECK(s.token_count == count_tokens(s.input) + count_tokens(s.output));

  SUBCASE("cap is strict") {
    CorpusFilterConfig exact;
    exact.max_length = s.token_count;
    CHECK(build_dataset({small}, s.pair, exact).empty());
    exact.max_length = s.token_count + 1;
    CHECK(build_dataset({small}, s.pair, exact).size() == 1);
  }
  SUBCASE("invalid pair") {
    CHECK_THROWS_AS(build_dataset({small}, {InputKind::IR1, OutputKind::OR2}, filter),
                    repr::InvalidPair);
  }
  SUBCASE("region mismatch is counted") {
    auto wrong = small;
    wrong.region = Region{1, 1};
    DatasetStats st;
    CHECK(build_dataset({wrong}, s.pair, filter, {}, &st).empty());
    CHECK(st.region_mismatch == 1);
  }
  SUBCASE("non-invertible samples are counted") {
    auto ws = make_pair("ws", "int f() {\n  return 1;\n}", "int f() {\n  return 1;  \n}");
    DatasetStats st;
    CHECK(build_dataset({ws}, s.pair, filter, {}, &st).empty());
    CHECK(st.unrepresentable == 1);
  }
}

TEST_CASE("emit_dataset") {
  testutil::TempDir dir;
  CHECK(emit_dataset({}, dir / "empty.jsonl") == 0);
  CHECK(text::read_file(dir / "empty.jsonl").empty());

  auto p = make_pair("p", "int f() {\n  return 1;\n}", "int f() {\n  return 2;\n}");
  auto samples = build_dataset({p, p, p}, {InputKind::IR3, OutputKind::OR2}, {});
  CHECK(emit_dataset(samples, dir / "three.jsonl") == 3);
  CHECK(line_count(dir / "three.jsonl") == 3);
  auto first_line = text::split_lines(text::read_file(dir / "three.jsonl"))[0];
  CHECK(first_line.starts_with(R"({"id":"p","pair":"IR3xOR2","input":"int f() {\n  <FILL_ME>\n}","output":"return 2;","token_count":)"));
  auto back = read_dataset(dir / "three.jsonl");
  REQUIRE(back.size() == 3);
  CHECK(back[0].input == samples[0].input);
  CHECK(back[0].pair == samples[0].pair);
}

TEST_CASE("full fixture pipeline counts and determinism") {
  auto denylist = load_denylist(testutil::fixture_path("corpus/denylist.jsonl"));
  for (auto pair : repr::all_valid_pairs()) {
    CAPTURE(pair.to_string());
    std::string previous;
    for (std::size_t workers : {1u, 4u}) {
      IngestOptions io;
      io.workers = workers;
      auto pairs = ingest_diff_corpus(kMegadiff, io);
      auto unique = dedupe(pairs);
      auto clean = exclude_leakage(unique, denylist);
      DatasetStats stats;
      BuildOptions bo;
      bo.workers = workers;
      auto samples = build_dataset(clean, pair, {}, {}, &stats, bo);
      CHECK(pairs.size() == 13);
      CHECK(unique.size() == 11);
      CHECK(clean.size() == 10);
      CHECK(stats.dropped_over_length == 1);
      CHECK(stats.region_mismatch == 0);
      CHECK(stats.unrepresentable == 0);
      CHECK(samples.size() == 9);
      for (const auto& s : samples) {
        CHECK(s.token_count < 1024);
        CHECK(repr::valid_pair(s.pair));
      }
      for (std::size_t i = 0; i < clean.size(); ++i) {
        if (clean[i].id == "d11") continue;
        auto it = std::find_if(samples.begin(), samples.end(),
                               [&](const TrainingSample& s) { return s.id == clean[i].id; });
        REQUIRE(it != samples.end());
        CHECK(repr::reconstruct(clean[i].buggy, clean[i].region, pair, it->output) ==
              clean[i].fixed.text);
      }
      testutil::TempDir dir;
      emit_dataset(samples, dir / "out.jsonl");
      auto bytes = text::read_file(dir / "out.jsonl");
      if (!previous.empty()) CHECK(bytes == previous);
      previous = bytes;
    }
  }
}

TEST_CASE("training config export") {
  CHECK(render_training_config({}) == testutil::read_fixture("golden/training_config.txt"));
  auto with_pair = render_training_config({}, repr::ReprPair{InputKind::IR4, OutputKind::OR2});
  CHECK(with_pair.ends_with("max_length=1024\nrepresentation=IR4xOR2\n"));

  testutil::TempDir dir;
  auto p = make_pair("p", "int f() {\n  return 1;\n}", "int f() {\n  return 2;\n}");
  auto a = build_dataset({p}, {InputKind::IR3, OutputKind::OR2}, {});
  auto b = build_dataset({p}, {InputKind::IR4, OutputKind::OR2}, {});
  emit_dataset(a, dir / "a.jsonl");
  CHECK(dataset_pair(dir / "a.jsonl") == repr::ReprPair{InputKind::IR3, OutputKind::OR2});
  a.insert(a.end(), b.begin(), b.end());
  emit_dataset(a, dir / "mixed.jsonl");
  CHECK_THROWS_AS(dataset_pair(dir / "mixed.jsonl"), MixedDataset);
  emit_dataset({}, dir / "empty.jsonl");
  CHECK_FALSE(dataset_pair(dir / "empty.jsonl").has_value());
}
