#include <fstream>
#include <string>
#include <vector>

#include "aprkit/diff.hpp"
#include "aprkit/repr.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "json.hpp"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::repr;
using syntax::function_from_text;

namespace {

std::string fixture_text(const std::string& rel) {
  return std::string(text::rtrim(testutil::read_fixture(rel)));
}

SourceFunction closure(const std::string& side) {
  return function_from_text(fixture_text("repr/closure10/" + side + ".java"), "mayBeString");
}

std::size_t count(std::string_view hay, std::string_view needle) {
  std::size_t n = 0;
  for (auto pos = hay.find(needle); pos != std::string_view::npos;
       pos = hay.find(needle, pos + needle.size()))
    ++n;
  return n;
}

struct Triple {
  std::string id;
  SourceFunction buggy;
  SourceFunction fixed;
  Region region;
  std::vector<std::string> tags;
};

std::vector<Triple> load_triples() {
  std::ifstream in(testutil::fixture_path("triples/triples.jsonl"));
  std::vector<Triple> out;
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line);
    out.push_back({j["id"], function_from_text(j["buggy"]), function_from_text(j["fixed"]),
                   Region{j["region"][0], j["region"][1]}, j["tags"]});
  }
  return out;
}

std::string without_lines(const std::string& s, const std::vector<std::string>& drop) {
  std::vector<std::string> kept;
  for (const auto& l : text::split_lines(s)) {
    bool skip = false;
    for (const auto& d : drop)
      if (text::trim(l) == d) skip = true;
    if (!skip) kept.push_back(l);
  }
  return text::join_lines(kept);
}

}  // namespace

TEST_CASE("input representations match the published Closure-10 listings") {
  auto fn = closure("buggy");
  Region region{3, 3};
  CHECK(build_input(fn, region, InputKind::IR1) == fn.text);
  CHECK(build_input(fn, region, InputKind::IR2) == fixture_text("repr/closure10/IR2.txt"));
  CHECK(build_input(fn, region, InputKind::IR3) == fixture_text("repr/closure10/IR3.txt"));
  CHECK(build_input(fn, region, InputKind::IR4) == fixture_text("repr/closure10/IR4.txt"));
}

TEST_CASE("output representations match the published Closure-10 listings") {
  auto buggy = closure("buggy");
  auto fixed = closure("fixed");
  Region region{3, 3};
  CHECK(build_output(buggy, fixed, region, OutputKind::OR1) == fixed.text);
  CHECK(build_output(buggy, fixed, region, OutputKind::OR2) ==
        fixture_text("repr/closure10/OR2.txt"));

  // The OR3/OR4 listings lose leading spaces in typesetting; compare the
  // changed lines and the context window sizes.
  auto or3 = build_output(buggy, fixed, region, OutputKind::OR3);
  auto or4 = build_output(buggy, fixed, region, OutputKind::OR4);
  for (const auto& d : {or3, or4}) {
    CHECK(d.find("\n-    return allResultsMatch(n, MAY_BE_STRING_PREDICATE);\n") != std::string::npos);
    CHECK(d.find("\n+    return anyResultsMatch(n, MAY_BE_STRING_PREDICATE);\n") != std::string::npos);
  }
  CHECK(or3.starts_with("@@ -1,6 +1,6 @@\n"));
  CHECK(or4.starts_with("@@ -2,3 +2,3 @@\n"));
  CHECK(count(or4, "\n ") == 2);
}

TEST_CASE("IR1 is the identity for any region") {
  auto fn = closure("buggy");
  for (const auto& r : enumerate_regions(fn)) CHECK(build_input(fn, r, InputKind::IR1) == fn.text);
}

TEST_CASE("empty regions") {
  auto fn = function_from_text("void f() {\n  a();\n  b();\n}");
  auto r = Region::insertion_before(3);
  CHECK(r.empty());
  CHECK(build_input(fn, r, InputKind::IR4) == "void f() {\n  a();\n  <FILL_ME>\n  b();\n}");
  CHECK(build_input(fn, r, InputKind::IR3) == "void f() {\n  a();\n  <FILL_ME>\n  b();\n}");
  CHECK(build_input(fn, r, InputKind::IR2) ==
        "void f() {\n  a();\n  // buggy code starts here\n  // buggy code ends here\n  b();\n}");
  // Insertion after the last line takes the previous line's indentation.
  CHECK(build_input(fn, Region::insertion_before(5), InputKind::IR3) ==
        "void f() {\n  a();\n  b();\n}\n<FILL_ME>");
}

TEST_CASE("region validation") {
  auto fn = function_from_text("a\nb\nc");
  CHECK_NOTHROW(validate_region({1, 3}, 3));
  CHECK_NOTHROW(validate_region({4, 3}, 3));
  CHECK_NOTHROW(validate_region({1, 0}, 3));
  CHECK_THROWS_AS(validate_region({0, 1}, 3), InvalidRegion);
  CHECK_THROWS_AS(validate_region({2, 4}, 3), InvalidRegion);
  CHECK_THROWS_AS(validate_region({3, 1}, 3), InvalidRegion);
  CHECK_THROWS_AS(validate_region({5, 4}, 3), InvalidRegion);
  CHECK_THROWS_AS(build_input(fn, {2, 7}, InputKind::IR3), InvalidRegion);
}

TEST_CASE("pairing matrix") {
  int valid = 0;
  for (auto in : {InputKind::IR1, InputKind::IR2, InputKind::IR3, InputKind::IR4})
    for (auto out : {OutputKind::OR1, OutputKind::OR2, OutputKind::OR3, OutputKind::OR4})
      valid += valid_pair({in, out});
  CHECK(valid == 6);
  CHECK(valid_pair({InputKind::IR4, OutputKind::OR2}));
  CHECK(valid_pair({InputKind::IR3, OutputKind::OR2}));
  CHECK_FALSE(valid_pair({InputKind::IR1, OutputKind::OR2}));
  CHECK_FALSE(valid_pair({InputKind::IR4, OutputKind::OR1}));
  CHECK(all_valid_pairs().size() == 6);
  for (auto p : all_valid_pairs()) CHECK(valid_pair(p));
}

TEST_CASE("pair tags") {
  CHECK(ReprPair{InputKind::IR4, OutputKind::OR2}.to_string() == "IR4xOR2");
  CHECK(ReprPair::parse("ir1xor3") == ReprPair{InputKind::IR1, OutputKind::OR3});
  CHECK(ReprPair::parse("IR2-OR2") == ReprPair{InputKind::IR2, OutputKind::OR2});
  CHECK_FALSE(ReprPair::parse("IR5xOR2"));
  CHECK_FALSE(ReprPair::parse("IR4OR2"));
}

TEST_CASE("enumerate_regions") {
  CHECK(enumerate_regions(function_from_text("x")).size() == 1);
  auto four = enumerate_regions(function_from_text("a\nb\nc\nd"));
  CHECK(four.size() == 10);
  CHECK(four.front() == Region{1, 1});
  CHECK(four[1] == Region{1, 2});
  CHECK(four.back() == Region{4, 4});
  std::string twenty = "l";
  for (int i = 1; i < 20; ++i) twenty += "\nl";
  CHECK(enumerate_regions(function_from_text(twenty)).size() == 210);
}

TEST_CASE("identical buggy and fixed") {
  auto fn = closure("buggy");
  Region r{2, 4};
  CHECK(build_output(fn, fn, r, OutputKind::OR3).empty());
  auto lines = text::split_lines(fn.text);
  auto chunk = fixed_chunk(fn, fn, r);
  CHECK(chunk == std::vector<std::string>(lines.begin() + 1, lines.begin() + 4));
  CHECK(reconstruct(fn, r, {InputKind::IR3, OutputKind::OR2},
                    build_output(fn, fn, r, OutputKind::OR2)) == fn.text);
}

TEST_CASE("OR3/OR4 hunks match the reference diff tool") {
  std::string buggy_text;
  for (int i = 1; i <= 15; ++i) buggy_text += (i > 1 ? "\n" : "") + std::string("  s") + std::to_string(i) + "();";
  auto buggy = function_from_text(buggy_text);
  for (int k : {1, 2, 7, 14, 15}) {
    auto lines = text::split_lines(buggy_text);
    lines[static_cast<std::size_t>(k - 1)] = "  fixed();";
    auto fixed = function_from_text(text::join_lines(lines));
    for (auto [kind, ctx] : {std::pair{OutputKind::OR3, 3}, std::pair{OutputKind::OR4, 1}}) {
      testutil::TempDir dir;
      text::write_file(dir / "a", buggy.text + "\n");
      text::write_file(dir / "b", fixed.text + "\n");
      auto ref = testutil::run_command("diff -U" + std::to_string(ctx) + " " + (dir / "a") + " " + (dir / "b"));
      auto expected = ref.output.substr(ref.output.find("\n@@") + 1);
      CHECK_MESSAGE(build_output(buggy, fixed, {k, k}, kind) == expected, "k=" << k);
      auto d = diff::UnifiedDiff::parse(build_output(buggy, fixed, {k, k}, kind));
      REQUIRE(d.hunks.size() == 1);
      CHECK(d.hunks[0].old_start == std::max(1, k - ctx));
      CHECK(d.hunks[0].old_len == std::min(15, k + ctx) - std::max(1, k - ctx) + 1);
    }
  }
}

TEST_CASE("OR2 rejects changes outside the region") {
  auto buggy = function_from_text("a\nb\nc\nd\ne");
  auto fixed = function_from_text("a\nB\nc\nD\ne");
  CHECK_THROWS_AS(build_output(buggy, fixed, {2, 2}, OutputKind::OR2), RegionMismatch);
  CHECK_THROWS_AS(build_output(buggy, fixed, {4, 4}, OutputKind::OR2), RegionMismatch);
  CHECK(build_output(buggy, fixed, {2, 4}, OutputKind::OR2) == "B\nc\nD");
}

TEST_CASE("derive_region") {
  std::string base;
  for (int i = 1; i <= 12; ++i) base += (i > 1 ? "\n" : "") + std::string("line") + std::to_string(i);
  auto change = [&](std::vector<int> at) {
    auto lines = text::split_lines(base);
    for (int k : at) lines[static_cast<std::size_t>(k - 1)] += " changed";
    return text::join_lines(lines);
  };
  CHECK(derive_region(base, change({7})) == Region{7, 7});
  CHECK(derive_region(base, change({3, 9})) == Region{3, 9});
  auto lines = text::split_lines(base);
  lines.insert(lines.begin() + 4, "inserted");
  CHECK(derive_region(base, text::join_lines(lines)) == Region::insertion_before(5));
  CHECK_THROWS_AS(derive_region(base, base), Error);
  // Repeated lines: the region never extends past either text.
  CHECK(derive_region("x\nx", "x\nx\nx") == Region::insertion_before(3));
}

TEST_CASE("representation invariants over the triple corpus") {
  auto triples = load_triples();
  REQUIRE(triples.size() >= 50);
  for (const auto& t : triples) {
    CAPTURE(t.id);
    auto ir1 = build_input(t.buggy, t.region, InputKind::IR1);
    auto ir2 = build_input(t.buggy, t.region, InputKind::IR2);
    auto ir3 = build_input(t.buggy, t.region, InputKind::IR3);
    auto ir4 = build_input(t.buggy, t.region, InputKind::IR4);
    CHECK(count(ir1, "<FILL_ME>") == 0);
    CHECK(count(ir2, "<FILL_ME>") == 0);
    CHECK(count(ir3, "<FILL_ME>") == 1);
    CHECK(count(ir4, "<FILL_ME>") == 1);
    CHECK(without_lines(ir2, {"// buggy code starts here", "// buggy code ends here"}) == ir1);

    // Drop the header and the commented region lines.
    auto l4 = text::split_lines(ir4);
    if (!t.region.empty()) {
      auto first = static_cast<long>(t.region.start_line - 1);
      l4.erase(l4.begin() + first, l4.begin() + first + 1 + t.region.size());
    }
    CHECK(text::join_lines(l4) == ir3);
  }
}

TEST_CASE("round trip for every valid pair over the triple corpus") {
  auto triples = load_triples();
  int multi = 0;
  for (const auto& t : triples) {
    if (std::find(t.tags.begin(), t.tags.end(), "multi-location") != t.tags.end()) ++multi;
    for (auto pair : all_valid_pairs()) {
      CAPTURE(t.id);
      CAPTURE(pair.to_string());
      auto out = build_output(t.buggy, t.fixed, t.region, pair.output);
      CHECK(reconstruct(t.buggy, t.region, pair, out) == t.fixed.text);
    }
  }
  CHECK(multi >= 5);
}

TEST_CASE("reconstruct") {
  auto buggy = closure("buggy");
  auto fixed = closure("fixed");
  Region r{3, 3};
  SUBCASE("no-op candidate is accepted") {
    CHECK(reconstruct(buggy, r, {InputKind::IR1, OutputKind::OR1}, buggy.text) == buggy.text);
  }
  SUBCASE("garbage diff is malformed") {
    CHECK_THROWS_AS(reconstruct(buggy, r, {InputKind::IR1, OutputKind::OR3},
                                "I think the fix is to call anyResultsMatch."),
                    MalformedOutput);
  }
  SUBCASE("stop-token residue and surrounding whitespace are removed") {
    auto chunk = build_output(buggy, fixed, r, OutputKind::OR2);
    CHECK(reconstruct(buggy, r, {InputKind::IR4, OutputKind::OR2}, "\n" + chunk + "  \n</s><pad>") ==
          fixed.text);
    CHECK(reconstruct(buggy, r, {InputKind::IR1, OutputKind::OR1}, fixed.text + "<EOT>junk") ==
          fixed.text);
  }
  SUBCASE("diff that does not apply") {
    auto d = build_output(buggy, fixed, r, OutputKind::OR4);
    auto other = function_from_text("int g() {\n  return 0;\n}");
    CHECK_THROWS_AS(reconstruct(other, {2, 2}, {InputKind::IR1, OutputKind::OR4}, d),
                    diff::HunkApplyFailure);
  }
  SUBCASE("invalid pair") {
    CHECK_THROWS_AS(reconstruct(buggy, r, {InputKind::IR1, OutputKind::OR2}, "x"), InvalidPair);
  }
  SUBCASE("invalid region") {
    CHECK_THROWS_AS(reconstruct(buggy, {9, 9}, {InputKind::IR3, OutputKind::OR2}, "x"),
                    InvalidRegion);
  }
  SUBCASE("empty output deletes the region") {
    CHECK(reconstruct(buggy, r, {InputKind::IR3, OutputKind::OR2}, "</s>") ==
          "static boolean mayBeString(Node n, boolean recurse) {\n  if (recurse) {\n  } else {\n"
          "    return mayBeStringHelper(n);\n  }\n}");
  }
  SUBCASE("multi-line chunk keeps its own indentation after the first line") {
    auto out = reconstruct(buggy, r, {InputKind::IR3, OutputKind::OR2},
                           "if (n == null) {\n      return false;\n    }\n    return true;");
    CHECK(text::split_lines(out)[2] == "    if (n == null) {");
    CHECK(text::split_lines(out)[3] == "      return false;");
  }
}

TEST_CASE("chunks that output trimming cannot represent") {
  // A trailing-whitespace-only change is erased by output trimming; dataset
  // construction detects and drops such samples.
  auto buggy = function_from_text("void f() {\n  a();\n}");
  auto fixed = function_from_text("void f() {\n  a();  \n}");
  Region r{2, 2};
  auto out = build_output(buggy, fixed, r, OutputKind::OR2);
  CHECK(reconstruct(buggy, r, {InputKind::IR3, OutputKind::OR2}, out) != fixed.text);
}
