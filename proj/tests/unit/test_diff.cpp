#include <random>
#include <string>
#include <vector>

#include "aprkit/diff.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::diff;

namespace {

std::string numbered(int n, int changed = 0, const std::string& replacement = "") {
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i == changed ? replacement : "line " + std::to_string(i)) + "\n";
  return s;
}

// GNU diff output with the two file-header lines removed.
std::string gnu_diff(const std::string& a, const std::string& b, int context) {
  testutil::TempDir dir;
  text::write_file(dir / "a", a);
  text::write_file(dir / "b", b);
  auto r = testutil::run_command("diff -U" + std::to_string(context) + " " + (dir / "a") + " " +
                                 (dir / "b"));
  auto pos = r.output.find("\n@@");
  return pos == std::string::npos ? std::string() : r.output.substr(pos + 1);
}

std::string random_text(std::mt19937& rng) {
  std::uniform_int_distribution<int> len(0, 30);
  std::uniform_int_distribution<int> word(0, 5);
  std::bernoulli_distribution final_newline(0.8);
  int n = len(rng);
  std::string s;
  for (int i = 0; i < n; ++i) {
    s += "w" + std::to_string(word(rng));
    if (i + 1 < n || final_newline(rng)) s += '\n';
  }
  return s;
}

std::string mutate(const std::string& a, std::mt19937& rng) {
  auto lines = text::split_lines(a);
  std::uniform_int_distribution<int> ops(0, 4);
  int k = ops(rng);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> at(0, lines.size() - 1);
    auto p = at(rng);
    switch (ops(rng) % 3) {
      case 0: lines.insert(lines.begin() + static_cast<long>(p), "new" + std::to_string(i)); break;
      case 1: if (lines.size() > 1) lines.erase(lines.begin() + static_cast<long>(p)); break;
      default: lines[p] = "changed" + std::to_string(i); break;
    }
  }
  return text::join_lines(lines);
}

}  // namespace

TEST_CASE("identical texts give an empty diff") {
  auto a = numbered(10);
  CHECK(make_unified_diff(a, a).empty());
  CHECK(make_unified_diff("", "").empty());
  CHECK(make_unified_diff(a, a).to_string().empty());
}

TEST_CASE("one changed line matches the reference diff tool") {
  auto a = numbered(20);
  for (int k : {1, 2, 10, 19, 20}) {
    auto b = numbered(20, k, "CHANGED");
    for (int c : {0, 1, 3}) {
      auto d = make_unified_diff(a, b, c);
      REQUIRE(d.hunks.size() == 1);
      CHECK(static_cast<int>(d.hunks[0].lines.size()) ==
            1 + 1 + std::min(c, k - 1) + std::min(c, 20 - k));
      CHECK_MESSAGE(d.to_string() == gnu_diff(a, b, c), "k=" << k << " c=" << c);
    }
  }
}

TEST_CASE("disjoint changes ten lines apart give two hunks") {
  auto a = numbered(30);
  auto lines = text::split_lines(a);
  lines[4] = "first change";
  lines[15] = "second change";
  auto b = text::join_lines(lines);
  auto d = make_unified_diff(a, b, 3);
  CHECK(d.hunks.size() == 2);
  CHECK(d.to_string() == gnu_diff(a, b, 3));
  // With wider context they merge.
  CHECK(make_unified_diff(a, b, 5).hunks.size() == 1);
  CHECK(make_unified_diff(a, b, 5).to_string() == gnu_diff(a, b, 5));
}

TEST_CASE("randomized pairs agree with the reference tool on hunk layout") {
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    auto a = random_text(rng);
    auto b = mutate(a, rng);
    for (int c : {1, 3}) {
      auto d = make_unified_diff(a, b, c);
      CHECK(apply_diff(d, a, 0) == b);
      // Minimal diffs are not unique, so compare behaviour rather than text.
      auto reference = gnu_diff(a, b, c);
      CHECK(d.empty() == reference.empty());
      if (!reference.empty()) CHECK(apply_diff(UnifiedDiff::parse(reference), a, 0) == b);
    }
  }
}

TEST_CASE("round trip on 1000 random pairs") {
  std::mt19937 rng(12345);
  for (int i = 0; i < 1000; ++i) {
    auto a = random_text(rng);
    auto b = i % 5 == 0 ? random_text(rng) : mutate(a, rng);
    for (int c : {1, 3}) {
      auto d = make_unified_diff(a, b, c);
      REQUIRE(apply_diff(d, a, 0) == b);
      if (!d.empty()) REQUIRE(apply_diff(UnifiedDiff::parse(d.to_string()), a, 0) == b);
    }
  }
}

TEST_CASE("missing trailing newline is preserved") {
  std::string a = "x\ny\nz";
  std::string b = "x\ny\nz\n";
  auto d = make_unified_diff(a, b, 3);
  CHECK(d.to_string() == gnu_diff(a, b, 3));
  CHECK(d.to_string().find("\\ No newline at end of file") != std::string::npos);
  CHECK(apply_diff(UnifiedDiff::parse(d.to_string()), a) == b);
  CHECK(apply_diff(make_unified_diff(b, "x\nq"), b) == "x\nq");
}

TEST_CASE("empty sides use the line-before convention") {
  auto d = make_unified_diff("", "a\nb\n");
  CHECK(d.to_string() == "@@ -0,0 +1,2 @@\n+a\n+b\n");
  auto e = make_unified_diff("a\nb\nc\n", "a\nc\n", 0);
  CHECK(e.to_string() == gnu_diff("a\nb\nc\n", "a\nc\n", 0));
  auto f = make_unified_diff("a\nc\n", "a\nb\nc\n", 0);
  CHECK(f.to_string() == gnu_diff("a\nc\n", "a\nb\nc\n", 0));
  CHECK(apply_diff(f, "a\nc\n") == "a\nb\nc\n");
}

TEST_CASE("fuzz: hunks apply to a text shifted by up to two lines") {
  auto a = numbered(40);
  auto b = numbered(40, 20, "fixed");
  auto d = make_unified_diff(a, b, 3);
  for (int shift : {-2, -1, 1, 2}) {
    auto lines = text::split_lines(a);
    if (shift > 0)
      for (int i = 0; i < shift; ++i) lines.insert(lines.begin(), "header " + std::to_string(i));
    else
      lines.erase(lines.begin(), lines.begin() - shift);
    auto shifted = text::join_lines(lines);
    auto expected_lines = text::split_lines(shifted);
    for (auto& l : expected_lines)
      if (l == "line 20") l = "fixed";
    CHECK(apply_diff(d, shifted, 3) == text::join_lines(expected_lines));
    CHECK_THROWS_AS(apply_diff(d, shifted, 0), HunkApplyFailure);
  }
}

TEST_CASE("fuzz: ambiguous context fails") {
  std::string a;
  for (int i = 0; i < 3; ++i) a += "x\ny\nz\n";
  // Stated position is off by one between two identical windows.
  UnifiedDiff d;
  Hunk h;
  h.old_start = 5;
  h.old_len = 3;
  h.new_start = 5;
  h.new_len = 3;
  h.lines = {{LineTag::context, "x"}, {LineTag::removed, "y"}, {LineTag::added, "Y"},
             {LineTag::context, "z"}};
  d.hunks.push_back(h);
  try {
    apply_diff(d, a, 3);
    FAIL("expected HunkApplyFailure");
  } catch (const HunkApplyFailure& e) {
    CHECK(e.hunk_index() == 0);
  }
  // Headerless hunk matching three sites.
  auto headerless = UnifiedDiff::parse(" x\n-y\n+Y\n z\n");
  CHECK_FALSE(headerless.hunks[0].positioned);
  CHECK_THROWS_AS(apply_diff(headerless, a), HunkApplyFailure);
}

TEST_CASE("application is all or nothing") {
  auto a = numbered(30);
  auto lines = text::split_lines(a);
  lines[2] = "A";
  lines[25] = "B";
  auto d = make_unified_diff(a, text::join_lines(lines), 1);
  REQUIRE(d.hunks.size() == 2);
  auto target = numbered(30, 26, "different");
  try {
    apply_diff(d, target);
    FAIL("expected HunkApplyFailure");
  } catch (const HunkApplyFailure& e) {
    CHECK(e.hunk_index() == 1);
  }
}

TEST_CASE("lenient parsing") {
  auto a = numbered(10);
  auto b = numbered(10, 5, "five");
  SUBCASE("wrong header counts are recomputed") {
    auto d = UnifiedDiff::parse("@@ -4,9 +4,2 @@\n line 4\n-line 5\n+five\n line 6\n");
    CHECK(d.hunks[0].old_len == 3);
    CHECK(d.hunks[0].new_len == 3);
    CHECK(apply_diff(d, a) == b);
  }
  SUBCASE("file headers are optional and ignored") {
    auto d = UnifiedDiff::parse("--- a/F.java\n+++ b/F.java\n@@ -4,3 +4,3 @@\n line 4\n-line 5\n+five\n line 6\n");
    CHECK(apply_diff(d, a) == b);
  }
  SUBCASE("headerless hunk is located by search") {
    auto d = UnifiedDiff::parse(" line 4\n-line 5\n+five\n line 6");
    CHECK(apply_diff(d, a) == b);
  }
  SUBCASE("wrong line numbers are repaired by search within fuzz") {
    auto d = UnifiedDiff::parse("@@ -6,3 +6,3 @@\n line 4\n-line 5\n+five\n line 6\n");
    CHECK(apply_diff(d, a) == b);
  }
  SUBCASE("garbage is rejected") {
    CHECK_THROWS_AS(UnifiedDiff::parse("public int f() { return 1; }"), MalformedDiff);
    CHECK_THROWS_AS(UnifiedDiff::parse("hello\nworld\n"), MalformedDiff);
    CHECK_THROWS_AS(UnifiedDiff::parse(" only\n context\n"), MalformedDiff);
    CHECK_THROWS_AS(UnifiedDiff::parse("@@ -1,1 +1,1 @@\n"), MalformedDiff);
  }
}

TEST_CASE("parse_patch_set splits files") {
  std::string patch =
      "diff -ru before/A.java after/A.java\n"
      "--- a/src/A.java\t2020-01-01\n"
      "+++ b/src/A.java\t2020-01-02\n"
      "@@ -1 +1 @@\n"
      "-x\n"
      "+y\n"
      "--- a/src/B.java\n"
      "+++ b/src/B.java\n"
      "@@ -2,2 +2,3 @@\n"
      " p\n"
      "+q\n"
      " r\n";
  auto set = parse_patch_set(patch);
  REQUIRE(set.size() == 2);
  CHECK(set[0].old_path == "src/A.java");
  CHECK(set[0].new_path == "src/A.java");
  CHECK(apply_diff(set[0].diff, "x\n") == "y\n");
  CHECK(set[1].new_path == "src/B.java");
  CHECK(apply_diff(set[1].diff, "o\np\nr\n") == "o\np\nq\nr\n");
  CHECK(parse_patch_set("").empty());
}
