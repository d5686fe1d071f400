#include <cctype>
#include <regex>
#include <string>
#include <vector>

#include "aprkit/syntax.hpp"
#include "aprkit/text.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace aprkit;
using namespace aprkit::syntax;

namespace {

void collect_leaves(const Node& n, std::string& out) {
  if (n.children.empty()) {
    for (char c : n.label.value_or(""))
      if (!std::isspace(static_cast<unsigned char>(c))) out += c;
    return;
  }
  for (const auto& c : n.children) collect_leaves(c, out);
}

std::string non_whitespace(std::string_view s) {
  std::string out;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) out += c;
  return out;
}

void check_spans(const Node& n) {
  std::uint32_t cursor = n.span.start_byte;
  for (const auto& c : n.children) {
    CHECK(c.span.start_byte >= cursor);
    CHECK(c.span.end_byte <= n.span.end_byte);
    cursor = c.span.end_byte;
    check_spans(c);
  }
  if (n.children.empty()) CHECK(n.label.has_value());
}

int count_kind(const Node& n, std::string_view kind, int first_line, int last_line) {
  int count = 0;
  if (n.kind == kind && static_cast<int>(n.span.start.line) >= first_line &&
      static_cast<int>(n.span.start.line) <= last_line)
    ++count;
  for (const auto& c : n.children) count += count_kind(c, kind, first_line, last_line);
  return count;
}

// Independent of the parser: strips comments and string literals, then counts
// `if (` occurrences.
int count_if_by_scanning(const std::vector<std::string>& lines) {
  static const std::regex if_re(R"(\bif\s*\()");
  static const std::regex string_re(R"("([^"\\]|\\.)*")");
  int count = 0;
  for (auto line : lines) {
    if (auto pos = line.find("//"); pos != std::string::npos) line.erase(pos);
    line = std::regex_replace(line, string_re, "\"\"");
    count += static_cast<int>(std::distance(
        std::sregex_iterator(line.begin(), line.end(), if_re), std::sregex_iterator()));
  }
  return count;
}

}  // namespace

TEST_CASE("parse a minimal method") {
  auto tree = parse("int f(){return 1;}");
  CHECK(tree.root.kind == "program");
  REQUIRE(tree.root.children.size() == 1);
  CHECK(tree.root.children[0].kind == "method_declaration");
  check_spans(tree.root);
}

TEST_CASE("truncated input reports end of input") {
  try {
    parse("int f(){return");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.where().line == 1);
    CHECK(e.where().column == 15);
    CHECK(e.detail() == "unexpected end of input");
  }
}

TEST_CASE("mid-input error is located at the offending token") {
  try {
    parse("int f() {\n  int x = ;\n  return x;\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.where().line == 2);
  }
}

TEST_CASE("unsupported language") {
  CHECK_THROWS_AS(parse("x = 1", "cobol"), UnsupportedLanguage);
  CHECK_THROWS_AS(frontend_for("python"), UnsupportedLanguage);
}

TEST_CASE("constructors parse through the class-member fallback") {
  auto tree = parse("public Point(int x) {\n  this.x = x;\n}");
  CHECK(tree.root.kind == "constructor_declaration");
  CHECK(tree.root.span.start.line == 1);
  CHECK(tree.root.span.end.line == 3);
}

TEST_CASE("leaves cover every non-whitespace source character") {
  for (const char* name : {"TwoMethods.java", "AnonymousClass.java", "Mixed.java",
                           "XYSeries.java"}) {
    auto src = testutil::read_fixture(std::string("java/") + name);
    auto tree = parse(src);
    std::string leaves;
    collect_leaves(tree.root, leaves);
    CHECK_MESSAGE(leaves == non_whitespace(src), name);
    check_spans(tree.root);
  }
}

TEST_CASE("multi-location region contains two if statements") {
  SourceFile file{"XYSeries.java", testutil::read_fixture("java/XYSeries.java")};
  auto fns = extract_functions(file);
  REQUIRE(fns.size() == 1);
  const auto& fn = fns[0];
  CHECK(fn.name == "addOrUpdate");
  // Function-relative lines 2..9 span the null check and the duplicate check.
  auto lines = text::split_lines(fn.text);
  std::vector<std::string> region(lines.begin() + 1, lines.begin() + 9);
  int oracle = count_if_by_scanning(region);
  CHECK(oracle == 2);
  auto tree = parse(fn.text);
  CHECK(count_kind(tree.root, "if_statement", 2, 9) == oracle);
}

TEST_CASE("extract_functions") {
  SUBCASE("two top-level methods with disjoint ranges") {
    SourceFile file{"TwoMethods.java", testutil::read_fixture("java/TwoMethods.java")};
    auto fns = extract_functions(file);
    REQUIRE(fns.size() == 2);
    CHECK(fns[0].name == "first");
    CHECK(fns[0].start_line == 6);
    CHECK(fns[0].end_line == 8);
    CHECK(fns[1].name == "second");
    // Annotations belong to the declaration, the javadoc does not.
    CHECK(fns[1].start_line == 11);
    CHECK(fns[1].end_line == 15);
    CHECK(fns[0].end_line < fns[1].start_line);
  }
  SUBCASE("anonymous class bodies belong to the enclosing method") {
    SourceFile file{"AnonymousClass.java",
                    testutil::read_fixture("java/AnonymousClass.java")};
    auto fns = extract_functions(file);
    REQUIRE(fns.size() == 1);
    CHECK(fns[0].name == "byLength");
    CHECK(fns[0].start_line == 6);
    CHECK(fns[0].end_line == 13);
  }
  SUBCASE("constructors, overloads and member-class methods") {
    SourceFile file{"Mixed.java", testutil::read_fixture("java/Mixed.java")};
    auto fns = extract_functions(file);
    REQUIRE(fns.size() == 4);
    CHECK(fns[0].name == "Mixed");
    CHECK(fns[1].name == "size");
    CHECK(fns[1].start_line == fns[1].end_line);
    CHECK(fns[2].name == "run");
    CHECK(fns[3].name == "size");
  }
  SUBCASE("empty file") {
    SourceFile file{"Empty.java", ""};
    CHECK(extract_functions(file).empty());
  }
  SUBCASE("unparsable file propagates ParseError") {
    SourceFile file{"Broken.java", "class A { void f() { int x = ; } "};
    CHECK_THROWS_AS(extract_functions(file), ParseError);
  }
}

TEST_CASE("extracted line ranges round-trip byte-for-byte") {
  for (const char* name : {"TwoMethods.java", "AnonymousClass.java", "Mixed.java",
                           "XYSeries.java"}) {
    SourceFile file{name, testutil::read_fixture(std::string("java/") + name)};
    auto lines = text::split_lines(file.content);
    for (const auto& fn : extract_functions(file)) {
      REQUIRE(fn.start_line >= 1);
      REQUIRE(fn.start_line <= fn.end_line);
      auto slice = text::join_lines(lines, static_cast<std::size_t>(fn.start_line - 1),
                                    static_cast<std::size_t>(fn.end_line));
      CHECK(slice == fn.text);
    }
  }
}

TEST_CASE("normalize ignores formatting and comments") {
  auto a = normalize(parse("int f(){return 1;}"));
  auto b = normalize(parse("int f() {\n  return 1; // ok\n}"));
  CHECK(a == b);
  auto c = normalize(parse("/* header */ int f()\n{\n\treturn /* one */ 1;\n}\n"));
  CHECK(a == c);
}

TEST_CASE("normalize keeps operand order") {
  CHECK_FALSE(normalize(parse("return a+b;")) == normalize(parse("return b+a;")));
}

TEST_CASE("block elision is a structural difference") {
  CHECK_FALSE(normalize(parse("if(x){y();}")) == normalize(parse("if (x) y();")));
}

TEST_CASE("normalized trees contain no comments") {
  auto t = normalize(parse("int f() { // a\n /* b */ return 1; }"));
  CHECK(t.to_sexpr().find("comment") == std::string::npos);
}

TEST_CASE("normalize is idempotent through source reconstruction") {
  std::vector<std::string> sources = {
      testutil::read_fixture("java/XYSeries.java"),
      testutil::read_fixture("java/Mixed.java"),
      testutil::read_fixture("java/AnonymousClass.java"),
      "int f(int[] a) { return a[0] >> 2 >>> 1; }",
      "String g() { return \"a  b\\n\" + 'c' + x--; }",
      "java.util.List<java.util.List<String>> h() { return null; }",
  };
  for (const auto& src : sources) {
    auto once = normalize(parse(src));
    CHECK(normalize(once) == once);
    auto again = normalize(parse(to_source(once)));
    CHECK_MESSAGE(again == once, to_source(once));
  }
}

TEST_CASE("ast_equal") {
  const std::string f = "int add(int a, int b) {\n  return a + b;\n}";
  CHECK(ast_equal(f, f));
  CHECK(ast_equal(f, "int add(int a, int b) {\n  // sum\n  return a + b;\n}"));
  CHECK_FALSE(ast_equal(f, "int add(int a, int c) {\n  return a + c;\n}"));
  CHECK_THROWS_AS(ast_equal(f, "int add(int a"), ParseError);
  CHECK_THROWS_AS(ast_equal("int add(", "int add("), ParseError);
}

TEST_CASE("ast_equal is symmetric") {
  std::vector<std::string> corpus = {
      "int f(){return 1;}",
      "int f() {\n  return 1;\n}",
      "int f(){return 2;}",
      "int f(){ /* c */ return 1;}",
      "int g(){return 1;}",
      "int f(){return (1);}",
  };
  for (const auto& a : corpus)
    for (const auto& b : corpus) CHECK(ast_equal(a, b) == ast_equal(b, a));
}
