#pragma once

// Source-language frontend: parsing, function extraction and
// formatting-insensitive tree comparison.
//
// Only Java is registered today. Everything language specific lives behind
// syntax::Frontend so another grammar can be plugged in without touching the
// callers.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/error.hpp"

namespace aprkit::syntax {

struct SourcePoint {
  std::uint32_t line = 1;    // 1-based
  std::uint32_t column = 1;  // 1-based, in bytes
};

struct SourceSpan {
  std::uint32_t start_byte = 0;
  std::uint32_t end_byte = 0;
  SourcePoint start;
  SourcePoint end;
};

class ParseError : public Error {
 public:
  ParseError(SourcePoint where, std::string message);
  SourcePoint where() const { return where_; }
  const std::string& detail() const { return detail_; }

 private:
  SourcePoint where_;
  std::string detail_;
};

class UnsupportedLanguage : public Error {
 public:
  explicit UnsupportedLanguage(std::string_view language);
};

struct Node {
  std::string kind;
  /// Token text; set on leaves only.
  std::optional<std::string> label;
  /// Grammar field name under the parent ("name", "body", ...), if any.
  std::string field;
  SourceSpan span;
  bool named = true;
  std::vector<Node> children;
};

struct SyntaxTree {
  std::string language;
  Node root;
};

/// Comment-free, whitespace-free tree. Equality looks at kind, label and
/// child order only.
struct NormalizedNode {
  std::string kind;
  std::string label;
  std::vector<NormalizedNode> children;

  bool operator==(const NormalizedNode&) const = default;
};

struct NormalizedTree {
  NormalizedNode root;

  bool operator==(const NormalizedTree&) const = default;

  /// Single-line S-expression, handy for diagnostics and golden files.
  std::string to_sexpr() const;
};

struct SourceFile {
  std::string path;
  std::string content;
  std::string language = "java";
};

/// One method or constructor. `text` is origin lines start_line..end_line
/// joined with '\n' (no terminator after the last line).
struct SourceFunction {
  std::string file;
  std::string name;
  int start_line = 1;
  int end_line = 1;
  std::string text;

  int line_count() const { return end_line - start_line + 1; }
};

/// Builds a SourceFunction from a bare function text (no origin file).
SourceFunction function_from_text(std::string text, std::string name = {});

struct FunctionSpan {
  std::string name;
  /// Parameter list text with whitespace collapsed; distinguishes overloads.
  std::string signature;
  int start_line = 1;
  int end_line = 1;
};

class Frontend {
 public:
  virtual ~Frontend() = default;
  virtual std::string_view language() const = 0;
  virtual SyntaxTree parse(std::string_view source) const = 0;
  /// Top-level function declarations; bodies nested in another function
  /// (anonymous classes, local classes) are not reported separately.
  virtual std::vector<FunctionSpan> functions(const SyntaxTree& tree,
                                              std::string_view source) const = 0;
  virtual bool is_comment(std::string_view kind) const = 0;
  /// Kinds whose leaves must be re-emitted without separators (literals).
  virtual bool is_atomic(std::string_view kind) const = 0;
};

/// Throws UnsupportedLanguage for unknown tags.
const Frontend& frontend_for(std::string_view language);

SyntaxTree parse(std::string_view source, std::string_view language = "java");

std::vector<SourceFunction> extract_functions(const SourceFile& file);

NormalizedTree normalize(const SyntaxTree& tree);

/// Normalizing an already-normalized tree is the identity.
NormalizedTree normalize(const NormalizedTree& tree);

/// Leaf labels joined by single spaces. Parsing and normalizing the result
/// reproduces the input tree.
std::string to_source(const NormalizedTree& tree,
                      std::string_view language = "java");

bool ast_equal(std::string_view a, std::string_view b,
               std::string_view language = "java");

}  // namespace aprkit::syntax
