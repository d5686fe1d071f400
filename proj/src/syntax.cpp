#include "aprkit/syntax.hpp"

#include "aprkit/text.hpp"
#include "java_frontend.hpp"

namespace aprkit::syntax {

ParseError::ParseError(SourcePoint where, std::string message)
    : Error("parse error at " + std::to_string(where.line) + ":" +
            std::to_string(where.column) + ": " + message),
      where_(where),
      detail_(std::move(message)) {}

UnsupportedLanguage::UnsupportedLanguage(std::string_view language)
    : Error("unsupported language '" + std::string(language) + "'") {}

const Frontend& frontend_for(std::string_view language) {
  static const JavaFrontend java;
  if (language == "java") return java;
  throw UnsupportedLanguage(language);
}

SyntaxTree parse(std::string_view source, std::string_view language) {
  return frontend_for(language).parse(source);
}

SourceFunction function_from_text(std::string text, std::string name) {
  SourceFunction fn;
  fn.name = std::move(name);
  fn.start_line = 1;
  fn.end_line = static_cast<int>(text::split_lines(text).size());
  fn.text = std::move(text);
  return fn;
}

std::vector<SourceFunction> extract_functions(const SourceFile& file) {
  const auto& fe = frontend_for(file.language);
  auto tree = fe.parse(file.content);
  auto lines = text::split_lines(file.content);
  std::vector<SourceFunction> out;
  for (const auto& span : fe.functions(tree, file.content)) {
    SourceFunction fn;
    fn.file = file.path;
    fn.name = span.name;
    fn.start_line = span.start_line;
    fn.end_line = span.end_line;
    fn.text = text::join_lines(lines, static_cast<std::size_t>(span.start_line - 1),
                               static_cast<std::size_t>(span.end_line));
    out.push_back(std::move(fn));
  }
  return out;
}

namespace {

NormalizedNode strip(const Node& n, const Frontend& fe) {
  NormalizedNode out;
  out.kind = n.kind;
  if (n.children.empty()) {
    out.label = n.label.value_or("");
    return out;
  }
  for (const auto& c : n.children) {
    if (fe.is_comment(c.kind)) continue;
    out.children.push_back(strip(c, fe));
  }
  return out;
}

void sexpr(const NormalizedNode& n, std::string& out) {
  out += '(';
  out += n.kind;
  if (n.children.empty() && !n.label.empty() && n.label != n.kind) {
    out += " \"";
    for (char c : n.label) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  for (const auto& c : n.children) {
    out += ' ';
    sexpr(c, out);
  }
  out += ')';
}

void leaves(const NormalizedNode& n, const Frontend& fe, std::string& out) {
  if (n.children.empty()) {
    if (n.label.empty()) return;
    if (!out.empty()) out += ' ';
    out += n.label;
    return;
  }
  if (fe.is_atomic(n.kind)) {
    std::string joined;
    for (const auto& c : n.children) {
      std::string part;
      leaves(c, fe, part);
      joined += part;
    }
    if (!out.empty()) out += ' ';
    out += joined;
    return;
  }
  for (const auto& c : n.children) leaves(c, fe, out);
}

}  // namespace

NormalizedTree normalize(const SyntaxTree& tree) {
  const auto& fe = frontend_for(tree.language);
  return {strip(tree.root, fe)};
}

NormalizedTree normalize(const NormalizedTree& tree) { return tree; }

std::string NormalizedTree::to_sexpr() const {
  std::string out;
  sexpr(root, out);
  return out;
}

std::string to_source(const NormalizedTree& tree, std::string_view language) {
  std::string out;
  leaves(tree.root, frontend_for(language), out);
  return out;
}

bool ast_equal(std::string_view a, std::string_view b, std::string_view language) {
  if (a == b) {
    // Still surface parse errors so callers see the same contract either way.
    parse(a, language);
    return true;
  }
  return normalize(parse(a, language)) == normalize(parse(b, language));
}

}  // namespace aprkit::syntax
