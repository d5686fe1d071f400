#include "java_frontend.hpp"

#include <tree_sitter/api.h>

#include <algorithm>
#include <memory>

#include "aprkit/text.hpp"

extern "C" const TSLanguage* tree_sitter_java(void);

namespace aprkit::syntax {
namespace {

struct ParserDeleter {
  void operator()(TSParser* p) const { ts_parser_delete(p); }
};
struct TreeDeleter {
  void operator()(TSTree* t) const { ts_tree_delete(t); }
};
using ParserPtr = std::unique_ptr<TSParser, ParserDeleter>;
using TreePtr = std::unique_ptr<TSTree, TreeDeleter>;

constexpr std::string_view kWrapPrefix = "class __aprkit_wrapper__ {\n";
constexpr std::string_view kWrapSuffix = "\n}\n";

TreePtr run_parser(std::string_view source) {
  ParserPtr parser(ts_parser_new());
  ts_parser_set_language(parser.get(), tree_sitter_java());
  TreePtr tree(ts_parser_parse_string(parser.get(), nullptr, source.data(),
                                      static_cast<std::uint32_t>(source.size())));
  if (!tree) throw ParseError({1, 1}, "parser produced no tree");
  return tree;
}

// Shifts positions of a wrapped parse back into the caller's coordinates.
struct Offset {
  std::uint32_t bytes = 0;
  std::uint32_t rows = 0;
};

SourceSpan to_span(TSNode n, Offset off) {
  SourceSpan s;
  s.start_byte = ts_node_start_byte(n) - off.bytes;
  s.end_byte = ts_node_end_byte(n) - off.bytes;
  auto sp = ts_node_start_point(n);
  auto ep = ts_node_end_point(n);
  s.start = {sp.row - off.rows + 1, sp.column + 1};
  s.end = {ep.row - off.rows + 1, ep.column + 1};
  return s;
}

void add_gap_token(Node& parent, std::string_view source, std::uint32_t from,
                   std::uint32_t to, Offset off) {
  if (to <= from) return;
  auto gap = text::trim(source.substr(from, to - from));
  if (gap.empty()) return;
  Node leaf;
  leaf.kind = "token";
  leaf.label = std::string(gap);
  leaf.named = false;
  leaf.span.start_byte = from - off.bytes;
  leaf.span.end_byte = to - off.bytes;
  parent.children.push_back(std::move(leaf));
}

Node convert(TSNode n, std::string_view source, Offset off, const char* field) {
  Node out;
  out.kind = ts_node_type(n);
  out.named = ts_node_is_named(n);
  out.field = field ? field : "";
  out.span = to_span(n, off);
  std::uint32_t count = ts_node_child_count(n);
  std::uint32_t start = ts_node_start_byte(n);
  std::uint32_t end = ts_node_end_byte(n);
  if (count == 0) {
    out.label = std::string(source.substr(start, end - start));
    return out;
  }
  std::uint32_t cursor = start;
  for (std::uint32_t i = 0; i < count; ++i) {
    TSNode child = ts_node_child(n, i);
    add_gap_token(out, source, cursor, ts_node_start_byte(child), off);
    out.children.push_back(
        convert(child, source, off, ts_node_field_name_for_child(n, i)));
    cursor = std::max(cursor, ts_node_end_byte(child));
  }
  add_gap_token(out, source, cursor, end, off);
  return out;
}

bool find_error(TSNode n, TSNode& found) {
  if (ts_node_is_error(n) || ts_node_is_missing(n)) {
    found = n;
    return true;
  }
  if (!ts_node_has_error(n)) return false;
  std::uint32_t count = ts_node_child_count(n);
  for (std::uint32_t i = 0; i < count; ++i)
    if (find_error(ts_node_child(n, i), found)) return true;
  return false;
}

SourcePoint end_of_input(std::string_view source) {
  SourcePoint p;
  for (char c : source) {
    if (c == '\n') {
      ++p.line;
      p.column = 1;
    } else {
      ++p.column;
    }
  }
  return p;
}

ParseError describe_error(TSNode root, std::string_view source) {
  TSNode bad = root;
  find_error(root, bad);
  auto trimmed_end = static_cast<std::uint32_t>(text::rtrim(source).size());
  if (ts_node_is_missing(bad)) {
    auto p = ts_node_start_point(bad);
    return ParseError({p.row + 1, p.column + 1},
                      std::string("missing '") + ts_node_type(bad) + "'");
  }
  if (ts_node_end_byte(bad) >= trimmed_end)
    return ParseError(end_of_input(text::rtrim(source)),
                      "unexpected end of input");
  auto p = ts_node_start_point(bad);
  auto len = ts_node_end_byte(bad) - ts_node_start_byte(bad);
  auto snippet = source.substr(ts_node_start_byte(bad), std::min<std::uint32_t>(len, 40));
  return ParseError({p.row + 1, p.column + 1},
                    "unexpected '" + text::collapse_whitespace(snippet) + "'");
}

bool is_function_kind(std::string_view kind) {
  return kind == "method_declaration" || kind == "constructor_declaration" ||
         kind == "compact_constructor_declaration";
}

const Node* child_by_field(const Node& n, std::string_view field) {
  for (const auto& c : n.children)
    if (c.field == field) return &c;
  return nullptr;
}

void collect_functions(const Node& n, std::string_view source,
                       std::vector<FunctionSpan>& out) {
  if (is_function_kind(n.kind)) {
    FunctionSpan fs;
    if (const Node* name = child_by_field(n, "name"))
      fs.name = std::string(source.substr(name->span.start_byte,
                                          name->span.end_byte - name->span.start_byte));
    if (const Node* params = child_by_field(n, "parameters"))
      fs.signature = text::collapse_whitespace(source.substr(
          params->span.start_byte, params->span.end_byte - params->span.start_byte));
    fs.start_line = static_cast<int>(n.span.start.line);
    fs.end_line = static_cast<int>(n.span.end.line);
    out.push_back(std::move(fs));
    return;
  }
  for (const auto& c : n.children) collect_functions(c, source, out);
}

}  // namespace

std::string_view JavaFrontend::language() const { return "java"; }

SyntaxTree JavaFrontend::parse(std::string_view source) const {
  auto tree = run_parser(source);
  TSNode root = ts_tree_root_node(tree.get());
  if (!ts_node_has_error(root)) return {"java", convert(root, source, {}, nullptr)};

  // Class members such as constructors only parse inside a class body.
  std::string wrapped;
  wrapped.reserve(kWrapPrefix.size() + source.size() + kWrapSuffix.size());
  wrapped.append(kWrapPrefix).append(source).append(kWrapSuffix);
  auto wrapped_tree = run_parser(wrapped);
  TSNode wroot = ts_tree_root_node(wrapped_tree.get());
  if (!ts_node_has_error(wroot)) {
    TSNode cls = ts_node_named_child(wroot, 0);
    TSNode body = ts_node_child_by_field_name(cls, "body", 4);
    Offset off{static_cast<std::uint32_t>(kWrapPrefix.size()), 1};
    Node members;
    members.kind = "members";
    members.span.start_byte = 0;
    members.span.end_byte = static_cast<std::uint32_t>(source.size());
    members.span.end = end_of_input(source);
    std::uint32_t count = ts_node_named_child_count(body);
    for (std::uint32_t i = 0; i < count; ++i)
      members.children.push_back(convert(ts_node_named_child(body, i), wrapped, off, nullptr));
    if (members.children.size() == 1) {
      Node only = std::move(members.children.front());
      return {"java", std::move(only)};
    }
    return {"java", std::move(members)};
  }
  throw describe_error(root, source);
}

std::vector<FunctionSpan> JavaFrontend::functions(const SyntaxTree& tree,
                                                  std::string_view source) const {
  std::vector<FunctionSpan> out;
  collect_functions(tree.root, source, out);
  return out;
}

bool JavaFrontend::is_comment(std::string_view kind) const {
  return kind == "line_comment" || kind == "block_comment" || kind == "comment";
}

bool JavaFrontend::is_atomic(std::string_view kind) const {
  return kind == "string_literal" || kind == "character_literal" ||
         kind == "text_block";
}

}  // namespace aprkit::syntax
