#include "aprkit/repr.hpp"

#include <algorithm>
#include <cctype>

#include "aprkit/diff.hpp"
#include "aprkit/text.hpp"

namespace aprkit::repr {
namespace {

using text::join_lines;
using text::split_lines;

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> lines_of(const SourceFunction& fn) { return split_lines(fn.text); }

std::string commented(std::string_view line, std::string_view prefix) {
  auto ws = text::leading_whitespace(line);
  auto rest = line.substr(ws.size());
  std::string out(ws);
  if (rest.empty()) {
    out += text::rtrim(prefix);
  } else {
    out += prefix;
    out += rest;
  }
  return out;
}

bool starts_with_space(std::string_view s) {
  return !s.empty() && std::isspace(static_cast<unsigned char>(s.front()));
}

}  // namespace

std::string_view to_string(InputKind k) {
  switch (k) {
    case InputKind::IR1: return "IR1";
    case InputKind::IR2: return "IR2";
    case InputKind::IR3: return "IR3";
    case InputKind::IR4: return "IR4";
  }
  return "?";
}

std::string_view to_string(OutputKind k) {
  switch (k) {
    case OutputKind::OR1: return "OR1";
    case OutputKind::OR2: return "OR2";
    case OutputKind::OR3: return "OR3";
    case OutputKind::OR4: return "OR4";
  }
  return "?";
}

std::optional<InputKind> parse_input_kind(std::string_view s) {
  auto u = upper(s);
  for (auto k : {InputKind::IR1, InputKind::IR2, InputKind::IR3, InputKind::IR4})
    if (u == to_string(k)) return k;
  return std::nullopt;
}

std::optional<OutputKind> parse_output_kind(std::string_view s) {
  auto u = upper(s);
  for (auto k : {OutputKind::OR1, OutputKind::OR2, OutputKind::OR3, OutputKind::OR4})
    if (u == to_string(k)) return k;
  return std::nullopt;
}

std::string ReprPair::to_string() const {
  return std::string(repr::to_string(input)) + "x" + std::string(repr::to_string(output));
}

std::optional<ReprPair> ReprPair::parse(std::string_view s) {
  auto u = upper(s);
  if (u.size() != 7 || (u[3] != 'X' && u[3] != '-')) return std::nullopt;
  auto in = parse_input_kind(std::string_view(u).substr(0, 3));
  auto out = parse_output_kind(std::string_view(u).substr(4));
  if (!in || !out) return std::nullopt;
  return ReprPair{*in, *out};
}

bool valid_pair(ReprPair pair) {
  if (pair.input == InputKind::IR1) return pair.output != OutputKind::OR2;
  return pair.output == OutputKind::OR2;
}

const std::vector<ReprPair>& all_valid_pairs() {
  static const std::vector<ReprPair> pairs = {
      {InputKind::IR1, OutputKind::OR1}, {InputKind::IR1, OutputKind::OR3},
      {InputKind::IR1, OutputKind::OR4}, {InputKind::IR2, OutputKind::OR2},
      {InputKind::IR3, OutputKind::OR2}, {InputKind::IR4, OutputKind::OR2},
  };
  return pairs;
}

void validate_region(const Region& r, int n) {
  if (r.start_line < 1 || r.start_line > n + 1 || r.end_line < r.start_line - 1 ||
      r.end_line > n)
    throw InvalidRegion("region [" + std::to_string(r.start_line) + "," +
                        std::to_string(r.end_line) + "] is invalid for a " +
                        std::to_string(n) + "-line function");
}

std::string anchor_indent(const SourceFunction& fn, const Region& region) {
  auto lines = lines_of(fn);
  const int n = static_cast<int>(lines.size());
  validate_region(region, n);
  for (int i = region.start_line; i <= region.end_line; ++i)
    if (!text::is_blank(lines[i - 1])) return std::string(text::leading_whitespace(lines[i - 1]));
  for (int i = region.end_line + 1; i <= n; ++i)
    if (!text::is_blank(lines[i - 1])) return std::string(text::leading_whitespace(lines[i - 1]));
  for (int i = region.start_line - 1; i >= 1; --i)
    if (!text::is_blank(lines[i - 1])) return std::string(text::leading_whitespace(lines[i - 1]));
  return {};
}

std::string build_input(const SourceFunction& fn, const Region& region, InputKind kind,
                        const Markers& markers) {
  if (kind == InputKind::IR1) return fn.text;
  auto lines = lines_of(fn);
  validate_region(region, static_cast<int>(lines.size()));
  const auto indent = anchor_indent(fn, region);
  const auto before = static_cast<std::size_t>(region.start_line - 1);
  const auto after = static_cast<std::size_t>(region.end_line);

  std::vector<std::string> out(lines.begin(), lines.begin() + static_cast<long>(before));
  switch (kind) {
    case InputKind::IR2:
      out.push_back(indent + markers.start_comment);
      out.insert(out.end(), lines.begin() + static_cast<long>(before),
                 lines.begin() + static_cast<long>(after));
      out.push_back(indent + markers.end_comment);
      break;
    case InputKind::IR4:
      if (!region.empty()) {
        out.push_back(indent + markers.buggy_header);
        for (auto i = before; i < after; ++i)
          out.push_back(commented(lines[i], markers.comment_prefix));
      }
      out.push_back(indent + markers.fill_token);
      break;
    case InputKind::IR3:
      out.push_back(indent + markers.fill_token);
      break;
    case InputKind::IR1:
      break;
  }
  out.insert(out.end(), lines.begin() + static_cast<long>(after), lines.end());
  return join_lines(out);
}

std::vector<std::string> fixed_chunk(const SourceFunction& buggy,
                                     const SourceFunction& fixed, const Region& region) {
  auto b = lines_of(buggy);
  auto f = lines_of(fixed);
  validate_region(region, static_cast<int>(b.size()));
  const auto prefix = static_cast<std::size_t>(region.start_line - 1);
  const auto suffix = b.size() - static_cast<std::size_t>(region.end_line);
  if (prefix + suffix > f.size())
    throw RegionMismatch("fixed function is too short for the region");
  if (!std::equal(b.begin(), b.begin() + static_cast<long>(prefix), f.begin()))
    throw RegionMismatch("fixed function changes lines before the region");
  if (!std::equal(b.end() - static_cast<long>(suffix), b.end(),
                  f.end() - static_cast<long>(suffix)))
    throw RegionMismatch("fixed function changes lines after the region");
  return {f.begin() + static_cast<long>(prefix), f.end() - static_cast<long>(suffix)};
}

std::string build_output(const SourceFunction& buggy, const SourceFunction& fixed,
                         const Region& region, OutputKind kind) {
  switch (kind) {
    case OutputKind::OR1:
      return fixed.text;
    case OutputKind::OR2: {
      auto chunk = fixed_chunk(buggy, fixed, region);
      // The fill token sits after the anchor indentation, so the first chunk
      // line is emitted without it.
      auto indent = anchor_indent(buggy, region);
      if (!chunk.empty() && !indent.empty() && chunk[0].starts_with(indent) &&
          chunk[0].size() > indent.size() && !starts_with_space(chunk[0].substr(indent.size())))
        chunk[0].erase(0, indent.size());
      return join_lines(chunk);
    }
    case OutputKind::OR3:
    case OutputKind::OR4: {
      int context = kind == OutputKind::OR3 ? 3 : 1;
      return diff::make_unified_diff(buggy.text + "\n", fixed.text + "\n", context).to_string();
    }
  }
  return {};
}

std::string clean_model_output(std::string_view raw,
                               const std::vector<std::string>& stop_tokens) {
  std::size_t cut = raw.size();
  for (const auto& tok : stop_tokens) {
    if (tok.empty()) continue;
    auto pos = raw.find(tok);
    if (pos != std::string_view::npos) cut = std::min(cut, pos);
  }
  auto s = raw.substr(0, cut);
  // Drop whole leading blank lines but keep indentation of the first line.
  while (true) {
    auto nl = s.find('\n');
    if (nl == std::string_view::npos || !text::is_blank(s.substr(0, nl))) break;
    s.remove_prefix(nl + 1);
  }
  s = text::rtrim(s);
  if (text::is_blank(s)) return {};
  return std::string(s);
}

std::string reconstruct(const SourceFunction& fn, const Region& region, ReprPair pair,
                        std::string_view model_output, const Markers& markers,
                        const ReconstructOptions& options) {
  (void)markers;
  if (!valid_pair(pair)) throw InvalidPair(pair.to_string() + " is not a supported pair");
  auto cleaned = clean_model_output(model_output, options.stop_tokens);

  switch (pair.output) {
    case OutputKind::OR1:
      return cleaned;
    case OutputKind::OR2: {
      auto lines = lines_of(fn);
      validate_region(region, static_cast<int>(lines.size()));
      std::vector<std::string> chunk;
      if (!cleaned.empty()) chunk = split_lines(cleaned);
      auto indent = anchor_indent(fn, region);
      if (!chunk.empty() && !chunk[0].empty() && !starts_with_space(chunk[0]))
        chunk[0] = indent + chunk[0];
      std::vector<std::string> out(lines.begin(), lines.begin() + (region.start_line - 1));
      out.insert(out.end(), chunk.begin(), chunk.end());
      out.insert(out.end(), lines.begin() + region.end_line, lines.end());
      return join_lines(out);
    }
    case OutputKind::OR3:
    case OutputKind::OR4: {
      if (cleaned.empty()) return fn.text;
      diff::UnifiedDiff d;
      try {
        d = diff::UnifiedDiff::parse(cleaned);
      } catch (const diff::MalformedDiff& e) {
        throw MalformedOutput(e.what());
      }
      auto patched = diff::apply_diff(d, fn.text + "\n", options.fuzz);
      if (!patched.empty() && patched.back() == '\n') patched.pop_back();
      return patched;
    }
  }
  return {};
}

std::vector<Region> enumerate_regions(const SourceFunction& fn) {
  const int n = static_cast<int>(lines_of(fn).size());
  std::vector<Region> out;
  out.reserve(static_cast<std::size_t>(n * (n + 1) / 2));
  for (int s = 1; s <= n; ++s)
    for (int e = s; e <= n; ++e) out.push_back({s, e});
  return out;
}

Region derive_region(std::string_view buggy_text, std::string_view fixed_text) {
  if (buggy_text == fixed_text) throw Error("buggy and fixed functions are identical");
  auto b = split_lines(buggy_text);
  auto f = split_lines(fixed_text);
  const std::size_t limit = std::min(b.size(), f.size());
  std::size_t prefix = 0;
  while (prefix < limit && b[prefix] == f[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < limit - prefix && b[b.size() - 1 - suffix] == f[f.size() - 1 - suffix])
    ++suffix;
  return {static_cast<int>(prefix) + 1, static_cast<int>(b.size() - suffix)};
}

}  // namespace aprkit::repr
