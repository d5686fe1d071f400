#include "aprkit/diff.hpp"

#include <algorithm>
#include <charconv>
#include <regex>

#include "aprkit/text.hpp"

namespace aprkit::diff {
namespace {

struct Line {
  std::string text;
  bool newline = true;

  bool operator==(const Line&) const = default;
};

std::vector<Line> to_lines(std::string_view s) {
  std::vector<Line> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    auto nl = s.find('\n', pos);
    if (nl == std::string_view::npos) {
      out.push_back({std::string(s.substr(pos)), false});
      break;
    }
    out.push_back({std::string(s.substr(pos, nl - pos)), true});
    pos = nl + 1;
  }
  return out;
}

std::string from_lines(const std::vector<Line>& lines) {
  std::string out;
  for (const auto& l : lines) {
    out += l.text;
    if (l.newline) out += '\n';
  }
  return out;
}

enum class Op { equal, remove, insert };

// Myers' O(ND) greedy algorithm on the region left after trimming the
// common prefix and suffix.
std::vector<Op> myers(const std::vector<Line>& a, const std::vector<Line>& b) {
  std::size_t prefix = 0;
  while (prefix < a.size() && prefix < b.size() && a[prefix] == b[prefix]) ++prefix;
  std::size_t suffix = 0;
  while (suffix < a.size() - prefix && suffix < b.size() - prefix &&
         a[a.size() - 1 - suffix] == b[b.size() - 1 - suffix])
    ++suffix;

  const int n = static_cast<int>(a.size() - prefix - suffix);
  const int m = static_cast<int>(b.size() - prefix - suffix);
  auto A = [&](int i) -> const Line& { return a[prefix + static_cast<std::size_t>(i)]; };
  auto B = [&](int i) -> const Line& { return b[prefix + static_cast<std::size_t>(i)]; };

  std::vector<Op> middle;
  if (n == 0 || m == 0) {
    middle.assign(static_cast<std::size_t>(n), Op::remove);
    middle.insert(middle.end(), static_cast<std::size_t>(m), Op::insert);
  } else {
    const int max = n + m;
    const int off = max + 1;
    std::vector<int> v(static_cast<std::size_t>(2 * max + 3), 0);
    std::vector<std::vector<int>> trace;
    bool done = false;
    for (int d = 0; d <= max && !done; ++d) {
      trace.push_back(v);
      for (int k = -d; k <= d; k += 2) {
        int x;
        if (k == -d || (k != d && v[off + k - 1] < v[off + k + 1]))
          x = v[off + k + 1];
        else
          x = v[off + k - 1] + 1;
        int y = x - k;
        while (x < n && y < m && A(x) == B(y)) {
          ++x;
          ++y;
        }
        v[off + k] = x;
        if (x >= n && y >= m) {
          done = true;
          break;
        }
      }
    }
    int x = n;
    int y = m;
    for (int d = static_cast<int>(trace.size()) - 1; d >= 0; --d) {
      const auto& tv = trace[static_cast<std::size_t>(d)];
      int k = x - y;
      int prev_k;
      if (k == -d || (k != d && tv[off + k - 1] < tv[off + k + 1]))
        prev_k = k + 1;
      else
        prev_k = k - 1;
      int prev_x = tv[off + prev_k];
      int prev_y = prev_x - prev_k;
      while (x > prev_x && y > prev_y) {
        middle.push_back(Op::equal);
        --x;
        --y;
      }
      if (d > 0) middle.push_back(x == prev_x ? Op::insert : Op::remove);
      x = prev_x;
      y = prev_y;
    }
    std::reverse(middle.begin(), middle.end());
  }

  std::vector<Op> ops(prefix, Op::equal);
  ops.insert(ops.end(), middle.begin(), middle.end());
  ops.insert(ops.end(), suffix, Op::equal);
  return ops;
}

int header_start(int zero_based_pos, int len) {
  return len == 0 ? zero_based_pos : zero_based_pos + 1;
}

void render_range(std::string& out, char sign, int start, int len) {
  out += sign;
  out += std::to_string(start);
  if (len != 1) {
    out += ',';
    out += std::to_string(len);
  }
}

// ---------------------------------------------------------------------------
// Parsing

bool is_body_line(std::string_view l) {
  return l.empty() || l[0] == ' ' || l[0] == '+' || l[0] == '-' || l[0] == '\\';
}

bool is_file_header(std::string_view l) {
  return l.starts_with("--- ") || l.starts_with("+++ ") || l.starts_with("diff ") ||
         l.starts_with("index ");
}

struct HeaderInfo {
  Hunk hunk;
  std::optional<int> want_old;
  std::optional<int> want_new;
};

std::optional<HeaderInfo> parse_header(std::string_view line) {
  if (!line.starts_with("@@")) return std::nullopt;
  static const std::regex re(R"(^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@)");
  std::match_results<std::string_view::const_iterator> m;
  HeaderInfo info;
  if (!std::regex_search(line.begin(), line.end(), m, re)) {
    info.hunk.positioned = false;
    return info;
  }
  auto num = [&](int idx, int fallback) {
    if (!m[idx].matched) return fallback;
    int v = 0;
    auto s = m[idx].str();
    std::from_chars(s.data(), s.data() + s.size(), v);
    return v;
  };
  info.hunk.old_start = num(1, 0);
  info.want_old = num(2, 1);
  info.hunk.new_start = num(3, 0);
  info.want_new = num(4, 1);
  return info;
}

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto nl = text.find('\n', pos);
      if (nl == std::string_view::npos) {
        lines_.push_back(text.substr(pos));
        break;
      }
      lines_.push_back(text.substr(pos, nl - pos));
      pos = nl + 1;
    }
  }

  bool at_end() const { return i_ >= lines_.size(); }
  std::string_view peek() const { return lines_[i_]; }
  void skip() { ++i_; }
  bool any_header() const {
    return std::any_of(lines_.begin(), lines_.end(),
                       [](std::string_view l) { return l.starts_with("@@"); });
  }

  // Reads hunk lines after a header (or from the current line for a
  // headerless hunk).
  Hunk read_body(HeaderInfo info) {
    Hunk h = std::move(info.hunk);
    int old_seen = 0;
    int new_seen = 0;
    auto satisfied = [&] {
      return info.want_old && info.want_new && old_seen >= *info.want_old &&
             new_seen >= *info.want_new;
    };
    while (!at_end()) {
      auto l = peek();
      if (l.starts_with("@@")) break;
      if (!is_body_line(l)) break;
      if (satisfied() && (is_file_header(l) || l.empty())) break;
      if (l.empty()) {
        h.lines.push_back({LineTag::context, "", false});
        ++old_seen;
        ++new_seen;
      } else if (l[0] == '\\') {
        if (!h.lines.empty()) h.lines.back().no_newline = true;
      } else {
        LineTag tag = l[0] == ' ' ? LineTag::context
                      : l[0] == '-' ? LineTag::removed
                                    : LineTag::added;
        h.lines.push_back({tag, std::string(l.substr(1)), false});
        if (tag != LineTag::added) ++old_seen;
        if (tag != LineTag::removed) ++new_seen;
      }
      skip();
    }
    h.old_len = old_seen;
    h.new_len = new_seen;
    return h;
  }

  // Consumes consecutive hunks starting at the current `@@` line.
  std::vector<Hunk> read_hunks() {
    std::vector<Hunk> hunks;
    while (!at_end()) {
      auto info = parse_header(peek());
      if (!info) break;
      skip();
      hunks.push_back(read_body(std::move(*info)));
    }
    return hunks;
  }

 private:
  std::vector<std::string_view> lines_;
  std::size_t i_ = 0;
};

std::string strip_path(std::string_view header_rest) {
  auto tab = header_rest.find('\t');
  auto path = std::string(text::trim(header_rest.substr(0, tab)));
  if (path.starts_with("a/") || path.starts_with("b/")) path.erase(0, 2);
  return path;
}

}  // namespace

HunkApplyFailure::HunkApplyFailure(std::size_t hunk_index, std::string reason)
    : Error("hunk #" + std::to_string(hunk_index + 1) + ": " + reason),
      hunk_index_(hunk_index) {}

std::string UnifiedDiff::to_string() const {
  std::string out;
  for (const auto& h : hunks) {
    out += "@@ ";
    render_range(out, '-', h.old_start, h.old_len);
    out += ' ';
    render_range(out, '+', h.new_start, h.new_len);
    out += " @@\n";
    for (const auto& l : h.lines) {
      out += l.tag == LineTag::context ? ' ' : l.tag == LineTag::removed ? '-' : '+';
      out += l.text;
      out += '\n';
      if (l.no_newline) out += "\\ No newline at end of file\n";
    }
  }
  return out;
}

UnifiedDiff UnifiedDiff::parse(std::string_view input) {
  UnifiedDiff diff;
  if (text::trim(input).empty()) return diff;
  Reader r(input);
  if (r.any_header()) {
    while (!r.at_end() && !r.peek().starts_with("@@")) r.skip();
    diff.hunks = r.read_hunks();
    while (!r.at_end()) {
      if (r.peek().starts_with("@@")) {
        auto more = r.read_hunks();
        diff.hunks.insert(diff.hunks.end(), more.begin(), more.end());
      } else {
        r.skip();
      }
    }
  } else {
    if (!r.at_end() && r.peek().starts_with("--- ")) {
      r.skip();
      if (!r.at_end() && r.peek().starts_with("+++ ")) r.skip();
    }
    HeaderInfo info;
    info.hunk.positioned = false;
    auto h = r.read_body(std::move(info));
    if (!r.at_end()) throw MalformedDiff("not a unified diff: unexpected line '" +
                                         std::string(r.peek().substr(0, 60)) + "'");
    bool has_change = std::any_of(h.lines.begin(), h.lines.end(), [](const HunkLine& l) {
      return l.tag != LineTag::context;
    });
    if (!has_change) throw MalformedDiff("not a unified diff: no changed lines");
    diff.hunks.push_back(std::move(h));
  }
  for (const auto& h : diff.hunks)
    if (h.lines.empty()) throw MalformedDiff("empty hunk");
  if (diff.hunks.empty()) throw MalformedDiff("no hunks found");
  return diff;
}

UnifiedDiff make_unified_diff(std::string_view a, std::string_view b, int context) {
  if (context < 0) context = 0;
  auto la = to_lines(a);
  auto lb = to_lines(b);
  auto ops = myers(la, lb);

  // Positions before each op.
  std::vector<int> apos(ops.size() + 1, 0);
  std::vector<int> bpos(ops.size() + 1, 0);
  for (std::size_t i = 0; i < ops.size(); ++i) {
    apos[i + 1] = apos[i] + (ops[i] != Op::insert ? 1 : 0);
    bpos[i + 1] = bpos[i] + (ops[i] != Op::remove ? 1 : 0);
  }

  std::vector<std::size_t> changes;
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (ops[i] != Op::equal) changes.push_back(i);

  UnifiedDiff diff;
  std::size_t c = 0;
  const auto ctx = static_cast<std::size_t>(context);
  while (c < changes.size()) {
    std::size_t first = changes[c];
    std::size_t last = first;
    while (c + 1 < changes.size() && changes[c + 1] - last - 1 <= 2 * ctx) {
      ++c;
      last = changes[c];
    }
    ++c;
    std::size_t begin = first >= ctx ? first - ctx : 0;
    std::size_t end = std::min(ops.size(), last + 1 + ctx);

    Hunk h;
    for (std::size_t i = begin; i < end; ++i) {
      HunkLine hl;
      switch (ops[i]) {
        case Op::equal: {
          const auto& l = la[static_cast<std::size_t>(apos[i])];
          hl = {LineTag::context, l.text, !l.newline};
          break;
        }
        case Op::remove: {
          const auto& l = la[static_cast<std::size_t>(apos[i])];
          hl = {LineTag::removed, l.text, !l.newline};
          break;
        }
        case Op::insert: {
          const auto& l = lb[static_cast<std::size_t>(bpos[i])];
          hl = {LineTag::added, l.text, !l.newline};
          break;
        }
      }
      h.lines.push_back(std::move(hl));
    }
    h.old_len = apos[end] - apos[begin];
    h.new_len = bpos[end] - bpos[begin];
    h.old_start = header_start(apos[begin], h.old_len);
    h.new_start = header_start(bpos[begin], h.new_len);
    diff.hunks.push_back(std::move(h));
  }
  return diff;
}

std::string apply_diff(const UnifiedDiff& diff, std::string_view a, int fuzz) {
  auto file = to_lines(a);
  std::vector<Line> out;
  std::size_t cursor = 0;
  long drift = 0;

  for (std::size_t hi = 0; hi < diff.hunks.size(); ++hi) {
    const auto& h = diff.hunks[hi];
    std::vector<Line> old_side;
    for (const auto& l : h.lines)
      if (l.tag != LineTag::added) old_side.push_back({l.text, !l.no_newline});

    auto fits = [&](long pos, bool tolerant) {
      if (pos < static_cast<long>(cursor)) return false;
      if (pos + static_cast<long>(old_side.size()) > static_cast<long>(file.size()))
        return false;
      for (std::size_t j = 0; j < old_side.size(); ++j) {
        const auto& f = file[static_cast<std::size_t>(pos) + j];
        if (tolerant) {
          if (text::rtrim(f.text) != text::rtrim(old_side[j].text)) return false;
        } else if (!(f == old_side[j])) {
          return false;
        }
      }
      return true;
    };

    long stated = h.old_len == 0 ? h.old_start : h.old_start - 1;
    long expected = stated + drift;
    std::optional<long> found;

    if (old_side.empty()) {
      if (!h.positioned && !file.empty())
        throw HunkApplyFailure(hi, "pure insertion without a position");
      long pos = h.positioned ? expected : 0;
      if (pos < static_cast<long>(cursor) || pos > static_cast<long>(file.size()))
        throw HunkApplyFailure(hi, "insertion point out of range");
      found = pos;
    }

    for (bool tolerant : {false, true}) {
      if (found) break;
      std::vector<long> hits;
      if (h.positioned) {
        if (fits(expected, tolerant)) {
          found = expected;
          break;
        }
        for (long d = 1; d <= fuzz; ++d) {
          if (fits(expected - d, tolerant)) hits.push_back(expected - d);
          if (fits(expected + d, tolerant)) hits.push_back(expected + d);
        }
      } else {
        for (long p = static_cast<long>(cursor);
             p + static_cast<long>(old_side.size()) <= static_cast<long>(file.size()); ++p)
          if (fits(p, tolerant)) hits.push_back(p);
      }
      if (hits.size() == 1) found = hits.front();
      if (hits.size() > 1) throw HunkApplyFailure(hi, "context matches at several positions");
    }
    if (!found) throw HunkApplyFailure(hi, "context not found");

    auto pos = static_cast<std::size_t>(*found);
    out.insert(out.end(), file.begin() + static_cast<long>(cursor),
               file.begin() + static_cast<long>(pos));
    std::size_t j = pos;
    for (const auto& l : h.lines) {
      switch (l.tag) {
        case LineTag::context:
          out.push_back(file[j++]);
          break;
        case LineTag::removed:
          ++j;
          break;
        case LineTag::added:
          out.push_back({l.text, !l.no_newline});
          break;
      }
    }
    cursor = j;
    if (h.positioned) drift = *found - stated;
  }
  out.insert(out.end(), file.begin() + static_cast<long>(cursor), file.end());
  return from_lines(out);
}

std::vector<FilePatch> parse_patch_set(std::string_view input) {
  std::vector<FilePatch> patches;
  Reader r(input);
  while (!r.at_end()) {
    auto l = r.peek();
    if (!l.starts_with("--- ")) {
      r.skip();
      continue;
    }
    FilePatch fp;
    fp.old_path = strip_path(l.substr(4));
    r.skip();
    if (r.at_end() || !r.peek().starts_with("+++ ")) continue;
    fp.new_path = strip_path(r.peek().substr(4));
    r.skip();
    fp.diff.hunks = r.read_hunks();
    if (fp.diff.hunks.empty()) throw MalformedDiff("file section without hunks: " + fp.new_path);
    patches.push_back(std::move(fp));
  }
  return patches;
}

}  // namespace aprkit::diff
