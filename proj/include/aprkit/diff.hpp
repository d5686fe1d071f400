#pragma once

// Line-based unified diffs: computation, rendering, parsing and application.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/error.hpp"

namespace aprkit::diff {

enum class LineTag { context, removed, added };

struct HunkLine {
  LineTag tag = LineTag::context;
  std::string text;
  /// Last line of its side without a trailing '\n'.
  bool no_newline = false;

  bool operator==(const HunkLine&) const = default;
};

struct Hunk {
  // Header coordinates as rendered: 1-based, except that an empty side names
  // the line before the gap (the usual `-3,0` convention).
  int old_start = 0;
  int old_len = 0;
  int new_start = 0;
  int new_len = 0;
  /// False for hunks parsed without a usable `@@` header; they are located by
  /// context search alone.
  bool positioned = true;
  std::vector<HunkLine> lines;

  bool operator==(const Hunk&) const = default;
};

struct UnifiedDiff {
  std::vector<Hunk> hunks;

  bool empty() const { return hunks.empty(); }
  bool operator==(const UnifiedDiff&) const = default;

  /// `@@ -a,b +c,d @@` hunks without file headers.
  std::string to_string() const;

  /// Lenient reader: tolerates missing file headers, header counts that
  /// disagree with the body, and a single headerless hunk. Hunk lengths are
  /// always recomputed from the body. Throws MalformedDiff.
  static UnifiedDiff parse(std::string_view text);
};

class MalformedDiff : public Error {
 public:
  using Error::Error;
};

class HunkApplyFailure : public Error {
 public:
  HunkApplyFailure(std::size_t hunk_index, std::string reason);
  std::size_t hunk_index() const { return hunk_index_; }

 private:
  std::size_t hunk_index_;
};

UnifiedDiff make_unified_diff(std::string_view a, std::string_view b, int context = 3);

/// Applies every hunk or none. Each hunk is tried at its stated position
/// (shifted by the drift of earlier hunks); failing that, it must match at
/// exactly one position within +/-fuzz lines. Throws HunkApplyFailure.
std::string apply_diff(const UnifiedDiff& diff, std::string_view a, int fuzz = 3);

/// One file section of a multi-file patch.
struct FilePatch {
  std::string old_path;
  std::string new_path;
  UnifiedDiff diff;
};

/// Splits `diff -ru` / `git diff` output into per-file sections. Paths have
/// their `a/` and `b/` prefixes removed.
std::vector<FilePatch> parse_patch_set(std::string_view text);

}  // namespace aprkit::diff
