#pragma once

// Input/output code representations for repair models.
//
// Inputs (IR1-IR4) render a buggy function with progressively richer
// fault-localization signals; outputs (OR1-OR4) express the fix as a whole
// function, a replacement chunk, or a contextual diff. `reconstruct` is the
// inverse used at inference time to turn model output back into a candidate
// function.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aprkit/error.hpp"
#include "aprkit/syntax.hpp"

namespace aprkit::repr {

using syntax::SourceFunction;

/// Function-relative, 1-based, inclusive line span. An insertion point before
/// line k is the empty span {k, k - 1}.
struct Region {
  int start_line = 1;
  int end_line = 0;

  bool empty() const { return end_line < start_line; }
  int size() const { return empty() ? 0 : end_line - start_line + 1; }
  static Region insertion_before(int line) { return {line, line - 1}; }

  bool operator==(const Region&) const = default;
};

class InvalidRegion : public Error {
 public:
  using Error::Error;
};

class RegionMismatch : public Error {
 public:
  using Error::Error;
};

class MalformedOutput : public Error {
 public:
  using Error::Error;
};

class InvalidPair : public Error {
 public:
  using Error::Error;
};

enum class InputKind { IR1, IR2, IR3, IR4 };
enum class OutputKind { OR1, OR2, OR3, OR4 };

std::string_view to_string(InputKind k);
std::string_view to_string(OutputKind k);
std::optional<InputKind> parse_input_kind(std::string_view s);
std::optional<OutputKind> parse_output_kind(std::string_view s);

struct ReprPair {
  InputKind input = InputKind::IR4;
  OutputKind output = OutputKind::OR2;

  bool operator==(const ReprPair&) const = default;
  /// "IR4xOR2".
  std::string to_string() const;
  /// Accepts "IR4xOR2", "ir4xor2" and "IR4-OR2". Does not check validity.
  static std::optional<ReprPair> parse(std::string_view s);
};

/// True for the six supported combinations. OR2 needs a localized input, and
/// localized inputs only pair with OR2.
bool valid_pair(ReprPair pair);

/// The six valid pairs in canonical order.
const std::vector<ReprPair>& all_valid_pairs();

struct Markers {
  std::string fill_token = "<FILL_ME>";
  std::string start_comment = "// buggy code starts here";
  std::string end_comment = "// buggy code ends here";
  std::string buggy_header = "// buggy code";
  std::string comment_prefix = "// ";
};

struct ReconstructOptions {
  /// Output is cut at the first occurrence of any of these.
  std::vector<std::string> stop_tokens = {"</s>", "<EOT>", "<|endoftext|>", "<EOS>"};
  /// Line window for locating OR3/OR4 hunks.
  int fuzz = 3;
};

/// Throws InvalidRegion unless 1 <= start <= n + 1, start - 1 <= end <= n.
void validate_region(const Region& region, int line_count);

/// Indentation used for markers and the fill token: the first non-blank
/// region line, else the next non-blank line after the region, else the
/// previous one.
std::string anchor_indent(const SourceFunction& fn, const Region& region);

std::string build_input(const SourceFunction& fn, const Region& region, InputKind kind,
                        const Markers& markers = {});

/// Fixed-side lines that replace `region`. Throws RegionMismatch when buggy
/// and fixed differ outside the region.
std::vector<std::string> fixed_chunk(const SourceFunction& buggy,
                                     const SourceFunction& fixed, const Region& region);

std::string build_output(const SourceFunction& buggy, const SourceFunction& fixed,
                         const Region& region, OutputKind kind);

/// Removes stop-token residue, leading blank lines and trailing whitespace.
/// Indentation on the first content line is kept.
std::string clean_model_output(std::string_view raw,
                               const std::vector<std::string>& stop_tokens);

/// Candidate fixed function from model output. Throws InvalidPair,
/// InvalidRegion, MalformedOutput or diff::HunkApplyFailure.
std::string reconstruct(const SourceFunction& fn, const Region& region, ReprPair pair,
                        std::string_view model_output, const Markers& markers = {},
                        const ReconstructOptions& options = {});

/// Every non-empty contiguous span, ordered by (start, end): n(n+1)/2 regions.
std::vector<Region> enumerate_regions(const SourceFunction& fn);

/// Minimal buggy-side span outside of which buggy and fixed are identical.
/// Pure insertions give an empty span at the insertion point. Throws Error
/// when the texts are equal.
Region derive_region(std::string_view buggy_text, std::string_view fixed_text);

}  // namespace aprkit::repr
