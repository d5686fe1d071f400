#pragma once

#include "aprkit/syntax.hpp"

namespace aprkit::syntax {

/// tree-sitter-java backed frontend. A fresh parser is created per call, so
/// one instance can be shared across threads.
class JavaFrontend final : public Frontend {
 public:
  std::string_view language() const override;
  SyntaxTree parse(std::string_view source) const override;
  std::vector<FunctionSpan> functions(const SyntaxTree& tree,
                                      std::string_view source) const override;
  bool is_comment(std::string_view kind) const override;
  bool is_atomic(std::string_view kind) const override;
};

}  // namespace aprkit::syntax
