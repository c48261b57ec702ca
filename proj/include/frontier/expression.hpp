#pragma once

#include <memory>
#include <string>

namespace frontier {

/// Arithmetic expression over t, x, u with + - * / ^ exp sin.
/// Parsed once; evaluation is a tree walk.
class Expression {
public:
  /// Throws DomainError with the offending column on a syntax error.
  static Expression parse(const std::string& text);

  double eval(double t, double x, double u) const;
  const std::string& text() const { return text_; }
  /// True when the expression mentions t or x.
  bool depends_on_time_or_space() const { return uses_tx_; }

  struct Node;

private:
  std::string text_;
  std::shared_ptr<const Node> root_;
  bool uses_tx_ = false;
};

}  // namespace frontier
