#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

namespace homobl {

/// Compiled arithmetic formula over named variables.
///
/// Grammar: numbers, `pi`, `e`, variables, `+ - * / ^`, parentheses and the
/// functions sin, cos, tan, exp, log, sqrt, abs, tanh, cosh, sinh.
/// Variables are bound by position at compile time, e.g.
/// `Expression("2 + cos(2*pi*y1)", {"y1", "y2"})`.
class Expression {
 public:
  struct Node;

  Expression() = default;
  Expression(std::string source, std::vector<std::string> variables);

  double operator()(std::span<const double> values) const;
  double evaluate(std::initializer_list<double> values) const;

  const std::string& source() const { return source_; }
  bool empty() const { return root_ == nullptr; }
  /// True when the formula mentions none of its variables.
  bool is_constant() const;

 private:
  std::string source_;
  std::vector<std::string> variables_;
  std::shared_ptr<const Node> root_;
};

/// Evaluates a constant formula such as "1/8" or "2*pi".
double evaluate_constant(const std::string& source);

}  // namespace homobl
