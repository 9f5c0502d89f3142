#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "specgap/types.hpp"

namespace specgap {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Expression tree over variables x1..xn and r = |x|. Grammar: numbers,
// + - * / ^, parentheses, and the functions sin cos exp tanh abs sqrt
// min max. Trees are immutable; parsing applies constant folding.
struct Expr {
  enum class Op { Const, Var, Radius, Add, Sub, Mul, Div, Pow, Neg, Call };

  Op op = Op::Const;
  double value = 0.0;        // Const
  int var = 0;               // Var, 0-based axis
  std::string func;          // Call
  std::vector<ExprPtr> args;

  static ExprPtr constant(double v);
  static ExprPtr variable(int axis);
  static ExprPtr radius();
  static ExprPtr unary(Op op, ExprPtr a);
  static ExprPtr binary(Op op, ExprPtr a, ExprPtr b);
  static ExprPtr call(const std::string& name, std::vector<ExprPtr> args);
};

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

// Canonical fully parenthesized form; parse(print(e)) == e for folded trees.
std::string expr_print(const ExprPtr& e);

// Bottom-up constant folding (pure subtrees are evaluated).
ExprPtr expr_fold(const ExprPtr& e);

struct ParseError : std::runtime_error {
  ParseError(std::string msg, size_t offset, std::vector<std::string> expected);
  size_t offset;                       // byte offset into the input
  std::vector<std::string> expected;   // tokens that would have been accepted
};

// Parses the potential grammar; identifiers are x1..x<dimension> and r.
// Throws ParseError with byte offset and expected-token set on failure.
ExprPtr parse_expression(const std::string& text, int dimension);

double expr_eval(const ExprPtr& e, const Point& x, int dimension);

// Analytic partial derivative at x along the given axis, computed by
// forward-mode dual-number evaluation of the tree.
double expr_deriv(const ExprPtr& e, const Point& x, int dimension, int axis);

}  // namespace specgap
