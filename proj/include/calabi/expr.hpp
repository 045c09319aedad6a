#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "calabi/tensors.hpp"

namespace calabi {

enum class ExprKind {
  Constant,
  Variable,  // 1-based index
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // integer exponent
  Neg,
  Ln,
  Exp,
  Sqrt,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

// Immutable expression tree; nodes are shared freely between trees.
struct ExprNode {
  ExprKind kind;
  double value = 0.0;  // Constant
  int var_index = 0;   // Variable
  int exponent = 0;    // Pow
  ExprPtr a;           // left / only child
  ExprPtr b;           // right child
};

class ParseError : public std::runtime_error {
public:
  ParseError(std::string msg, std::size_t offset);
  std::size_t offset;
};

class EvalDomainError : public std::runtime_error {
public:
  EvalDomainError(std::string msg, std::string subexpr);
  std::string subexpr;
};

// Folding constructors. Only constants are folded; no other rewriting.
ExprPtr make_const(double v);
ExprPtr make_var(int index);
ExprPtr make_add(ExprPtr a, ExprPtr b);
ExprPtr make_sub(ExprPtr a, ExprPtr b);
ExprPtr make_mul(ExprPtr a, ExprPtr b);
ExprPtr make_div(ExprPtr a, ExprPtr b);
ExprPtr make_pow(ExprPtr a, int exponent);
ExprPtr make_neg(ExprPtr a);
ExprPtr make_ln(ExprPtr a);
ExprPtr make_exp(ExprPtr a);
ExprPtr make_sqrt(ExprPtr a);

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ['-'] base ['^' integer]
//   base   := number | 'x'<digits> | '(' expr ')'
//           | ('ln'|'exp'|'sqrt') '(' expr ')'
// Raises ParseError with the byte offset of the offending token.
ExprPtr parse_expression(std::string_view text, int arity);

std::string to_string(const ExprPtr& e);

bool expr_equal(const ExprPtr& a, const ExprPtr& b);

int max_var_index(const ExprPtr& e);

// Exact symbolic partial derivative with respect to x_var (1-based).
ExprPtr differentiate(const ExprPtr& e, int var);

double evaluate(const ExprPtr& e, std::span<const double> point);

// Replaces x_i by replacements[i-1]; replacements must cover every
// variable appearing in the tree.
ExprPtr substitute(const ExprPtr& e, std::span<const ExprPtr> replacements);

// All partial derivatives up to order 4 at a point, each multiset of
// directions stored once.
struct Jet4 {
  Jet4(int arity)
      : n(arity), value(0.0), grad(static_cast<std::size_t>(arity), 0.0),
        hess(arity, 2), third(arity, 3), fourth(arity, 4) {}
  int n;
  double value;
  std::vector<double> grad;
  SymTensor hess;
  SymTensor third;
  SymTensor fourth;
};

// Differentiates once, evaluates many times. One canonical derivative tree
// is kept per non-decreasing multi-index.
class DerivativeTable {
public:
  DerivativeTable(ExprPtr f, int arity);

  int arity() const { return n_; }
  const ExprPtr& function() const { return f_; }

  // order 1..4; idx is a canonical 0-based multi-index
  const ExprPtr& partial(std::span<const int> idx) const;

  Jet4 jet(std::span<const double> point) const;

private:
  int n_;
  ExprPtr f_;
  std::vector<ExprPtr> d1_, d2_, d3_, d4_;
};

Jet4 jet4(const ExprPtr& f, int arity, std::span<const double> point);

}  // namespace calabi
