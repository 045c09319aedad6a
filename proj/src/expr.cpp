#include "calabi/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace calabi {

ParseError::ParseError(std::string msg, std::size_t off)
    : std::runtime_error(msg + " at offset " + std::to_string(off)), offset(off) {}

EvalDomainError::EvalDomainError(std::string msg, std::string sub)
    : std::runtime_error(msg + " in '" + sub + "'"), subexpr(std::move(sub)) {}

namespace {

// integer powers by squaring: identical results in folding and evaluation,
// no dependence on libm pow
double ipow(double base, int exponent) {
  if (exponent == 0) return 1.0;
  const bool negative = exponent < 0;
  unsigned int e = negative ? static_cast<unsigned int>(-(long long)exponent)
                            : static_cast<unsigned int>(exponent);
  double acc = 1.0;
  double b = base;
  while (e > 0) {
    if (e & 1u) acc *= b;
    b *= b;
    e >>= 1u;
  }
  return negative ? 1.0 / acc : acc;
}

ExprPtr node(ExprKind k) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  return n;
}

bool is_const(const ExprPtr& e, double v) {
  return e->kind == ExprKind::Constant && e->value == v;
}

}  // namespace

ExprPtr make_const(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Constant;
  n->value = v;
  return n;
}

ExprPtr make_var(int index) {
  if (index < 1) throw std::invalid_argument("variable index must be >= 1");
  auto n = std::make_shared<ExprNode>();
  n->kind = ExprKind::Variable;
  n->var_index = index;
  return n;
}

ExprPtr make_add(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
    return make_const(a->value + b->value);
  }
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  auto n = node(ExprKind::Add);
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->a = std::move(a);
  m->b = std::move(b);
  return n;
}

ExprPtr make_sub(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
    return make_const(a->value - b->value);
  }
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  auto n = node(ExprKind::Sub);
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->a = std::move(a);
  m->b = std::move(b);
  return n;
}

ExprPtr make_mul(ExprPtr a, ExprPtr b) {
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
    return make_const(a->value * b->value);
  }
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a, -1.0)) return make_neg(std::move(b));
  if (is_const(b, -1.0)) return make_neg(std::move(a));
  auto n = node(ExprKind::Mul);
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->a = std::move(a);
  m->b = std::move(b);
  return n;
}

ExprPtr make_div(ExprPtr a, ExprPtr b) {
  if (is_const(b, 0.0)) {
    throw EvalDomainError("division by zero constant", to_string(a) + "/0");
  }
  if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant) {
    return make_const(a->value / b->value);
  }
  if (is_const(a, 0.0)) return make_const(0.0);
  if (is_const(b, 1.0)) return a;
  auto n = node(ExprKind::Div);
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->a = std::move(a);
  m->b = std::move(b);
  return n;
}

ExprPtr make_pow(ExprPtr a, int exponent) {
  if (exponent == 0) return make_const(1.0);
  if (exponent == 1) return a;
  if (a->kind == ExprKind::Constant) {
    if (a->value == 0.0 && exponent < 0) {
      throw EvalDomainError("zero to a negative power", "0^" + std::to_string(exponent));
    }
    return make_const(ipow(a->value, exponent));
  }
  auto n = node(ExprKind::Pow);
  auto m = std::const_pointer_cast<ExprNode>(n);
  m->exponent = exponent;
  m->a = std::move(a);
  return n;
}

ExprPtr make_neg(ExprPtr a) {
  if (a->kind == ExprKind::Constant) return make_const(-a->value);
  if (a->kind == ExprKind::Neg) return a->a;
  auto n = node(ExprKind::Neg);
  std::const_pointer_cast<ExprNode>(n)->a = std::move(a);
  return n;
}

ExprPtr make_ln(ExprPtr a) {
  if (a->kind == ExprKind::Constant && a->value > 0.0) {
    return make_const(std::log(a->value));
  }
  auto n = node(ExprKind::Ln);
  std::const_pointer_cast<ExprNode>(n)->a = std::move(a);
  return n;
}

ExprPtr make_exp(ExprPtr a) {
  if (a->kind == ExprKind::Constant) return make_const(std::exp(a->value));
  auto n = node(ExprKind::Exp);
  std::const_pointer_cast<ExprNode>(n)->a = std::move(a);
  return n;
}

ExprPtr make_sqrt(ExprPtr a) {
  if (a->kind == ExprKind::Constant && a->value > 0.0) {
    return make_const(std::sqrt(a->value));
  }
  auto n = node(ExprKind::Sqrt);
  std::const_pointer_cast<ExprNode>(n)->a = std::move(a);
  return n;
}

// ---- parser ----

namespace {

class Parser {
public:
  Parser(std::string_view text, int arity) : text_(text), arity_(arity) {}

  ExprPtr run() {
    ExprPtr e = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) {
      throw ParseError("unexpected trailing input", pos_);
    }
    return e;
  }

private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c, const char* what) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) {
      throw ParseError(std::string("expected ") + what, pos_);
    }
    ++pos_;
  }

  ExprPtr parse_expr() {
    ExprPtr e = parse_term();
    while (true) {
      skip_ws();
      if (accept('+')) {
        e = make_add(e, parse_term());
      } else if (accept('-')) {
        e = make_sub(e, parse_term());
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_factor();
    while (true) {
      skip_ws();
      if (accept('*')) {
        e = make_mul(e, parse_factor());
      } else if (accept('/')) {
        skip_ws();
        const std::size_t denom_off = pos_;
        ExprPtr d = parse_factor();
        if (d->kind == ExprKind::Constant && d->value == 0.0) {
          throw ParseError("zero denominator", denom_off);
        }
        e = make_div(e, d);
      } else {
        return e;
      }
    }
  }

  ExprPtr parse_factor() {
    skip_ws();
    bool neg = false;
    if (accept('-')) neg = true;
    ExprPtr e = parse_base();
    skip_ws();
    if (accept('^')) {
      e = make_pow(e, parse_integer());
    }
    return neg ? make_neg(e) : e;
  }

  int parse_integer() {
    skip_ws();
    const std::size_t start = pos_;
    bool negative = false;
    if (pos_ < text_.size() && text_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      throw ParseError("expected integer exponent", start);
    }
    int value = 0;
    auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) throw ParseError("bad integer exponent", start);
    pos_ = static_cast<std::size_t>(p - text_.data());
    return negative ? -value : value;
  }

  ExprPtr parse_base() {
    skip_ws();
    if (pos_ >= text_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = text_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      return parse_number();
    }
    if (c == 'x' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      return parse_variable();
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      return parse_call();
    }
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_expr();
      expect(')', "')'");
      return e;
    }
    throw ParseError("unexpected character", pos_);
  }

  ExprPtr parse_number() {
    const std::size_t start = pos_;
    double value = 0.0;
    auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc() || p == text_.data() + pos_) {
      throw ParseError("bad numeric literal", start);
    }
    pos_ = static_cast<std::size_t>(p - text_.data());
    return make_const(value);
  }

  ExprPtr parse_variable() {
    const std::size_t start = pos_;
    ++pos_;  // 'x'
    int index = 0;
    auto [p, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), index);
    if (ec != std::errc()) throw ParseError("bad variable index", start);
    pos_ = static_cast<std::size_t>(p - text_.data());
    if (index < 1 || index > arity_) {
      throw ParseError("variable index out of range", start);
    }
    return make_var(index);
  }

  ExprPtr parse_call() {
    const std::size_t start = pos_;
    std::size_t end = pos_;
    while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
    const std::string_view name = text_.substr(pos_, end - pos_);
    pos_ = end;
    expect('(', "'(' after function name");
    ExprPtr arg = parse_expr();
    expect(')', "')'");
    if (name == "ln") return make_ln(arg);
    if (name == "exp") return make_exp(arg);
    if (name == "sqrt") return make_sqrt(arg);
    throw ParseError("unknown function '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int arity_;
  std::size_t pos_ = 0;
};

}  // namespace

ExprPtr parse_expression(std::string_view text, int arity) {
  if (arity < 1) throw std::invalid_argument("arity must be positive");
  return Parser(text, arity).run();
}

// ---- printing ----

namespace {

void print_number(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  out += buf;
}

bool is_atomic(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
      return !std::signbit(e->value);
    case ExprKind::Variable:
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt:
      return true;
    default:
      return false;
  }
}

void print(std::string& out, const ExprPtr& e, int parent_prec);

void print_child(std::string& out, const ExprPtr& e, int prec) {
  print(out, e, prec);
}

// precedence: 0 add/sub, 1 mul/div, 2 unary minus, 3 pow base
void print(std::string& out, const ExprPtr& e, int parent_prec) {
  switch (e->kind) {
    case ExprKind::Constant:
      // negative literals print as "-2", which re-parses as a signed factor
      print_number(out, e->value);
      return;
    case ExprKind::Variable:
      out += 'x';
      out += std::to_string(e->var_index);
      return;
    case ExprKind::Add: {
      const bool paren = parent_prec > 0;
      if (paren) out += '(';
      print_child(out, e->a, 0);
      out += '+';
      // rhs of '+' may itself start with '-', which re-parses as a factor sign
      print_child(out, e->b, 1);
      if (paren) out += ')';
      return;
    }
    case ExprKind::Sub: {
      const bool paren = parent_prec > 0;
      if (paren) out += '(';
      print_child(out, e->a, 0);
      out += '-';
      print_child(out, e->b, 1);
      if (paren) out += ')';
      return;
    }
    case ExprKind::Mul: {
      const bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_child(out, e->a, 1);
      out += '*';
      print_child(out, e->b, 2);
      if (paren) out += ')';
      return;
    }
    case ExprKind::Div: {
      const bool paren = parent_prec > 1;
      if (paren) out += '(';
      print_child(out, e->a, 1);
      out += '/';
      print_child(out, e->b, 2);
      if (paren) out += ')';
      return;
    }
    case ExprKind::Neg: {
      const bool paren = parent_prec > 1;
      if (paren) out += '(';
      out += '-';
      if (is_atomic(e->a) || e->a->kind == ExprKind::Pow) {
        print_child(out, e->a, 3);
      } else {
        out += '(';
        print_child(out, e->a, 0);
        out += ')';
      }
      if (paren) out += ')';
      return;
    }
    case ExprKind::Pow: {
      if (is_atomic(e->a)) {
        print_child(out, e->a, 3);
      } else {
        out += '(';
        print_child(out, e->a, 0);
        out += ')';
      }
      out += '^';
      out += std::to_string(e->exponent);
      return;
    }
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt: {
      out += e->kind == ExprKind::Ln ? "ln" : e->kind == ExprKind::Exp ? "exp" : "sqrt";
      out += '(';
      print_child(out, e->a, 0);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const ExprPtr& e) {
  std::string out;
  print(out, e, 0);
  return out;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a.get() == b.get()) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Constant:
      return a->value == b->value;
    case ExprKind::Variable:
      return a->var_index == b->var_index;
    case ExprKind::Pow:
      return a->exponent == b->exponent && expr_equal(a->a, b->a);
    case ExprKind::Neg:
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt:
      return expr_equal(a->a, b->a);
    default:
      return expr_equal(a->a, b->a) && expr_equal(a->b, b->b);
  }
}

int max_var_index(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Constant:
      return 0;
    case ExprKind::Variable:
      return e->var_index;
    case ExprKind::Pow:
    case ExprKind::Neg:
    case ExprKind::Ln:
    case ExprKind::Exp:
    case ExprKind::Sqrt:
      return max_var_index(e->a);
    default:
      return std::max(max_var_index(e->a), max_var_index(e->b));
  }
}

ExprPtr differentiate(const ExprPtr& e, int var) {
  switch (e->kind) {
    case ExprKind::Constant:
      return make_const(0.0);
    case ExprKind::Variable:
      return make_const(e->var_index == var ? 1.0 : 0.0);
    case ExprKind::Add:
      return make_add(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Sub:
      return make_sub(differentiate(e->a, var), differentiate(e->b, var));
    case ExprKind::Mul:
      return make_add(make_mul(differentiate(e->a, var), e->b),
                      make_mul(e->a, differentiate(e->b, var)));
    case ExprKind::Div:
      // (u'v - uv')/v^2
      return make_div(make_sub(make_mul(differentiate(e->a, var), e->b),
                               make_mul(e->a, differentiate(e->b, var))),
                      make_pow(e->b, 2));
    case ExprKind::Pow:
      return make_mul(make_mul(make_const(static_cast<double>(e->exponent)),
                               make_pow(e->a, e->exponent - 1)),
                      differentiate(e->a, var));
    case ExprKind::Neg:
      return make_neg(differentiate(e->a, var));
    case ExprKind::Ln:
      return make_div(differentiate(e->a, var), e->a);
    case ExprKind::Exp:
      return make_mul(differentiate(e->a, var), e);
    case ExprKind::Sqrt:
      return make_div(differentiate(e->a, var), make_mul(make_const(2.0), e));
  }
  throw std::logic_error("unreachable");
}

double evaluate(const ExprPtr& e, std::span<const double> point) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e->value;
    case ExprKind::Variable: {
      const int i = e->var_index;
      if (i < 1 || i > static_cast<int>(point.size())) {
        throw EvalDomainError("point has too few coordinates", to_string(e));
      }
      return point[static_cast<std::size_t>(i - 1)];
    }
    case ExprKind::Add:
      return evaluate(e->a, point) + evaluate(e->b, point);
    case ExprKind::Sub:
      return evaluate(e->a, point) - evaluate(e->b, point);
    case ExprKind::Mul:
      return evaluate(e->a, point) * evaluate(e->b, point);
    case ExprKind::Div: {
      const double num = evaluate(e->a, point);
      const double den = evaluate(e->b, point);
      if (den == 0.0) throw EvalDomainError("division by zero", to_string(e));
      return num / den;
    }
    case ExprKind::Pow: {
      const double base = evaluate(e->a, point);
      if (base == 0.0 && e->exponent < 0) {
        throw EvalDomainError("zero to a negative power", to_string(e));
      }
      return ipow(base, e->exponent);
    }
    case ExprKind::Neg:
      return -evaluate(e->a, point);
    case ExprKind::Ln: {
      const double arg = evaluate(e->a, point);
      if (!(arg > 0.0)) throw EvalDomainError("ln of non-positive argument", to_string(e));
      return std::log(arg);
    }
    case ExprKind::Exp:
      return std::exp(evaluate(e->a, point));
    case ExprKind::Sqrt: {
      const double arg = evaluate(e->a, point);
      if (!(arg > 0.0)) throw EvalDomainError("sqrt of non-positive argument", to_string(e));
      return std::sqrt(arg);
    }
  }
  throw std::logic_error("unreachable");
}

ExprPtr substitute(const ExprPtr& e, std::span<const ExprPtr> replacements) {
  switch (e->kind) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Variable: {
      const int i = e->var_index;
      if (i < 1 || i > static_cast<int>(replacements.size()) ||
          !replacements[static_cast<std::size_t>(i - 1)]) {
        throw std::invalid_argument("substitute: no replacement for x" + std::to_string(i));
      }
      return replacements[static_cast<std::size_t>(i - 1)];
    }
    case ExprKind::Add:
      return make_add(substitute(e->a, replacements), substitute(e->b, replacements));
    case ExprKind::Sub:
      return make_sub(substitute(e->a, replacements), substitute(e->b, replacements));
    case ExprKind::Mul:
      return make_mul(substitute(e->a, replacements), substitute(e->b, replacements));
    case ExprKind::Div:
      return make_div(substitute(e->a, replacements), substitute(e->b, replacements));
    case ExprKind::Pow:
      return make_pow(substitute(e->a, replacements), e->exponent);
    case ExprKind::Neg:
      return make_neg(substitute(e->a, replacements));
    case ExprKind::Ln:
      return make_ln(substitute(e->a, replacements));
    case ExprKind::Exp:
      return make_exp(substitute(e->a, replacements));
    case ExprKind::Sqrt:
      return make_sqrt(substitute(e->a, replacements));
  }
  throw std::logic_error("unreachable");
}

// ---- jets ----

DerivativeTable::DerivativeTable(ExprPtr f, int arity) : n_(arity), f_(std::move(f)) {
  if (arity < 1) throw std::invalid_argument("arity must be positive");
  const int used = max_var_index(f_);
  if (used > arity) {
    throw std::invalid_argument("expression uses x" + std::to_string(used) +
                                " beyond declared arity " + std::to_string(arity));
  }
  d1_.resize(SymTensor::canonical_count(arity, 1));
  d2_.resize(SymTensor::canonical_count(arity, 2));
  d3_.resize(SymTensor::canonical_count(arity, 3));
  d4_.resize(SymTensor::canonical_count(arity, 4));
  // each canonical multi-index extends a canonical prefix by its last slot,
  // so every derivative tree is produced exactly once
  SymTensor shape1(arity, 1), shape2(arity, 2), shape3(arity, 3), shape4(arity, 4);
  shape1.for_each_canonical([&](std::span<const int> idx, int) {
    d1_[SymTensor::multiset_rank(idx)] = differentiate(f_, idx[0] + 1);
  });
  shape2.for_each_canonical([&](std::span<const int> idx, int) {
    const int prefix[1] = {idx[0]};
    d2_[SymTensor::multiset_rank(idx)] = differentiate(partial(prefix), idx[1] + 1);
  });
  shape3.for_each_canonical([&](std::span<const int> idx, int) {
    const int prefix[2] = {idx[0], idx[1]};
    d3_[SymTensor::multiset_rank(idx)] = differentiate(partial(prefix), idx[2] + 1);
  });
  shape4.for_each_canonical([&](std::span<const int> idx, int) {
    const int prefix[3] = {idx[0], idx[1], idx[2]};
    d4_[SymTensor::multiset_rank(idx)] = differentiate(partial(prefix), idx[3] + 1);
  });
}

const ExprPtr& DerivativeTable::partial(std::span<const int> idx) const {
  std::array<int, 4> s{};
  const int k = static_cast<int>(idx.size());
  if (k < 1 || k > 4) throw std::invalid_argument("partial: order must be 1..4");
  for (int t = 0; t < k; ++t) s[static_cast<std::size_t>(t)] = idx[t];
  std::sort(s.begin(), s.begin() + k);
  const std::size_t r =
      SymTensor::multiset_rank(std::span<const int>(s.data(), static_cast<std::size_t>(k)));
  switch (k) {
    case 1:
      return d1_[r];
    case 2:
      return d2_[r];
    case 3:
      return d3_[r];
    default:
      return d4_[r];
  }
}

Jet4 DerivativeTable::jet(std::span<const double> point) const {
  if (static_cast<int>(point.size()) != n_) {
    throw std::invalid_argument("jet: point length must equal arity");
  }
  Jet4 out(n_);
  out.value = evaluate(f_, point);
  for (int i = 0; i < n_; ++i) {
    const int ix[1] = {i};
    out.grad[static_cast<std::size_t>(i)] = evaluate(partial(ix), point);
  }
  out.hess.for_each_canonical([&](std::span<const int> idx, int) {
    out.hess.set(idx, evaluate(partial(idx), point));
  });
  out.third.for_each_canonical([&](std::span<const int> idx, int) {
    out.third.set(idx, evaluate(partial(idx), point));
  });
  out.fourth.for_each_canonical([&](std::span<const int> idx, int) {
    out.fourth.set(idx, evaluate(partial(idx), point));
  });
  return out;
}

Jet4 jet4(const ExprPtr& f, int arity, std::span<const double> point) {
  return DerivativeTable(f, arity).jet(point);
}

}  // namespace calabi
