#include "specgap/expr.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace specgap {

ExprPtr Expr::constant(double v) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Const;
  e->value = v;
  return e;
}

ExprPtr Expr::variable(int axis) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Var;
  e->var = axis;
  return e;
}

ExprPtr Expr::radius() {
  auto e = std::make_shared<Expr>();
  e->op = Op::Radius;
  return e;
}

ExprPtr Expr::unary(Op op, ExprPtr a) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = {std::move(a)};
  return e;
}

ExprPtr Expr::binary(Op op, ExprPtr a, ExprPtr b) {
  auto e = std::make_shared<Expr>();
  e->op = op;
  e->args = {std::move(a), std::move(b)};
  return e;
}

ExprPtr Expr::call(const std::string& name, std::vector<ExprPtr> args) {
  auto e = std::make_shared<Expr>();
  e->op = Op::Call;
  e->func = name;
  e->args = std::move(args);
  return e;
}

bool expr_equal(const ExprPtr& a, const ExprPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  if (a->op != b->op) return false;
  switch (a->op) {
    case Expr::Op::Const:
      return a->value == b->value;
    case Expr::Op::Var:
      return a->var == b->var;
    case Expr::Op::Radius:
      return true;
    default:
      break;
  }
  if (a->op == Expr::Op::Call && a->func != b->func) return false;
  if (a->args.size() != b->args.size()) return false;
  for (size_t i = 0; i < a->args.size(); ++i)
    if (!expr_equal(a->args[i], b->args[i])) return false;
  return true;
}

namespace {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* op_symbol(Expr::Op op) {
  switch (op) {
    case Expr::Op::Add: return "+";
    case Expr::Op::Sub: return "-";
    case Expr::Op::Mul: return "*";
    case Expr::Op::Div: return "/";
    case Expr::Op::Pow: return "^";
    default: return "?";
  }
}

void print_rec(const ExprPtr& e, std::ostringstream& os) {
  switch (e->op) {
    case Expr::Op::Const:
      if (e->value < 0 || std::signbit(e->value)) {
        os << "(" << format_number(e->value) << ")";
      } else {
        os << format_number(e->value);
      }
      break;
    case Expr::Op::Var:
      os << "x" << (e->var + 1);
      break;
    case Expr::Op::Radius:
      os << "r";
      break;
    case Expr::Op::Neg:
      os << "(-";
      print_rec(e->args[0], os);
      os << ")";
      break;
    case Expr::Op::Call:
      os << e->func << "(";
      for (size_t i = 0; i < e->args.size(); ++i) {
        if (i) os << ",";
        print_rec(e->args[i], os);
      }
      os << ")";
      break;
    default:
      os << "(";
      print_rec(e->args[0], os);
      os << op_symbol(e->op);
      print_rec(e->args[1], os);
      os << ")";
      break;
  }
}

bool is_const(const ExprPtr& e) { return e->op == Expr::Op::Const; }

double apply_call(const std::string& f, const std::vector<double>& a) {
  if (f == "sin") return std::sin(a[0]);
  if (f == "cos") return std::cos(a[0]);
  if (f == "exp") return std::exp(a[0]);
  if (f == "tanh") return std::tanh(a[0]);
  if (f == "abs") return std::abs(a[0]);
  if (f == "sqrt") return std::sqrt(a[0]);
  if (f == "min") return std::min(a[0], a[1]);
  if (f == "max") return std::max(a[0], a[1]);
  throw std::logic_error("unknown function " + f);
}

}  // namespace

std::string expr_print(const ExprPtr& e) {
  std::ostringstream os;
  print_rec(e, os);
  return os.str();
}

ExprPtr expr_fold(const ExprPtr& e) {
  if (e->args.empty()) return e;
  std::vector<ExprPtr> folded;
  folded.reserve(e->args.size());
  bool all_const = true, changed = false;
  for (const auto& a : e->args) {
    ExprPtr f = expr_fold(a);
    changed = changed || f != a;
    all_const = all_const && is_const(f);
    folded.push_back(std::move(f));
  }
  if (all_const) {
    std::vector<double> v;
    for (const auto& f : folded) v.push_back(f->value);
    switch (e->op) {
      case Expr::Op::Add: return Expr::constant(v[0] + v[1]);
      case Expr::Op::Sub: return Expr::constant(v[0] - v[1]);
      case Expr::Op::Mul: return Expr::constant(v[0] * v[1]);
      case Expr::Op::Div: return Expr::constant(v[0] / v[1]);
      case Expr::Op::Pow: return Expr::constant(std::pow(v[0], v[1]));
      case Expr::Op::Neg: return Expr::constant(-v[0]);
      case Expr::Op::Call: return Expr::constant(apply_call(e->func, v));
      default: break;
    }
  }
  if (!changed) return e;
  auto out = std::make_shared<Expr>(*e);
  out->args = std::move(folded);
  return out;
}

ParseError::ParseError(std::string msg, size_t off, std::vector<std::string> exp)
    : std::runtime_error(msg + " at byte " + std::to_string(off)), offset(off), expected(std::move(exp)) {}

namespace {

class Parser {
 public:
  Parser(const std::string& text, int dim) : s_(text), dim_(dim) {}

  ExprPtr run() {
    ExprPtr e = parse_sum();
    skip_ws();
    if (pos_ != s_.size()) fail("unexpected trailing input", {"+", "-", "*", "/", "^", "end of input"});
    return expr_fold(e);
  }

 private:
  [[noreturn]] void fail(const std::string& msg, std::vector<std::string> expected) {
    throw ParseError(msg, pos_, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  char peek() {
    skip_ws();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  ExprPtr parse_sum() {
    ExprPtr e = parse_term();
    for (;;) {
      if (eat('+'))
        e = Expr::binary(Expr::Op::Add, e, parse_term());
      else if (eat('-'))
        e = Expr::binary(Expr::Op::Sub, e, parse_term());
      else
        return e;
    }
  }

  ExprPtr parse_term() {
    ExprPtr e = parse_unary();
    for (;;) {
      if (eat('*'))
        e = Expr::binary(Expr::Op::Mul, e, parse_unary());
      else if (eat('/'))
        e = Expr::binary(Expr::Op::Div, e, parse_unary());
      else
        return e;
    }
  }

  // Unary minus binds looser than '^', so -x^2 means -(x^2).
  ExprPtr parse_unary() {
    if (eat('-')) return Expr::unary(Expr::Op::Neg, parse_unary());
    return parse_power();
  }

  ExprPtr parse_power() {
    ExprPtr base = parse_primary();
    if (eat('^')) return Expr::binary(Expr::Op::Pow, base, parse_unary());
    return base;
  }

  ExprPtr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) fail("unexpected end of input", {"number", "identifier", "("});
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = parse_sum();
      if (!eat(')')) fail("missing closing parenthesis", {")"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) return parse_ident();
    fail("unexpected character", {"number", "identifier", "("});
  }

  ExprPtr parse_number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number", {"number"});
    pos_ += static_cast<size_t>(end - begin);
    return Expr::constant(v);
  }

  ExprPtr parse_ident() {
    const size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    if (name == "r") return Expr::radius();
    if (name.size() >= 2 && name[0] == 'x' &&
        name.find_first_not_of("0123456789", 1) == std::string::npos) {
      const int k = std::atoi(name.c_str() + 1);
      if (k < 1) {
        pos_ = start;
        fail("bad variable index", {"x1..x" + std::to_string(dim_)});
      }
      if (k > dim_) {
        pos_ = start;
        fail("variable index exceeds dimension", {"x1..x" + std::to_string(dim_)});
      }
      return Expr::variable(k - 1);
    }
    static const char* kUnary[] = {"sin", "cos", "exp", "tanh", "abs", "sqrt"};
    static const char* kBinary[] = {"min", "max"};
    for (const char* f : kUnary)
      if (name == f) {
        if (!eat('(')) fail("expected argument list", {"("});
        ExprPtr a = parse_sum();
        if (!eat(')')) fail("missing closing parenthesis", {")"});
        return Expr::call(name, {a});
      }
    for (const char* f : kBinary)
      if (name == f) {
        if (!eat('(')) fail("expected argument list", {"("});
        ExprPtr a = parse_sum();
        if (!eat(',')) fail("expected second argument", {","});
        ExprPtr b = parse_sum();
        if (!eat(')')) fail("missing closing parenthesis", {")"});
        return Expr::call(name, {a, b});
      }
    pos_ = start;
    fail("unknown identifier '" + name + "'",
         {"x1..x" + std::to_string(dim_), "r", "sin", "cos", "exp", "tanh", "abs", "sqrt", "min", "max"});
  }

  const std::string& s_;
  int dim_;
  size_t pos_ = 0;
};

// Scalar-generic evaluation; T is double or a dual number.
template <class T>
T eval_rec(const ExprPtr& e, const T* vars, int dim) {
  using std::abs;
  using std::cos;
  using std::exp;
  using std::max;
  using std::min;
  using std::pow;
  using std::sin;
  using std::sqrt;
  using std::tanh;
  switch (e->op) {
    case Expr::Op::Const:
      return T(e->value);
    case Expr::Op::Var:
      return vars[e->var];
    case Expr::Op::Radius: {
      T s(0.0);
      for (int i = 0; i < dim; ++i) s = s + vars[i] * vars[i];
      return sqrt(s);
    }
    case Expr::Op::Add:
      return eval_rec(e->args[0], vars, dim) + eval_rec(e->args[1], vars, dim);
    case Expr::Op::Sub:
      return eval_rec(e->args[0], vars, dim) - eval_rec(e->args[1], vars, dim);
    case Expr::Op::Mul:
      return eval_rec(e->args[0], vars, dim) * eval_rec(e->args[1], vars, dim);
    case Expr::Op::Div:
      return eval_rec(e->args[0], vars, dim) / eval_rec(e->args[1], vars, dim);
    case Expr::Op::Pow:
      return pow(eval_rec(e->args[0], vars, dim), eval_rec(e->args[1], vars, dim));
    case Expr::Op::Neg:
      return -eval_rec(e->args[0], vars, dim);
    case Expr::Op::Call: {
      const T a = eval_rec(e->args[0], vars, dim);
      if (e->func == "sin") return sin(a);
      if (e->func == "cos") return cos(a);
      if (e->func == "exp") return exp(a);
      if (e->func == "tanh") return tanh(a);
      if (e->func == "abs") return abs(a);
      if (e->func == "sqrt") return sqrt(a);
      const T b = eval_rec(e->args[1], vars, dim);
      if (e->func == "min") return min(a, b);
      return max(a, b);
    }
  }
  return T(0.0);
}

// First-order dual number for forward-mode differentiation.
struct Dual {
  double v = 0, d = 0;
  explicit Dual(double value = 0, double deriv = 0) : v(value), d(deriv) {}
};

inline Dual operator+(Dual a, Dual b) { return Dual(a.v + b.v, a.d + b.d); }
inline Dual operator-(Dual a, Dual b) { return Dual(a.v - b.v, a.d - b.d); }
inline Dual operator-(Dual a) { return Dual(-a.v, -a.d); }
inline Dual operator*(Dual a, Dual b) { return Dual(a.v * b.v, a.d * b.v + a.v * b.d); }
inline Dual operator/(Dual a, Dual b) {
  return Dual(a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v));
}
inline Dual sin(Dual a) { return Dual(std::sin(a.v), std::cos(a.v) * a.d); }
inline Dual cos(Dual a) { return Dual(std::cos(a.v), -std::sin(a.v) * a.d); }
inline Dual exp(Dual a) { return Dual(std::exp(a.v), std::exp(a.v) * a.d); }
inline Dual tanh(Dual a) {
  const double t = std::tanh(a.v);
  return Dual(t, (1.0 - t * t) * a.d);
}
inline Dual abs(Dual a) { return Dual(std::abs(a.v), (a.v < 0 ? -1.0 : 1.0) * a.d); }
inline Dual sqrt(Dual a) {
  const double s = std::sqrt(a.v);
  return Dual(s, 0.5 / s * a.d);
}
inline Dual min(Dual a, Dual b) { return a.v <= b.v ? a : b; }
inline Dual max(Dual a, Dual b) { return a.v >= b.v ? a : b; }
inline Dual pow(Dual a, Dual b) {
  const double p = std::pow(a.v, b.v);
  double d = 0;
  if (b.d == 0.0) {
    d = b.v * std::pow(a.v, b.v - 1.0) * a.d;  // common case: constant exponent
  } else {
    d = p * (b.d * std::log(a.v) + b.v * a.d / a.v);
  }
  return Dual(p, d);
}

}  // namespace

ExprPtr parse_expression(const std::string& text, int dimension) {
  if (dimension < 1 || dimension > 3) throw std::invalid_argument("dimension must be 1, 2 or 3");
  return Parser(text, dimension).run();
}

double expr_eval(const ExprPtr& e, const Point& x, int dimension) {
  double vars[3] = {x[0], x[1], x[2]};
  return eval_rec<double>(e, vars, dimension);
}

double expr_deriv(const ExprPtr& e, const Point& x, int dimension, int axis) {
  Dual vars[3] = {Dual(x[0]), Dual(x[1]), Dual(x[2])};
  vars[axis].d = 1.0;
  return eval_rec<Dual>(e, vars, dimension).d;
}

}  // namespace specgap
