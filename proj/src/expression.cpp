#include "afmass/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "afmass/error.hpp"

namespace afmass::geometry {
namespace detail {

enum class Op { Constant, Variable, Add, Sub, Mul, Div, Pow, Neg, Sqrt, Exp, Log };

struct Node {
  Op op;
  double constant = 0.0;
  std::shared_ptr<const Node> lhs;
  std::shared_ptr<const Node> rhs;
  bool depends_on_r = false;
};

}  // namespace detail

namespace {

using detail::Node;
using detail::Op;
using NodePtr = std::shared_ptr<const Node>;

NodePtr constant(double c) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->constant = c;
  return n;
}

NodePtr variable() {
  auto n = std::make_shared<Node>();
  n->op = Op::Variable;
  n->depends_on_r = true;
  return n;
}

bool is_const(const NodePtr& n, double c) { return n->op == Op::Constant && n->constant == c; }

double apply(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return std::pow(a, b);
    case Op::Neg: return -a;
    case Op::Sqrt: return std::sqrt(a);
    case Op::Exp: return std::exp(a);
    case Op::Log: return std::log(a);
    default: return 0.0;
  }
}

// Smart constructors fold constants and drop neutral elements so that
// derivative trees stay small.
NodePtr make(Op op, NodePtr a, NodePtr b = nullptr) {
  const bool unary = (b == nullptr);
  if (a->op == Op::Constant && (unary || b->op == Op::Constant)) {
    const double v = apply(op, a->constant, unary ? 0.0 : b->constant);
    if (std::isfinite(v)) return constant(v);
  }
  switch (op) {
    case Op::Add:
      if (is_const(a, 0.0)) return b;
      if (is_const(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_const(b, 0.0)) return a;
      if (is_const(a, 0.0)) return make(Op::Neg, b);
      break;
    case Op::Mul:
      if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
      if (is_const(a, 1.0)) return b;
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_const(a, 0.0)) return constant(0.0);
      if (is_const(b, 1.0)) return a;
      break;
    case Op::Pow:
      if (is_const(b, 1.0)) return a;
      if (is_const(b, 0.0)) return constant(1.0);
      break;
    case Op::Neg:
      if (a->op == Op::Neg) return a->lhs;
      break;
    default: break;
  }
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(a);
  n->rhs = std::move(b);
  n->depends_on_r = n->lhs->depends_on_r || (n->rhs && n->rhs->depends_on_r);
  return n;
}

NodePtr differentiate(const NodePtr& n) {
  if (!n->depends_on_r) return constant(0.0);
  const NodePtr& a = n->lhs;
  const NodePtr& b = n->rhs;
  switch (n->op) {
    case Op::Variable: return constant(1.0);
    case Op::Add: return make(Op::Add, differentiate(a), differentiate(b));
    case Op::Sub: return make(Op::Sub, differentiate(a), differentiate(b));
    case Op::Mul:
      return make(Op::Add, make(Op::Mul, differentiate(a), b), make(Op::Mul, a, differentiate(b)));
    case Op::Div:
      if (!b->depends_on_r) return make(Op::Div, differentiate(a), b);
      return make(Op::Div,
                  make(Op::Sub, make(Op::Mul, differentiate(a), b), make(Op::Mul, a, differentiate(b))),
                  make(Op::Pow, b, constant(2.0)));
    case Op::Pow:
      if (!b->depends_on_r) {
        return make(Op::Mul, make(Op::Mul, b, make(Op::Pow, a, make(Op::Sub, b, constant(1.0)))),
                    differentiate(a));
      }
      // d(a^b) = a^b (b' log a + b a' / a)
      return make(Op::Mul, n,
                  make(Op::Add, make(Op::Mul, differentiate(b), make(Op::Log, a)),
                       make(Op::Div, make(Op::Mul, b, differentiate(a)), a)));
    case Op::Neg: return make(Op::Neg, differentiate(a));
    case Op::Sqrt:
      return make(Op::Div, differentiate(a), make(Op::Mul, constant(2.0), n));
    case Op::Exp: return make(Op::Mul, n, differentiate(a));
    case Op::Log: return make(Op::Div, differentiate(a), a);
    default: return constant(0.0);
  }
}

double evaluate(const Node& n, double r) {
  switch (n.op) {
    case Op::Constant: return n.constant;
    case Op::Variable: return r;
    default: break;
  }
  const double a = evaluate(*n.lhs, r);
  double b = 0.0;
  if (n.rhs) b = evaluate(*n.rhs, r);
  switch (n.op) {
    case Op::Div:
      if (b == 0.0) throw EvaluationError("division by zero", r);
      break;
    case Op::Pow:
      if (a < 0.0 && std::nearbyint(b) != b) {
        throw EvaluationError("negative base raised to a non-integer power", r);
      }
      if (a == 0.0 && b < 0.0) throw EvaluationError("zero raised to a negative power", r);
      break;
    case Op::Sqrt:
      if (a < 0.0) throw EvaluationError("sqrt of a negative value", r);
      break;
    case Op::Log:
      if (a <= 0.0) throw EvaluationError("log of a nonpositive value", r);
      break;
    default: break;
  }
  const double v = apply(n.op, a, b);
  if (!std::isfinite(v)) throw EvaluationError("non-finite intermediate value", r);
  return v;
}

void print(const Node& n, std::ostream& os) {
  auto bin = [&](const char* sym) {
    os << '(';
    print(*n.lhs, os);
    os << ' ' << sym << ' ';
    print(*n.rhs, os);
    os << ')';
  };
  auto call = [&](const char* name) {
    os << name << '(';
    print(*n.lhs, os);
    os << ')';
  };
  switch (n.op) {
    case Op::Constant: os << n.constant; break;
    case Op::Variable: os << 'r'; break;
    case Op::Add: bin("+"); break;
    case Op::Sub: bin("-"); break;
    case Op::Mul: bin("*"); break;
    case Op::Div: bin("/"); break;
    case Op::Pow: bin("^"); break;
    case Op::Neg: os << "(-"; print(*n.lhs, os); os << ')'; break;
    case Op::Sqrt: call("sqrt"); break;
    case Op::Exp: call("exp"); break;
    case Op::Log: call("log"); break;
  }
}

std::string to_text(const NodePtr& n) {
  std::ostringstream os;
  os.precision(17);
  print(*n, os);
  return os.str();
}

class Parser {
 public:
  Parser(std::string_view src, const RadialExpression::Parameters& params)
      : src_(src), params_(params) {}

  NodePtr parse() {
    NodePtr e = expression();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected character '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    NodePtr lhs = term();
    while (true) {
      if (accept('+')) lhs = make(Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    NodePtr lhs = unary();
    while (true) {
      if (accept('*')) lhs = make(Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (accept('^')) return make(Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of expression");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr e = expression();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected character '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + pos_, src_.data() + src_.size(), v);
    if (ec != std::errc() || ptr == src_.data() + pos_) fail("malformed number");
    pos_ = static_cast<std::size_t>(ptr - src_.data());
    if (!std::isfinite(v)) {
      pos_ = start;
      fail("number out of range");
    }
    return constant(v);
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = src_.substr(start, pos_ - start);
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == '(') {
      Op op;
      if (name == "sqrt") op = Op::Sqrt;
      else if (name == "exp") op = Op::Exp;
      else if (name == "log") op = Op::Log;
      else {
        pos_ = start;
        fail("unknown function '" + std::string(name) + "'");
      }
      ++pos_;
      NodePtr arg = expression();
      if (!accept(')')) fail("expected ')' after function argument");
      return make(op, arg);
    }
    if (name == "r") return variable();
    if (name == "pi") return constant(std::numbers::pi);
    if (auto it = params_.find(name); it != params_.end()) return constant(it->second);
    pos_ = start;
    fail("unknown identifier '" + std::string(name) + "'");
  }

  std::string_view src_;
  const RadialExpression::Parameters& params_;
  std::size_t pos_ = 0;
};

}  // namespace

RadialExpression RadialExpression::parse(std::string_view source, const Parameters& parameters) {
  RadialExpression e;
  e.source_ = std::string(source);
  e.value_ = Parser(source, parameters).parse();
  e.d1_ = differentiate(e.value_);
  e.d2_ = differentiate(e.d1_);
  return e;
}

double RadialExpression::value(double r) const { return evaluate(*value_, r); }
double RadialExpression::derivative(double r) const { return evaluate(*d1_, r); }
double RadialExpression::second_derivative(double r) const { return evaluate(*d2_, r); }

Jet RadialExpression::jet(double r) const {
  return {evaluate(*value_, r), evaluate(*d1_, r), evaluate(*d2_, r)};
}

std::string RadialExpression::to_string() const { return to_text(value_); }
std::string RadialExpression::derivative_to_string() const { return to_text(d1_); }
std::string RadialExpression::second_derivative_to_string() const { return to_text(d2_); }

}  // namespace afmass::geometry
