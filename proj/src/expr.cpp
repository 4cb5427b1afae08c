#include "homobl/expr.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "homobl/error.hpp"

namespace homobl {

struct Expression::Node {
  enum class Kind { Number, Variable, Neg, Add, Sub, Mul, Div, Pow, Call };
  Kind kind = Kind::Number;
  double value = 0.0;
  int slot = -1;
  double (*fn)(double) = nullptr;
  std::shared_ptr<const Node> lhs, rhs;

  double eval(std::span<const double> v) const {
    switch (kind) {
      case Kind::Number: return value;
      case Kind::Variable: return v[slot];
      case Kind::Neg: return -lhs->eval(v);
      case Kind::Add: return lhs->eval(v) + rhs->eval(v);
      case Kind::Sub: return lhs->eval(v) - rhs->eval(v);
      case Kind::Mul: return lhs->eval(v) * rhs->eval(v);
      case Kind::Div: return lhs->eval(v) / rhs->eval(v);
      case Kind::Pow: return std::pow(lhs->eval(v), rhs->eval(v));
      case Kind::Call: return fn(lhs->eval(v));
    }
    return 0.0;
  }

  bool uses_variables() const {
    if (kind == Kind::Variable) return true;
    return (lhs && lhs->uses_variables()) || (rhs && rhs->uses_variables());
  }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Kind = Expression::Node::Kind;

NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<Expression::Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

struct FunctionEntry {
  const char* name;
  double (*fn)(double);
};

double fabs_(double x) { return std::fabs(x); }
double sin_(double x) { return std::sin(x); }
double cos_(double x) { return std::cos(x); }
double tan_(double x) { return std::tan(x); }
double exp_(double x) { return std::exp(x); }
double log_(double x) { return std::log(x); }
double sqrt_(double x) { return std::sqrt(x); }
double tanh_(double x) { return std::tanh(x); }
double cosh_(double x) { return std::cosh(x); }
double sinh_(double x) { return std::sinh(x); }

constexpr FunctionEntry kFunctions[] = {
    {"sin", sin_},   {"cos", cos_},   {"tan", tan_},   {"exp", exp_},   {"log", log_},
    {"sqrt", sqrt_}, {"abs", fabs_},  {"tanh", tanh_}, {"cosh", cosh_}, {"sinh", sinh_},
};

class Parser {
 public:
  Parser(const std::string& src, const std::vector<std::string>& vars) : s_(src), vars_(vars) {}

  NodePtr parse() {
    auto n = expression();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error("formula \"" + s_ + "\": " + msg + " at position " + std::to_string(pos_));
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expression() {
    auto n = term();
    for (;;) {
      if (accept('+')) n = make(Kind::Add, n, term());
      else if (accept('-')) n = make(Kind::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    auto n = unary();
    for (;;) {
      if (accept('*')) n = make(Kind::Mul, n, unary());
      else if (accept('/')) n = make(Kind::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Kind::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Kind::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    const char c = s_[pos_];
    if (accept('(')) {
      auto n = expression();
      if (!accept(')')) fail("missing ')'");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  NodePtr number() {
    const char* begin = s_.c_str() + pos_;
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin) fail("malformed number");
    pos_ += static_cast<std::size_t>(end - begin);
    auto n = std::make_shared<Expression::Node>();
    n->kind = Kind::Number;
    n->value = v;
    return n;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() &&
           (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    const std::string name = s_.substr(start, pos_ - start);
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if (vars_[k] == name) {
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Variable;
        n->slot = static_cast<int>(k);
        return n;
      }
    }
    if (name == "pi" || name == "e") {
      auto n = std::make_shared<Expression::Node>();
      n->kind = Kind::Number;
      n->value = name == "pi" ? std::numbers::pi : std::numbers::e;
      return n;
    }
    for (const auto& f : kFunctions) {
      if (name == f.name) {
        if (!accept('(')) fail("expected '(' after " + name);
        auto arg = expression();
        if (!accept(')')) fail("missing ')'");
        auto n = std::make_shared<Expression::Node>();
        n->kind = Kind::Call;
        n->fn = f.fn;
        n->lhs = arg;
        return n;
      }
    }
    fail("unknown identifier '" + name + "'");
  }

  const std::string& s_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression(std::string source, std::vector<std::string> variables)
    : source_(std::move(source)), variables_(std::move(variables)) {
  root_ = Parser(source_, variables_).parse();
}

double Expression::operator()(std::span<const double> values) const {
  if (!root_) throw Error("evaluating an empty formula");
  if (values.size() < variables_.size()) throw ShapeError("formula \"" + source_ + "\": too few values");
  return root_->eval(values);
}

double Expression::evaluate(std::initializer_list<double> values) const {
  return (*this)(std::span<const double>(values.begin(), values.size()));
}

bool Expression::is_constant() const { return root_ && !root_->uses_variables(); }

double evaluate_constant(const std::string& source) {
  Expression e(source, {});
  return e(std::span<const double>{});
}

}  // namespace homobl
