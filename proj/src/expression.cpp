#include "frontier/expression.hpp"

#include <cctype>
#include <cmath>
#include <vector>

#include "frontier/errors.hpp"

namespace frontier {

struct Expression::Node {
  enum class Op { Const, T, X, U, Neg, Add, Sub, Mul, Div, Pow, Exp, Sin };
  Op op = Op::Const;
  double value = 0;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;

NodePtr make(Node::Op op, NodePtr lhs = nullptr, NodePtr rhs = nullptr, double v = 0) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  n->value = v;
  return n;
}

class Parser {
public:
  explicit Parser(const std::string& s) : s_(s) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  bool uses_tx = false;

private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw DomainError("growth expression '" + s_ + "' at column " + std::to_string(pos_ + 1) +
                      ": " + msg);
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

  NodePtr expr() {
    auto lhs = term();
    for (;;) {
      if (accept('+')) lhs = make(Node::Op::Add, lhs, term());
      else if (accept('-')) lhs = make(Node::Op::Sub, lhs, term());
      else return lhs;
    }
  }

  NodePtr term() {
    auto lhs = unary();
    for (;;) {
      if (accept('*')) lhs = make(Node::Op::Mul, lhs, unary());
      else if (accept('/')) lhs = make(Node::Op::Div, lhs, unary());
      else return lhs;
    }
  }

  NodePtr unary() {
    if (accept('-')) return make(Node::Op::Neg, unary());
    if (accept('+')) return unary();
    return power();
  }

  // Right associative; binds tighter than unary minus on its left (-u^2 = -(u^2)).
  NodePtr power() {
    auto base = primary();
    if (accept('^')) return make(Node::Op::Pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (accept('(')) {
      auto e = expr();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v = 0;
      try {
        v = std::stod(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos_ += used;
      return make(Node::Op::Const, nullptr, nullptr, v);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      const std::string id = s_.substr(start, pos_ - start);
      if (id == "t") { uses_tx = true; return make(Node::Op::T); }
      if (id == "x") { uses_tx = true; return make(Node::Op::X); }
      if (id == "u") return make(Node::Op::U);
      if (id == "exp" || id == "sin") {
        if (!accept('(')) fail("expected '(' after " + id);
        auto arg = expr();
        if (!accept(')')) fail("expected ')'");
        return make(id == "exp" ? Node::Op::Exp : Node::Op::Sin, arg);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

double eval_node(const Node& n, double t, double x, double u) {
  switch (n.op) {
    case Node::Op::Const: return n.value;
    case Node::Op::T: return t;
    case Node::Op::X: return x;
    case Node::Op::U: return u;
    case Node::Op::Neg: return -eval_node(*n.lhs, t, x, u);
    case Node::Op::Add: return eval_node(*n.lhs, t, x, u) + eval_node(*n.rhs, t, x, u);
    case Node::Op::Sub: return eval_node(*n.lhs, t, x, u) - eval_node(*n.rhs, t, x, u);
    case Node::Op::Mul: return eval_node(*n.lhs, t, x, u) * eval_node(*n.rhs, t, x, u);
    case Node::Op::Div: return eval_node(*n.lhs, t, x, u) / eval_node(*n.rhs, t, x, u);
    case Node::Op::Pow: return std::pow(eval_node(*n.lhs, t, x, u), eval_node(*n.rhs, t, x, u));
    case Node::Op::Exp: return std::exp(eval_node(*n.lhs, t, x, u));
    case Node::Op::Sin: return std::sin(eval_node(*n.lhs, t, x, u));
  }
  return 0;
}

}  // namespace

Expression Expression::parse(const std::string& text) {
  Parser p(text);
  Expression e;
  e.root_ = p.parse();
  e.text_ = text;
  e.uses_tx_ = p.uses_tx;
  return e;
}

double Expression::eval(double t, double x, double u) const {
  return eval_node(*root_, t, x, u);
}

}  // namespace frontier
