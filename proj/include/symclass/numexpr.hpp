#pragma once

// Numeric-only expression layer: the exact grammar extended with log, atan,
// sqrt, sinh, cosh, tanh and sech.  Used for inverse time maps that leave
// the exact class and for named solution seeds; carries no exactness claims.

#include <cctype>
#include <complex>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "symclass/eval.hpp"
#include "symclass/expr.hpp"
#include "symclass/parse.hpp"

namespace symclass::numexpr {

enum class Fn { Exp, Sin, Cos, Tan, Log, Atan, Sqrt, Sinh, Cosh, Tanh, Sech };

struct Node;
using NodeP = std::shared_ptr<const Node>;

struct Node {
  enum class Kind { Num, VarT, VarX, Param, Sum, Product, Power, Call } kind;
  double value = 0;
  std::string name;
  std::vector<NodeP> kids;
  long exponent = 1;
  Fn fn = Fn::Exp;
};

class NumExpr {
 public:
  NumExpr() : n_(number(0).n_) {}
  explicit NumExpr(NodeP n) : n_(std::move(n)) {}

  static NumExpr number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::Num;
    n->value = v;
    return NumExpr(std::move(n));
  }

  const Node& node() const { return *n_; }
  NodeP node_ptr() const { return n_; }
  bool valid() const { return n_ != nullptr; }

  template <class C>
  C eval(const EvalPoint<C>& pt) const {
    return eval_node(*n_, pt);
  }

  std::complex<double> at(double t, double x = 0.0,
                          const std::map<std::string, std::complex<double>>& params = {}) const {
    EvalPoint<std::complex<double>> pt;
    pt.t = t;
    pt.x = x;
    pt.params = params;
    return eval(pt);
  }

  /// Splice: replace the time variable with another numeric expression.
  NumExpr compose_t(const NumExpr& inner) const { return NumExpr(splice(n_, inner.n_)); }

 private:
  NodeP n_;

  static NodeP splice(const NodeP& n, const NodeP& inner) {
    if (n->kind == Node::Kind::VarT) return inner;
    auto c = std::make_shared<Node>(*n);
    for (auto& k : c->kids) k = splice(k, inner);
    return c;
  }

  template <class C>
  static C eval_node(const Node& n, const EvalPoint<C>& pt) {
    switch (n.kind) {
      case Node::Kind::Num:
        return C(n.value);
      case Node::Kind::VarT:
        return pt.t;
      case Node::Kind::VarX:
        return pt.x;
      case Node::Kind::Param: {
        auto it = pt.params.find(n.name);
        if (it == pt.params.end())
          throw EvalError(EvalError::Kind::UnboundParam, "unbound parameter '" + n.name + "'");
        return it->second;
      }
      case Node::Kind::Sum: {
        C acc{};
        for (const auto& k : n.kids) acc = acc + eval_node(*k, pt);
        return acc;
      }
      case Node::Kind::Product: {
        C acc = C(1.0);
        for (const auto& k : n.kids) acc = acc * eval_node(*k, pt);
        return acc;
      }
      case Node::Kind::Power: {
        C b = eval_node(*n.kids[0], pt);
        long k = n.exponent;
        if (k < 0) {
          b = C(1.0) / b;
          k = -k;
        }
        C acc = C(1.0);
        for (long j = 0; j < k; ++j) acc = acc * b;
        return acc;
      }
      case Node::Kind::Call: {
        C a = eval_node(*n.kids[0], pt);
        using std::atan;
        using std::cos;
        using std::cosh;
        using std::exp;
        using std::log;
        using std::sin;
        using std::sinh;
        using std::sqrt;
        using std::tanh;
        switch (n.fn) {
          case Fn::Exp:
            return exp(a);
          case Fn::Sin:
            return sin(a);
          case Fn::Cos:
            return cos(a);
          case Fn::Tan:
            return sin(a) / cos(a);
          case Fn::Log:
            return log(a);
          case Fn::Atan:
            return atan(a);
          case Fn::Sqrt:
            return sqrt(a);
          case Fn::Sinh:
            return (exp(a) - C(1.0) / exp(a)) * C(0.5);
          case Fn::Cosh:
            return cosh(a);
          case Fn::Tanh:
            return tanh(a);
          case Fn::Sech:
            return C(1.0) / cosh(a);
        }
        throw ExprError("numexpr eval: unreachable");
      }
    }
    throw ExprError("numexpr eval: unreachable");
  }
};

namespace detail {

class NumParser {
 public:
  explicit NumParser(std::string s) : s_(std::move(s)) {}

  NumExpr run() {
    NumExpr e = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(pos_, "unexpected trailing input");
    return e;
  }

 private:
  std::string s_;
  size_t pos_ = 0;

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }

  static NodeP mk(Node n) { return std::make_shared<Node>(std::move(n)); }

  NumExpr expr() {
    std::vector<NodeP> terms;
    bool neg = peek() == '-';
    if (neg || peek() == '+') ++pos_;
    NodeP first = term();
    if (neg) {
      Node prod;
      prod.kind = Node::Kind::Product;
      Node m1;
      m1.kind = Node::Kind::Num;
      m1.value = -1;
      prod.kids = {mk(std::move(m1)), first};
      first = mk(std::move(prod));
    }
    terms.push_back(first);
    while (peek() == '+' || peek() == '-') {
      bool n2 = s_[pos_] == '-';
      ++pos_;
      NodeP t = term();
      if (n2) {
        Node prod;
        prod.kind = Node::Kind::Product;
        Node m1;
        m1.kind = Node::Kind::Num;
        m1.value = -1;
        prod.kids = {mk(std::move(m1)), t};
        t = mk(std::move(prod));
      }
      terms.push_back(t);
    }
    if (terms.size() == 1) return NumExpr(terms[0]);
    Node sum;
    sum.kind = Node::Kind::Sum;
    sum.kids = std::move(terms);
    return NumExpr(mk(std::move(sum)));
  }

  NodeP term() {
    NodeP acc = factor();
    while (peek() == '*' || peek() == '/') {
      bool div = s_[pos_] == '/';
      ++pos_;
      NodeP f = factor();
      if (div) {
        Node pw;
        pw.kind = Node::Kind::Power;
        pw.kids = {f};
        pw.exponent = -1;
        f = mk(std::move(pw));
      }
      Node prod;
      prod.kind = Node::Kind::Product;
      prod.kids = {acc, f};
      acc = mk(std::move(prod));
    }
    return acc;
  }

  NodeP factor() {
    NodeP b = base();
    if (peek() == '^') {
      ++pos_;
      skip();
      bool neg = false;
      if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
        neg = s_[pos_] == '-';
        ++pos_;
      }
      if (pos_ >= s_.size() || !std::isdigit(static_cast<unsigned char>(s_[pos_])))
        throw ParseError(pos_, "expected integer exponent");
      long v = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_])))
        v = v * 10 + (s_[pos_++] - '0');
      Node pw;
      pw.kind = Node::Kind::Power;
      pw.kids = {b};
      pw.exponent = neg ? -v : v;
      return mk(std::move(pw));
    }
    return b;
  }

  NodeP base() {
    skip();
    if (pos_ >= s_.size()) throw ParseError(pos_, "unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      NumExpr e = expr();
      skip();
      if (pos_ >= s_.size() || s_[pos_] != ')') throw ParseError(pos_, "expected ')'");
      ++pos_;
      return NodeP(e.node_ptr());
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t end = pos_;
      while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) ||
                                 s_[end] == '.' || s_[end] == 'e' || s_[end] == 'E' ||
                                 ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                                  (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
        ++end;
      Node n;
      n.kind = Node::Kind::Num;
      n.value = std::stod(s_.substr(pos_, end - pos_));
      pos_ = end;
      return mk(std::move(n));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::string name;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        name += s_[pos_++];
      if (name == "i") {
        // imaginary unit not supported in the numeric layer's real maps
        throw ParseError(pos_, "complex literals are not allowed in numeric transforms");
      }
      if (name == "t") {
        Node n;
        n.kind = Node::Kind::VarT;
        return mk(std::move(n));
      }
      if (name == "x") {
        Node n;
        n.kind = Node::Kind::VarX;
        return mk(std::move(n));
      }
      static const std::map<std::string, Fn> fns = {
          {"exp", Fn::Exp},   {"sin", Fn::Sin},   {"cos", Fn::Cos},  {"tan", Fn::Tan},
          {"log", Fn::Log},   {"atan", Fn::Atan}, {"sqrt", Fn::Sqrt}, {"sinh", Fn::Sinh},
          {"cosh", Fn::Cosh}, {"tanh", Fn::Tanh}, {"sech", Fn::Sech}};
      auto it = fns.find(name);
      if (peek() == '(') {
        if (it == fns.end()) throw ParseError(pos_, "unknown function '" + name + "'");
        ++pos_;
        NumExpr arg = expr();
        skip();
        if (pos_ >= s_.size() || s_[pos_] != ')') throw ParseError(pos_, "expected ')'");
        ++pos_;
        Node n;
        n.kind = Node::Kind::Call;
        n.fn = it->second;
        n.kids = {arg.node_ptr()};
        return mk(std::move(n));
      }
      if (it != fns.end()) throw ParseError(pos_, "'" + name + "' must be applied");
      Node n;
      n.kind = Node::Kind::Param;
      n.name = name;
      return mk(std::move(n));
    }
    throw ParseError(pos_, std::string("unexpected character '") + c + "'");
  }
};

}  // namespace detail

inline NumExpr parse_numeric(const std::string& text) { return detail::NumParser(text).run(); }

/// Lower an exact expression into the numeric layer.
inline NumExpr from_expr(const Expr& e) { return parse_numeric(to_string(e)); }

}  // namespace symclass::numexpr
