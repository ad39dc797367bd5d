#pragma once

#include <algorithm>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "symclass/rational.hpp"

namespace symclass {

class ExprError : public std::runtime_error {
 public:
  explicit ExprError(const std::string& what) : std::runtime_error(what) {}
};

enum class ExprKind : uint8_t {
  Number,   // exact complex rational
  VarT,
  VarX,
  Param,    // named real parameter
  Sum,      // n-ary
  Product,  // n-ary
  Power,    // integer exponent, positive or negative
  Exp,
  Sin,
  Cos,
  FuncSym,  // opaque function symbol with formal derivatives
};

class Expr;
struct ExprNode;
using ExprNodeP = std::shared_ptr<const ExprNode>;

struct ExprNode {
  ExprKind kind;
  CRat value;              // Number
  std::string name;        // Param, FuncSym
  std::vector<Expr> kids;  // Sum, Product; single child for Power/Exp/Sin/Cos
  long exponent = 1;       // Power
  // FuncSym only:
  bool dep_t = false, dep_x = false;
  int dt = 0, dx = 0;
  bool conjugated = false;
};

/// Immutable symbolic expression over complex rationals, t, x, named real
/// parameters, closed under +, *, integer powers and exp/sin/cos of
/// subexpressions.  tan is rewritten to sin/cos at construction.
class Expr {
 public:
  Expr() : Expr(number(CRat(0))) {}

  static Expr number(CRat c) {
    ExprNode n;
    n.kind = ExprKind::Number;
    n.value = std::move(c);
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }
  static Expr integer(long v) { return number(CRat(v)); }
  static Expr rational(long n, long d) { return number(CRat(Rational(n, d))); }
  static Expr i() { return number(CRat::i()); }
  static Expr t() { return leaf(ExprKind::VarT); }
  static Expr x() { return leaf(ExprKind::VarX); }
  static Expr param(std::string name) {
    ExprNode n;
    n.kind = ExprKind::Param;
    n.name = std::move(name);
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }
  /// Opaque function symbol, e.g. func_sym("W", true, false) for W(t).
  static Expr func_sym(std::string name, bool dep_t, bool dep_x, int dt = 0, int dx = 0,
                       bool conjugated = false) {
    ExprNode n;
    n.kind = ExprKind::FuncSym;
    n.name = std::move(name);
    n.dep_t = dep_t;
    n.dep_x = dep_x;
    n.dt = dt;
    n.dx = dx;
    n.conjugated = conjugated;
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }

  const ExprNode& node() const { return *n_; }
  ExprKind kind() const { return n_->kind; }

  bool is_number() const { return n_->kind == ExprKind::Number; }
  bool is_zero_literal() const { return is_number() && n_->value.is_zero(); }
  bool is_one_literal() const { return is_number() && n_->value.is_one(); }

  friend Expr operator+(const Expr& a, const Expr& b) { return sum({a, b}); }
  friend Expr operator-(const Expr& a, const Expr& b) { return sum({a, -b}); }
  friend Expr operator-(const Expr& a) { return product({Expr::integer(-1), a}); }
  friend Expr operator*(const Expr& a, const Expr& b) { return product({a, b}); }
  friend Expr operator/(const Expr& a, const Expr& b) { return product({a, pow(b, -1)}); }

  /// n-ary sum with flattening and exact constant folding.
  static Expr sum(std::vector<Expr> terms) {
    std::vector<Expr> flat;
    CRat c(0);
    for (auto& e : terms) collect(e, ExprKind::Sum, c, flat, /*mul=*/false);
    if (flat.empty()) return number(c);
    if (!c.is_zero()) flat.insert(flat.begin(), number(c));
    if (flat.size() == 1) return flat[0];
    ExprNode n;
    n.kind = ExprKind::Sum;
    n.kids = std::move(flat);
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }

  /// n-ary product with flattening, constant folding, and zero collapse.
  static Expr product(std::vector<Expr> factors) {
    std::vector<Expr> flat;
    CRat c(1);
    for (auto& e : factors) {
      collect(e, ExprKind::Product, c, flat, /*mul=*/true);
      if (c.is_zero()) return number(CRat(0));
    }
    if (flat.empty()) return number(c);
    if (!c.is_one()) flat.insert(flat.begin(), number(c));
    if (flat.size() == 1) return flat[0];
    ExprNode n;
    n.kind = ExprKind::Product;
    n.kids = std::move(flat);
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }

  static Expr pow(const Expr& base, long k) {
    if (k == 0) return integer(1);
    if (k == 1) return base;
    if (base.is_number()) {
      if (base.n_->value.is_zero() && k < 0) throw ExprError("pow: zero base with negative exponent");
      return number(base.n_->value.pow(k));
    }
    if (base.kind() == ExprKind::Power) return pow(base.n_->kids[0], base.n_->exponent * k);
    ExprNode n;
    n.kind = ExprKind::Power;
    n.kids = {base};
    n.exponent = k;
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }

  static Expr exp(const Expr& u) {
    if (u.is_zero_literal()) return integer(1);
    return unary(ExprKind::Exp, u);
  }
  static Expr sin(const Expr& u) {
    if (u.is_zero_literal()) return integer(0);
    return unary(ExprKind::Sin, u);
  }
  static Expr cos(const Expr& u) {
    if (u.is_zero_literal()) return integer(1);
    return unary(ExprKind::Cos, u);
  }
  // tan is not a node kind: kept as sin/cos from the start.
  static Expr tan(const Expr& u) { return sin(u) / cos(u); }

 private:
  explicit Expr(ExprNodeP n) : n_(std::move(n)) {}

  static Expr leaf(ExprKind k) {
    ExprNode n;
    n.kind = k;
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }
  static Expr unary(ExprKind k, const Expr& u) {
    ExprNode n;
    n.kind = k;
    n.kids = {u};
    return Expr(std::make_shared<ExprNode>(std::move(n)));
  }
  static void collect(const Expr& e, ExprKind k, CRat& c, std::vector<Expr>& out, bool mul) {
    if (e.kind() == k) {
      for (const auto& kid : e.n_->kids) collect(kid, k, c, out, mul);
      return;
    }
    if (e.is_number()) {
      if (mul)
        c *= e.n_->value;
      else
        c += e.n_->value;
      return;
    }
    out.push_back(e);
  }

  ExprNodeP n_;
};

enum class Var : uint8_t { T, X };

inline bool depends_on(const Expr& e, Var v) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return false;
    case ExprKind::VarT:
      return v == Var::T;
    case ExprKind::VarX:
      return v == Var::X;
    case ExprKind::Param:
      return false;
    case ExprKind::FuncSym:
      return v == Var::T ? n.dep_t : n.dep_x;
    default:
      for (const auto& k : n.kids)
        if (depends_on(k, v)) return true;
      return false;
  }
}

inline bool contains_param(const Expr& e, const std::string& name) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::Param) return n.name == name;
  for (const auto& k : n.kids)
    if (contains_param(k, name)) return true;
  return false;
}

inline void collect_params(const Expr& e, std::vector<std::string>& out) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::Param) {
    if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
  }
  for (const auto& k : n.kids) collect_params(k, out);
}

inline bool contains_func_sym(const Expr& e) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::FuncSym) return true;
  for (const auto& k : n.kids)
    if (contains_func_sym(k)) return true;
  return false;
}

/// Exact derivative with respect to t or x.  Parameters are constants;
/// opaque function symbols pick up formal derivative indices.
inline Expr diff(const Expr& e, Var v) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
    case ExprKind::Param:
      return Expr::integer(0);
    case ExprKind::VarT:
      return v == Var::T ? Expr::integer(1) : Expr::integer(0);
    case ExprKind::VarX:
      return v == Var::X ? Expr::integer(1) : Expr::integer(0);
    case ExprKind::FuncSym: {
      bool dep = v == Var::T ? n.dep_t : n.dep_x;
      if (!dep) return Expr::integer(0);
      return Expr::func_sym(n.name, n.dep_t, n.dep_x, n.dt + (v == Var::T ? 1 : 0),
                            n.dx + (v == Var::X ? 1 : 0), n.conjugated);
    }
    case ExprKind::Sum: {
      std::vector<Expr> ds;
      ds.reserve(n.kids.size());
      for (const auto& k : n.kids) ds.push_back(diff(k, v));
      return Expr::sum(std::move(ds));
    }
    case ExprKind::Product: {
      std::vector<Expr> terms;
      for (size_t j = 0; j < n.kids.size(); ++j) {
        std::vector<Expr> fac;
        fac.reserve(n.kids.size());
        for (size_t m = 0; m < n.kids.size(); ++m) fac.push_back(m == j ? diff(n.kids[m], v) : n.kids[m]);
        terms.push_back(Expr::product(std::move(fac)));
      }
      return Expr::sum(std::move(terms));
    }
    case ExprKind::Power:
      return Expr::integer(n.exponent) * Expr::pow(n.kids[0], n.exponent - 1) * diff(n.kids[0], v);
    case ExprKind::Exp:
      return diff(n.kids[0], v) * e;
    case ExprKind::Sin:
      return diff(n.kids[0], v) * Expr::cos(n.kids[0]);
    case ExprKind::Cos:
      return -(diff(n.kids[0], v) * Expr::sin(n.kids[0]));
  }
  throw ExprError("diff: unreachable");
}

/// Simultaneous substitution bindings: variables, parameters and opaque
/// function symbols (the latter by base name; derivative indices are applied
/// to the replacement).
struct Bindings {
  Expr for_t;
  Expr for_x;
  bool bind_t = false, bind_x = false;
  std::map<std::string, Expr> params;
  std::map<std::string, Expr> funcs;

  static Bindings none() { return Bindings{}; }
  Bindings& t(Expr e) {
    for_t = std::move(e);
    bind_t = true;
    return *this;
  }
  Bindings& x(Expr e) {
    for_x = std::move(e);
    bind_x = true;
    return *this;
  }
  Bindings& param(const std::string& name, Expr e) {
    params[name] = std::move(e);
    return *this;
  }
  Bindings& func(const std::string& name, Expr e) {
    funcs[name] = std::move(e);
    return *this;
  }
};

Expr conj(const Expr& e);

inline Expr substitute(const Expr& e, const Bindings& b) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return e;
    case ExprKind::VarT:
      return b.bind_t ? b.for_t : e;
    case ExprKind::VarX:
      return b.bind_x ? b.for_x : e;
    case ExprKind::Param: {
      auto it = b.params.find(n.name);
      return it == b.params.end() ? e : it->second;
    }
    case ExprKind::FuncSym: {
      auto it = b.funcs.find(n.name);
      if (it == b.funcs.end()) {
        // variable substitution cannot reach inside an opaque symbol
        bool t_moved = b.bind_t && n.dep_t && b.for_t.kind() != ExprKind::VarT;
        bool x_moved = b.bind_x && n.dep_x && b.for_x.kind() != ExprKind::VarX;
        if (t_moved || x_moved)
          throw ExprError("substitute: cannot rewrite variables inside opaque symbol '" +
                          n.name + "'");
        return e;
      }
      Expr r = it->second;
      if (n.conjugated) r = conj(r);
      for (int j = 0; j < n.dt; ++j) r = diff(r, Var::T);
      for (int j = 0; j < n.dx; ++j) r = diff(r, Var::X);
      return r;
    }
    case ExprKind::Sum:
    case ExprKind::Product: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const auto& k : n.kids) kids.push_back(substitute(k, b));
      return n.kind == ExprKind::Sum ? Expr::sum(std::move(kids)) : Expr::product(std::move(kids));
    }
    case ExprKind::Power:
      return Expr::pow(substitute(n.kids[0], b), n.exponent);
    case ExprKind::Exp:
      return Expr::exp(substitute(n.kids[0], b));
    case ExprKind::Sin:
      return Expr::sin(substitute(n.kids[0], b));
    case ExprKind::Cos:
      return Expr::cos(substitute(n.kids[0], b));
  }
  throw ExprError("substitute: unreachable");
}

/// Complex conjugate, with t, x and parameters treated as real.
inline Expr conj(const Expr& e) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return Expr::number(n.value.conj());
    case ExprKind::VarT:
    case ExprKind::VarX:
    case ExprKind::Param:
      return e;
    case ExprKind::FuncSym:
      return Expr::func_sym(n.name, n.dep_t, n.dep_x, n.dt, n.dx, !n.conjugated);
    case ExprKind::Sum:
    case ExprKind::Product: {
      std::vector<Expr> kids;
      kids.reserve(n.kids.size());
      for (const auto& k : n.kids) kids.push_back(conj(k));
      return n.kind == ExprKind::Sum ? Expr::sum(std::move(kids)) : Expr::product(std::move(kids));
    }
    case ExprKind::Power:
      return Expr::pow(conj(n.kids[0]), n.exponent);
    case ExprKind::Exp:
      return Expr::exp(conj(n.kids[0]));
    case ExprKind::Sin:
      return Expr::sin(conj(n.kids[0]));
    case ExprKind::Cos:
      return Expr::cos(conj(n.kids[0]));
  }
  throw ExprError("conj: unreachable");
}

inline Expr real_part(const Expr& e) { return (e + conj(e)) * Expr::rational(1, 2); }
inline Expr imag_part(const Expr& e) {
  return (e - conj(e)) * Expr::rational(1, 2) * Expr::number(CRat(Rational(0), Rational(-1)));
}

namespace detail {

inline int precedence(ExprKind k) {
  switch (k) {
    case ExprKind::Sum:
      return 1;
    case ExprKind::Product:
      return 2;
    case ExprKind::Power:
      return 3;
    default:
      return 4;
  }
}

inline std::string number_to_string(const CRat& c) {
  if (c.im == 0) {
    std::string s = rational_to_string(c.re);
    return s;
  }
  std::string s;
  if (c.re == 0) {
    if (c.im == 1) return "i";
    if (c.im == -1) return "-i";
    return rational_to_string(c.im) + "*i";
  }
  s = "(" + rational_to_string(c.re);
  if (c.im > 0)
    s += c.im == 1 ? "+i" : "+" + rational_to_string(c.im) + "*i";
  else
    s += c.im == -1 ? "-i" : "-" + rational_to_string(-c.im) + "*i";
  return s + ")";
}

inline std::string print_rec(const Expr& e, int parent_prec) {
  const ExprNode& n = e.node();
  std::string s;
  int prec = precedence(n.kind);
  switch (n.kind) {
    case ExprKind::Number: {
      s = number_to_string(n.value);
      if ((n.value.re < 0 || (n.value.re == 0 && n.value.im < 0)) && parent_prec >= 2 && s[0] == '-')
        return "(" + s + ")";
      bool has_op = s.find('+') != std::string::npos || s.find('/') != std::string::npos ||
                    (s.find('*') != std::string::npos);
      if (has_op && s[0] != '(' && parent_prec >= 2) return "(" + s + ")";
      return s;
    }
    case ExprKind::VarT:
      return "t";
    case ExprKind::VarX:
      return "x";
    case ExprKind::Param:
      return n.name;
    case ExprKind::FuncSym: {
      s = n.name;
      if (n.dt || n.dx) {
        s += "_";
        for (int j = 0; j < n.dt; ++j) s += "t";
        for (int j = 0; j < n.dx; ++j) s += "x";
      }
      if (n.conjugated) s += "~";  // printed marker only; not part of the input grammar
      return s;
    }
    case ExprKind::Sum: {
      for (size_t j = 0; j < n.kids.size(); ++j) {
        std::string part = print_rec(n.kids[j], prec);
        if (j == 0) {
          s = part;
        } else if (!part.empty() && part[0] == '-') {
          s += " - " + part.substr(1);
        } else {
          s += " + " + part;
        }
      }
      break;
    }
    case ExprKind::Product: {
      for (size_t j = 0; j < n.kids.size(); ++j) {
        if (j) s += "*";
        s += print_rec(n.kids[j], prec);
      }
      break;
    }
    case ExprKind::Power: {
      s = print_rec(n.kids[0], prec + 1) + "^" + std::to_string(n.exponent);
      break;
    }
    case ExprKind::Exp:
      return "exp(" + print_rec(n.kids[0], 0) + ")";
    case ExprKind::Sin:
      return "sin(" + print_rec(n.kids[0], 0) + ")";
    case ExprKind::Cos:
      return "cos(" + print_rec(n.kids[0], 0) + ")";
  }
  if (prec < parent_prec || (n.kind == ExprKind::Power && parent_prec > 3)) s = "(" + s + ")";
  return s;
}

}  // namespace detail

/// Grammar-conformant rendering; parse(to_string(e)) is semantically e.
inline std::string to_string(const Expr& e) { return detail::print_rec(e, 0); }

}  // namespace symclass
