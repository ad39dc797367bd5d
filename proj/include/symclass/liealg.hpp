#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symclass/canonical.hpp"
#include "symclass/parse.hpp"
#include "symclass/zero.hpp"

namespace symclass::lie {

/// Element of the ambient symmetry algebra in the (xi, chi, lam) chart:
/// Q = D(xi) + G(chi) + lam*M, with xi, chi, lam functions of t only.
struct AlgebraElement {
  Expr xi, chi, lam;

  AlgebraElement() = default;
  AlgebraElement(Expr xi_, Expr chi_, Expr lam_)
      : xi(std::move(xi_)), chi(std::move(chi_)), lam(std::move(lam_)) {
    for (const Expr* e : {&xi, &chi, &lam})
      if (depends_on(*e, Var::X))
        throw ExprError("AlgebraElement: coefficient functions must not involve x");
  }

  static AlgebraElement D(Expr xi) { return {std::move(xi), Expr::integer(0), Expr::integer(0)}; }
  static AlgebraElement G(Expr chi) { return {Expr::integer(0), std::move(chi), Expr::integer(0)}; }
  static AlgebraElement M(Expr lam) { return {Expr::integer(0), Expr::integer(0), std::move(lam)}; }

  friend AlgebraElement operator+(const AlgebraElement& a, const AlgebraElement& b) {
    return {a.xi + b.xi, a.chi + b.chi, a.lam + b.lam};
  }
  friend AlgebraElement operator-(const AlgebraElement& a, const AlgebraElement& b) {
    return {a.xi - b.xi, a.chi - b.chi, a.lam - b.lam};
  }
  friend AlgebraElement operator-(const AlgebraElement& a) { return {-a.xi, -a.chi, -a.lam}; }
  friend AlgebraElement operator*(const Expr& c, const AlgebraElement& a) {
    return {c * a.xi, c * a.chi, c * a.lam};
  }
};

inline bool is_zero_element(const AlgebraElement& q) {
  return is_zero(q.xi) && is_zero(q.chi) && is_zero(q.lam);
}

inline bool equal_elements(const AlgebraElement& a, const AlgebraElement& b) {
  return is_zero_element(a - b);
}

/// First-order operator coefficients: coef_t d_t + coef_x d_x with the
/// psi-channel multiplier eta_psi (eta = eta_psi * psi).
struct VectorField {
  Expr coef_t, coef_x, eta_psi;
};

/// Expansion of D(xi) + G(chi) + lam*M into vector-field coefficients:
///   coef_t = xi,  coef_x = xi_t x / 2 + chi,
///   eta_psi = i(xi_tt x^2 / 8 + chi_t x / 2 + lam) - xi_t / 2.
inline VectorField to_vector_field(const AlgebraElement& q) {
  Expr xi_t = diff(q.xi, Var::T);
  Expr xi_tt = diff(xi_t, Var::T);
  Expr chi_t = diff(q.chi, Var::T);
  Expr x = Expr::x();
  VectorField f;
  f.coef_t = q.xi;
  f.coef_x = Expr::rational(1, 2) * xi_t * x + q.chi;
  f.eta_psi = Expr::i() * (Expr::rational(1, 8) * xi_tt * x * x +
                           Expr::rational(1, 2) * chi_t * x + q.lam) -
              Expr::rational(1, 2) * xi_t;
  return f;
}

/// Lie bracket in the (xi, chi, lam) chart.
inline AlgebraElement bracket(const AlgebraElement& a, const AlgebraElement& b) {
  Expr half = Expr::rational(1, 2);
  Expr xi1t = diff(a.xi, Var::T), xi2t = diff(b.xi, Var::T);
  Expr chi1t = diff(a.chi, Var::T), chi2t = diff(b.chi, Var::T);
  Expr lam1t = diff(a.lam, Var::T), lam2t = diff(b.lam, Var::T);
  Expr xi = a.xi * xi2t - b.xi * xi1t;
  Expr chi = (a.xi * chi2t - half * xi1t * b.chi) - (b.xi * chi1t - half * xi2t * a.chi);
  Expr lam = a.xi * lam2t - b.xi * lam1t + half * (a.chi * chi2t - b.chi * chi1t);
  return {std::move(xi), std::move(chi), std::move(lam)};
}

/// Independent oracle: commutator computed directly from the vector-field
/// coefficients, Q1(f2) - Q2(f1) componentwise.
inline VectorField bracket_direct(const AlgebraElement& a, const AlgebraElement& b) {
  VectorField f1 = to_vector_field(a);
  VectorField f2 = to_vector_field(b);
  auto apply = [](const VectorField& f, const Expr& g) {
    return f.coef_t * diff(g, Var::T) + f.coef_x * diff(g, Var::X);
  };
  VectorField r;
  r.coef_t = apply(f1, f2.coef_t) - apply(f2, f1.coef_t);
  r.coef_x = apply(f1, f2.coef_x) - apply(f2, f1.coef_x);
  r.eta_psi = apply(f1, f2.eta_psi) - apply(f2, f1.eta_psi);
  return r;
}

inline bool equal_fields(const VectorField& a, const VectorField& b) {
  return is_zero(a.coef_t - b.coef_t) && is_zero(a.coef_x - b.coef_x) &&
         is_zero(a.eta_psi - b.eta_psi);
}

enum class Reflection { SpaceX, TimeT };

/// Adjoint action of the discrete reflections:
///   Ad I_x: (xi, chi, lam) -> (xi, -chi, lam)
///   Ad I_t: (xi, chi, lam) -> (-xi(-t), chi(-t), -lam(-t))
inline AlgebraElement ad_reflection(const AlgebraElement& q, Reflection which) {
  if (which == Reflection::SpaceX) return {q.xi, -q.chi, q.lam};
  Bindings flip = Bindings().t(-Expr::t());
  return {-substitute(q.xi, flip), substitute(q.chi, flip), -substitute(q.lam, flip)};
}

enum class OneDimClass { DType, GType, TMType, MType, Zero };

/// Canonical representative class of the one-dimensional subalgebra
/// spanned by q: D(1) if xi != 0; G(1) if xi = 0, chi != 0; tM if only
/// lam_t != 0; M if lam is a nonzero constant; zero otherwise.
inline OneDimClass one_dim_class(const AlgebraElement& q) {
  if (!is_zero(q.xi)) return OneDimClass::DType;
  if (!is_zero(q.chi)) return OneDimClass::GType;
  if (!is_zero(diff(q.lam, Var::T))) return OneDimClass::TMType;
  if (!is_zero(q.lam)) return OneDimClass::MType;
  return OneDimClass::Zero;
}

namespace detail {

inline std::string span_param_name(size_t k) { return "_spanc" + std::to_string(k); }

/// Linear equations (over Q) extracted from a channel expression that is
/// linear in the reserved span parameters.  Each non-parameter monomial of
/// the canonical numerator yields one complex equation.
struct LinearSystem {
  std::vector<std::vector<Rational>> rows;  // coefficients per unknown
  std::vector<Rational> rhs;
};

inline void collect_channel_equations(const Expr& channel, size_t nunknowns, LinearSystem& sys) {
  CanonicalForm cf = canonicalize(channel);
  if (cf.is_zero()) return;
  std::vector<std::optional<size_t>> unknown_of_gen(cf.gens.size());
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    if (cf.gens[j].kind == Generator::Kind::Param) {
      for (size_t k = 0; k < nunknowns; ++k)
        if (cf.gens[j].name == span_param_name(k)) unknown_of_gen[j] = k;
    }
  }
  // group numerator monomials by their non-unknown part
  std::map<poly::Exps, std::pair<std::vector<CRat>, CRat>> groups;
  for (const auto& [e, c] : cf.num) {
    poly::Exps base = e;
    std::optional<size_t> unknown;
    bool bad = false;
    for (size_t j = 0; j < e.size(); ++j) {
      if (unknown_of_gen[j] && e[j] != 0) {
        if (e[j] != 1 || unknown) bad = true;  // not linear in the unknowns
        unknown = unknown_of_gen[j];
        base[j] = 0;
      }
    }
    if (bad) throw std::logic_error("in_span: system not linear in span coefficients");
    auto& slot = groups[base];
    if (slot.first.empty()) slot.first.assign(nunknowns, CRat(0));
    if (unknown)
      slot.first[*unknown] += c;
    else
      slot.second += c;
  }
  for (auto& [base, eq] : groups) {
    // complex equation -> two rational rows; rhs carries the constant term
    std::vector<Rational> re_row(nunknowns), im_row(nunknowns);
    for (size_t k = 0; k < nunknowns; ++k) {
      re_row[k] = eq.first[k].re;
      im_row[k] = eq.first[k].im;
    }
    sys.rows.push_back(std::move(re_row));
    sys.rhs.push_back(-eq.second.re);
    sys.rows.push_back(std::move(im_row));
    sys.rhs.push_back(-eq.second.im);
  }
}

inline std::optional<std::vector<Rational>> solve_exact(LinearSystem sys, size_t n) {
  size_t m = sys.rows.size();
  std::vector<size_t> pivot_col;
  size_t row = 0;
  for (size_t col = 0; col < n && row < m; ++col) {
    size_t sel = m;
    for (size_t r = row; r < m; ++r)
      if (sys.rows[r][col] != 0) {
        sel = r;
        break;
      }
    if (sel == m) continue;
    std::swap(sys.rows[sel], sys.rows[row]);
    std::swap(sys.rhs[sel], sys.rhs[row]);
    Rational p = sys.rows[row][col];
    for (size_t c = col; c < n; ++c) sys.rows[row][c] /= p;
    sys.rhs[row] /= p;
    for (size_t r = 0; r < m; ++r) {
      if (r == row) continue;
      Rational f = sys.rows[r][col];
      if (f == 0) continue;
      for (size_t c = col; c < n; ++c) sys.rows[r][c] -= f * sys.rows[row][c];
      sys.rhs[r] -= f * sys.rhs[row];
    }
    pivot_col.push_back(col);
    ++row;
  }
  for (size_t r = row; r < m; ++r)
    if (sys.rhs[r] != 0) return std::nullopt;  // inconsistent
  std::vector<Rational> sol(n, Rational(0));
  for (size_t k = 0; k < pivot_col.size(); ++k) sol[pivot_col[k]] = sys.rhs[k];
  return sol;
}

}  // namespace detail

/// Real constants c_k with q = sum c_k basis_k, or nullopt.  The solution is
/// re-verified componentwise with the exact zero test.
inline std::optional<std::vector<Rational>> in_span(const AlgebraElement& q,
                                                    std::span<const AlgebraElement> basis) {
  size_t n = basis.size();
  for (size_t k = 0; k < n; ++k) {
    const std::string name = detail::span_param_name(k);
    auto uses = [&name](const AlgebraElement& e) {
      return contains_param(e.xi, name) || contains_param(e.chi, name) ||
             contains_param(e.lam, name);
    };
    if (uses(q)) throw ExprError("in_span: reserved parameter name in input");
    for (const auto& b : basis)
      if (uses(b)) throw ExprError("in_span: reserved parameter name in basis");
  }
  auto channel = [&](auto proj) {
    Expr e = proj(q);
    for (size_t k = 0; k < n; ++k)
      e = e - Expr::param(detail::span_param_name(k)) * proj(basis[k]);
    return e;
  };
  detail::LinearSystem sys;
  detail::collect_channel_equations(channel([](const AlgebraElement& a) { return a.xi; }), n, sys);
  detail::collect_channel_equations(channel([](const AlgebraElement& a) { return a.chi; }), n, sys);
  detail::collect_channel_equations(channel([](const AlgebraElement& a) { return a.lam; }), n, sys);
  auto sol = detail::solve_exact(std::move(sys), n);
  if (!sol) return std::nullopt;
  AlgebraElement acc = q;
  for (size_t k = 0; k < n; ++k) acc = acc - Expr::number(CRat((*sol)[k])) * basis[k];
  if (!is_zero_element(acc)) return std::nullopt;
  return sol;
}

/// Operator syntax: "D(<expr>)", "G(<expr>)", "M(<expr>)" combined with +, -
/// and rational scalar multiples, e.g. "D(2*t)+G(3*t^2)+M(t^3)" or "-2*M(1)".
inline AlgebraElement parse_operator(const std::string& text) {
  size_t pos = 0;
  auto skip_ws = [&] {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
  };
  AlgebraElement acc;
  bool first = true;
  while (true) {
    skip_ws();
    if (pos >= text.size()) {
      if (first) throw ParseError(pos, "empty operator expression");
      break;
    }
    bool neg = false;
    if (text[pos] == '+' || text[pos] == '-') {
      neg = text[pos] == '-';
      ++pos;
    } else if (!first) {
      throw ParseError(pos, "expected '+' or '-' between operator terms");
    }
    skip_ws();
    // optional rational scalar followed by '*'
    Expr scalar = Expr::integer(1);
    size_t save = pos;
    if (pos < text.size() && (std::isdigit(static_cast<unsigned char>(text[pos])) ||
                              text[pos] == '(')) {
      size_t scan = pos;
      int depth = 0;
      while (scan < text.size()) {
        char c = text[scan];
        if (c == '(') ++depth;
        if (c == ')') --depth;
        if (depth == 0 && c == '*') break;
        if (depth == 0 && (c == 'D' || c == 'G' || c == 'M')) break;
        ++scan;
      }
      if (scan < text.size() && text[scan] == '*') {
        Expr s = parse(text.substr(pos, scan - pos));
        if (!s.is_number()) throw ParseError(pos, "operator scalar must be a rational constant");
        if (!s.node().value.is_real())
          throw ParseError(pos, "operator scalars combine with real coefficients");
        scalar = s;
        pos = scan + 1;
      } else {
        pos = save;
      }
    }
    skip_ws();
    if (pos >= text.size() || (text[pos] != 'D' && text[pos] != 'G' && text[pos] != 'M'))
      throw ParseError(pos, "expected D(...), G(...) or M(...)");
    char head = text[pos];
    ++pos;
    skip_ws();
    if (pos >= text.size() || text[pos] != '(') throw ParseError(pos, "expected '('");
    int depth = 1;
    size_t arg_start = ++pos;
    while (pos < text.size() && depth > 0) {
      if (text[pos] == '(') ++depth;
      if (text[pos] == ')') --depth;
      ++pos;
    }
    if (depth != 0) throw ParseError(pos, "unbalanced parentheses in operator argument");
    Expr arg = parse(text.substr(arg_start, pos - 1 - arg_start));
    if (depends_on(arg, Var::X))
      throw ParseError(arg_start, "operator arguments are functions of t only");
    Expr coef = neg ? -scalar : scalar;
    AlgebraElement term = head == 'D'   ? AlgebraElement::D(coef * arg)
                          : head == 'G' ? AlgebraElement::G(coef * arg)
                                        : AlgebraElement::M(coef * arg);
    acc = first ? term : acc + term;
    first = false;
  }
  return acc;
}

inline std::string channel_to_string(const char* head, const Expr& e, bool& first,
                                     std::string& out) {
  Expr tidy = e;
  try {
    CanonicalForm cf = canonicalize(e);
    if (cf.is_zero()) return out;
    tidy = to_expr(cf);
  } catch (const CanonicalError&) {
    if (is_zero(e)) return out;
  }
  std::string body;
  if (tidy.is_number() && !tidy.is_one_literal() && tidy.node().value.is_real()) {
    // constants print as scalar multiples of the unit operator
    std::string c = rational_to_string(tidy.node().value.re);
    if (c == "-1")
      body = std::string("-") + head + "(1)";
    else
      body = c + "*" + head + "(1)";
  } else {
    body = std::string(head) + "(" + to_string(tidy) + ")";
  }
  if (!first && body[0] != '-') out += "+";
  out += body;
  first = false;
  return out;
}

inline std::string to_string(const AlgebraElement& q) {
  std::string out;
  bool first = true;
  channel_to_string("D", q.xi, first, out);
  channel_to_string("G", q.chi, first, out);
  channel_to_string("M", q.lam, first, out);
  if (first) return "0";
  return out;
}

}  // namespace symclass::lie
