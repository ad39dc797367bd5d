#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "symclass/liealg.hpp"
#include "symclass/numexpr.hpp"
#include "symclass/symmetry.hpp"

namespace symclass::equiv {

using symmetry::Potential;

struct Interval {
  double lo = 0.25, hi = 2.0;
  double mid() const { return 0.5 * (lo + hi); }
};

/// Generator-level exact pullback: exp(freq_unit * t) (real axis) or
/// exp(i * freq_unit * t) (imaginary axis) equals `target` evaluated at the
/// new time variable.  Lets -e^{-4t} and tan 2t inverses stay exact.
struct PullbackRule {
  bool imag_axis = false;
  Rational freq_unit{1};
  Expr target;
};

/// Inverse time map: exact expression when in-class, numeric otherwise.
struct TimeMap {
  std::optional<Expr> exact;
  std::optional<numexpr::NumExpr> numeric;

  bool defined() const { return exact || numeric; }

  template <class C>
  C eval_at(const C& t, const std::map<std::string, C>& params = {}) const {
    EvalPoint<C> pt;
    pt.t = t;
    pt.params = params;
    if (exact) return eval(*exact, pt);
    if (numeric) return numeric->template eval<C>(pt);
    throw ExprError("TimeMap: no inverse available");
  }
};

/// Point transformation of the equation class: t -> T(t),
/// x -> x*eps*sqrt(T_t) + X(t), plus the phase Psi, optionally composed with
/// the reflections (applied to the input first: time, then space).
struct EquivTransform {
  Expr T = Expr::t();
  Expr X = Expr::integer(0);
  Expr Psi = Expr::integer(0);
  int eps = 1;
  bool reflect_x = false;
  bool reflect_t = false;
  Interval domain;
  TimeMap T_inv;
  std::string t_inv_text;               // printable form of a numeric-only inverse
  std::optional<Expr> sqrt_Tt;          // exact sqrt of T_t in the old time variable
  std::optional<PullbackRule> pullback;
  std::string label = "transform";

  bool is_continuous_identity() const {
    return is_zero(T - Expr::t()) && is_zero(X) && is_zero(Psi) && eps == 1;
  }
};

// -- catalog constructors ---------------------------------------------------

namespace detail {

/// Derive an exact sqrt(T_t) when the canonical form is a perfect square;
/// the sign is fixed by a sample in the domain.
inline std::optional<Expr> derive_sqrt_Tt(const Expr& T, const Interval& dom) {
  Expr Tt = diff(T, Var::T);
  std::optional<CanonicalForm> cf;
  try {
    cf = canonicalize(Tt);
  } catch (const CanonicalError&) {
    return std::nullopt;
  }
  auto root = canonical_sqrt(*cf);
  if (!root) return std::nullopt;
  Expr r = to_expr(*root);
  try {
    std::complex<double> v = eval_d(r, {dom.mid(), 0}, {0, 0});
    if (v.real() < 0) r = -r;
  } catch (const EvalError&) {
    // leave the sign as derived; validation will report problems
  }
  return r;
}

/// Recognize T shapes whose inverse admits an exact generator pullback:
/// c * exp(a t)  and  tan(b t).
inline std::optional<PullbackRule> derive_pullback(const Expr& T) {
  std::optional<CanonicalForm> cf;
  try {
    cf = canonicalize(T);
  } catch (const CanonicalError&) {
    return std::nullopt;
  }
  if (cf->gens.size() != 1) return std::nullopt;
  const Generator& g = cf->gens[0];
  if (g.kind == Generator::Kind::ExpReal) {
    // T = c * u^k (possibly with monomial denominator): exp(k*a*t) = T/c
    bool num_mono = cf->num.size() == 1;
    bool den_mono = cf->den.size() == 1;
    if (!num_mono || !den_mono) return std::nullopt;
    int k = cf->num.begin()->first[0] - cf->den.begin()->first[0];
    if (k == 0) return std::nullopt;
    CRat c = cf->num.begin()->second / cf->den.begin()->second;
    Rational freq = g.freq * k;
    // exp(freq * t) = t_new / c
    Expr target = Expr::t() * Expr::number(CRat(1) / c);
    if (freq < 0) {
      freq = -freq;
      target = Expr::pow(target, -1);
    }
    return PullbackRule{false, freq, target};
  }
  if (g.kind == Generator::Kind::ExpImag) {
    // tan(b t): canonical form lives over w = exp(i*2b*t); the rule maps
    // exp(i*2b*t) -> (1 + i t~)/(1 - i t~)
    Expr tan_b = Expr::tan(Expr::number(CRat(g.freq / 2)) * Expr::t());
    if (!is_zero(T - tan_b)) return std::nullopt;
    Expr it = Expr::i() * Expr::t();
    Expr target = (Expr::integer(1) + it) / (Expr::integer(1) - it);
    return PullbackRule{true, g.freq, target};
  }
  return std::nullopt;
}

}  // namespace detail

inline EquivTransform identity_transform() {
  EquivTransform g;
  g.T_inv.exact = Expr::t();
  g.sqrt_Tt = Expr::integer(1);
  g.label = "identity";
  return g;
}

/// T = k t + c with k > 0 rational; exact sqrt available when k is a square.
inline EquivTransform affine_time(const Rational& k, const Rational& c) {
  if (k <= 0) throw ExprError("affine_time: k must be positive");
  EquivTransform g;
  g.T = Expr::number(CRat(k)) * Expr::t() + Expr::number(CRat(c));
  g.T_inv.exact = (Expr::t() - Expr::number(CRat(c))) * Expr::number(CRat(Rational(1) / k));
  if (auto r = rational_sqrt(k)) g.sqrt_Tt = Expr::number(CRat(*r));
  g.label = "affine";
  return g;
}

/// T = k t with k > 0 rational.
inline EquivTransform scale_time(const Rational& k) {
  EquivTransform g = affine_time(k, Rational(0));
  g.label = "scale";
  return g;
}

/// T = mu^2 t for a free positive parameter mu; keeps sqrt(T_t) = mu exact.
inline EquivTransform scale_time_symbolic(const std::string& mu) {
  EquivTransform g;
  Expr m = Expr::param(mu);
  g.T = m * m * Expr::t();
  g.T_inv.exact = Expr::t() * Expr::pow(m, -2);
  g.sqrt_Tt = m;
  g.label = "scale-sym";
  return g;
}

inline EquivTransform shift_x(const Expr& s) {
  EquivTransform g;
  g.X = s;
  g.T_inv.exact = Expr::t();
  g.sqrt_Tt = Expr::integer(1);
  g.label = "shift-x";
  return g;
}

inline EquivTransform add_phase(const Expr& psi) {
  EquivTransform g;
  g.Psi = psi;
  g.T_inv.exact = Expr::t();
  g.sqrt_Tt = Expr::integer(1);
  g.label = "phase";
  return g;
}

inline EquivTransform galilean_boost(const Rational& v) {
  EquivTransform g;
  g.X = Expr::number(CRat(v)) * Expr::t();
  g.Psi = Expr::number(CRat(v * v / 4)) * Expr::t();
  g.T_inv.exact = Expr::t();
  g.sqrt_Tt = Expr::integer(1);
  g.label = "galilean";
  return g;
}

/// Moebius time map T = (a1 t + a0)/(b1 t + b0) with positive determinant.
inline EquivTransform mobius_time(const Rational& a1, const Rational& a0, const Rational& b1,
                                  const Rational& b0, Interval dom = {}) {
  Rational det = a1 * b0 - a0 * b1;
  if (det <= 0) throw ExprError("mobius_time: determinant must be positive");
  EquivTransform g;
  Expr t = Expr::t();
  g.T = (Expr::number(CRat(a1)) * t + Expr::number(CRat(a0))) /
        (Expr::number(CRat(b1)) * t + Expr::number(CRat(b0)));
  g.T_inv.exact = (Expr::number(CRat(b0)) * t - Expr::number(CRat(a0))) /
                  (Expr::number(CRat(-b1)) * t + Expr::number(CRat(a1)));
  g.domain = dom;
  g.sqrt_Tt = detail::derive_sqrt_Tt(g.T, g.domain);
  g.label = "mobius";
  return g;
}

/// T = -1/t on a positive-time window.
inline EquivTransform neg_inverse_time() {
  EquivTransform g = mobius_time(0, -1, 1, 0, Interval{0.25, 2.0});
  g.label = "neg-inverse";
  return g;
}

/// T = -e^{-4t}; inverse is -log(-t)/4, exact via the generator pullback.
inline EquivTransform exp_decay_time() {
  EquivTransform g;
  g.T = -Expr::exp(Expr::integer(-4) * Expr::t());
  g.T_inv.numeric = numexpr::parse_numeric("-1/4*log(-t)");
  g.t_inv_text = "-1/4*log(-t)";
  g.domain = Interval{-1.0, 1.0};
  g.sqrt_Tt = detail::derive_sqrt_Tt(g.T, g.domain);
  g.pullback = detail::derive_pullback(g.T);
  g.label = "exp-decay";
  return g;
}

/// T = tan 2t; inverse is atan(t)/2, exact for even trig powers.
inline EquivTransform tan2t_time() {
  EquivTransform g;
  g.T = Expr::tan(Expr::integer(2) * Expr::t());
  g.T_inv.numeric = numexpr::parse_numeric("1/2*atan(t)");
  g.t_inv_text = "1/2*atan(t)";
  g.domain = Interval{-0.3, 0.3};
  g.sqrt_Tt = std::nullopt;  // sqrt(2)/cos 2t is not in-class
  g.pullback = detail::derive_pullback(g.T);
  g.label = "tan-2t";
  return g;
}

inline EquivTransform space_reflection() {
  EquivTransform g = identity_transform();
  g.reflect_x = true;
  g.label = "I_x";
  return g;
}

inline EquivTransform time_reflection() {
  EquivTransform g = identity_transform();
  g.reflect_t = true;
  g.label = "I_t";
  return g;
}

// -- validation ---------------------------------------------------------------

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> failures;

  void fail(std::string what) {
    ok = false;
    failures.push_back(std::move(what));
  }
};

inline ValidationReport validate(const EquivTransform& g, std::optional<Interval> dom = {}) {
  ValidationReport rep;
  Interval d = dom.value_or(g.domain);
  if (g.eps != 1 && g.eps != -1) rep.fail("eps must be +1 or -1");
  Expr Tt = diff(g.T, Var::T);

  // T_t > 0: exact when the canonical form is a positive constant or a
  // verified real square; sampled otherwise (free parameters bound to
  // positive values, matching the catalog's parameter constraints).
  bool positivity_done = false;
  try {
    CanonicalForm cf = canonicalize(Tt);
    if (cf.is_constant()) {
      CRat c = cf.constant_value();
      if (c.im != 0 || c.re <= 0) rep.fail("T_t is a non-positive constant");
      positivity_done = true;
    }
  } catch (const CanonicalError&) {
  }
  if (!positivity_done && g.sqrt_Tt && is_zero(conj(*g.sqrt_Tt) - *g.sqrt_Tt) &&
      is_zero(*g.sqrt_Tt * *g.sqrt_Tt - Tt)) {
    positivity_done = true;  // square of a real expression; nonvanishing is a domain constraint
  }
  if (!positivity_done) {
    std::vector<std::string> params;
    collect_params(Tt, params);
    for (int j = 0; j < 17; ++j) {
      double t = d.lo + (d.hi - d.lo) * j / 16.0;
      std::map<std::string, std::complex<double>> binds;
      for (size_t k = 0; k < params.size(); ++k)
        binds[params[k]] = std::complex<double>(0.5 + 0.4 * ((j + k) % 4), 0);
      try {
        std::complex<double> v = eval_d(Tt, {t, 0}, {0, 0}, binds);
        if (std::abs(v.imag()) > 1e-9 * (1 + std::abs(v)) || v.real() <= 0) {
          rep.fail("T_t fails positivity at t = " + std::to_string(t));
          break;
        }
      } catch (const EvalError&) {
        rep.fail("T_t not evaluable at t = " + std::to_string(t));
        break;
      }
    }
  }

  // inverse identity
  if (g.T_inv.exact) {
    if (!is_zero(substitute(g.T, Bindings().t(*g.T_inv.exact)) - Expr::t()))
      rep.fail("exact inverse identity T(T_inv) - t != 0");
  } else if (g.T_inv.numeric) {
    for (int j = 0; j < 9; ++j) {
      double t = d.lo + (d.hi - d.lo) * j / 8.0;
      try {
        std::complex<double> fw = eval_d(g.T, {t, 0}, {0, 0});
        std::complex<double> bk = g.T_inv.eval_at<std::complex<double>>(fw);
        if (std::abs(bk - std::complex<double>(t, 0)) > 1e-9 * (1 + std::abs(t))) {
          rep.fail("numeric inverse identity fails at t = " + std::to_string(t));
          break;
        }
      } catch (const EvalError&) {
        rep.fail("inverse not evaluable at t = " + std::to_string(t));
        break;
      }
    }
  } else {
    rep.fail("no inverse time map supplied");
  }

  if (g.sqrt_Tt) {
    if (!is_zero(*g.sqrt_Tt * *g.sqrt_Tt - Tt)) rep.fail("sqrt_Tt squared differs from T_t");
    try {
      std::complex<double> v = eval_d(*g.sqrt_Tt, {d.mid(), 0}, {0, 0});
      if (v.real() < 0) rep.fail("sqrt_Tt negative on the domain");
    } catch (const EvalError&) {
      // symbolic parameters in sqrt_Tt: positivity is the caller's constraint
    }
  }

  if (g.pullback) {
    // exp(freq*t) (or exp(i freq t)) must equal target(T(t)) on samples
    for (int j = 0; j < 5; ++j) {
      double t = d.lo + (d.hi - d.lo) * j / 4.0;
      try {
        std::complex<double> tt = eval_d(g.T, {t, 0}, {0, 0});
        std::complex<double> got = eval_d(g.pullback->target, tt, {0, 0});
        double f = g.pullback->freq_unit.convert_to<double>();
        std::complex<double> want =
            g.pullback->imag_axis ? std::exp(std::complex<double>(0, f * t))
                                  : std::exp(std::complex<double>(f * t, 0));
        if (std::abs(got - want) > 1e-9 * (1 + std::abs(want))) {
          rep.fail("pullback rule mismatch at t = " + std::to_string(t));
          break;
        }
      } catch (const EvalError&) {
        rep.fail("pullback rule not evaluable");
        break;
      }
    }
  }
  return rep;
}

// -- application to potentials -------------------------------------------------

namespace detail {

inline Expr generator_to_expr_public(const Generator& g, int exponent) {
  return symclass::detail::generator_to_expr(g, exponent);
}

/// Transformation-law right-hand side in the old variables (t, x), after
/// the reflections have been applied to v.  Requires sqrt_Tt when X_t != 0.
/// W carries the eps sign: a record with eps = -1 acts as the space
/// reflection after the eps = +1 record with the mirrored shift.
inline Expr mapped_potential_old_vars(const Expr& v_reflected, const EquivTransform& g) {
  Expr Tt = diff(g.T, Var::T);
  Expr A = diff(Tt, Var::T) / Tt;  // T_tt / T_t
  Expr Xt = diff(g.X, Var::T);
  Expr W;
  if (is_zero(Xt)) {
    W = Expr::integer(0);
  } else if (g.sqrt_Tt) {
    W = Expr::integer(g.eps) * Xt / *g.sqrt_Tt;
  } else {
    throw ExprError("mapped_potential_old_vars: X_t/sqrt(T_t) needs an exact sqrt_Tt");
  }
  Expr x = Expr::x();
  Expr half = Expr::rational(1, 2);
  Expr quarter = Expr::rational(1, 4);
  Expr inner = v_reflected + Expr::rational(1, 8) * diff(A, Var::T) * x * x +
               half * diff(W, Var::T) * x + quarter * Expr::i() * A -
               Expr::pow(quarter * A * x + half * W, 2) + diff(g.Psi, Var::T);
  return inner / Tt;
}

inline Expr reflect_potential(const Expr& v, const EquivTransform& g) {
  Expr r = v;
  if (g.reflect_t) r = substitute(conj(r), Bindings().t(-Expr::t()));
  if (g.reflect_x) r = substitute(r, Bindings().x(-Expr::x()));
  return r;
}

inline std::optional<size_t> find_gen(const CanonicalForm& cf, Generator::Kind kind) {
  for (size_t j = 0; j < cf.gens.size(); ++j)
    if (cf.gens[j].kind == kind) return j;
  return std::nullopt;
}

/// Monomial-wise generator substitution.  `rules` maps a generator index to
/// a function giving the exact replacement for a given exponent (or nullopt
/// when that exponent cannot be represented).
inline std::optional<Expr> substitute_generators(
    const CanonicalForm& cf,
    const std::function<std::optional<Expr>(size_t, int)>& rule) {
  auto convert_poly = [&](const poly::Poly& p) -> std::optional<Expr> {
    std::vector<Expr> terms;
    for (const auto& [e, c] : p) {
      std::vector<Expr> factors;
      factors.push_back(Expr::number(c));
      for (size_t j = 0; j < cf.gens.size(); ++j) {
        if (e[j] == 0) continue;
        auto r = rule(j, e[j]);
        if (!r) return std::nullopt;
        factors.push_back(*r);
      }
      terms.push_back(Expr::product(std::move(factors)));
    }
    return Expr::sum(std::move(terms));
  };
  auto n = convert_poly(cf.num);
  if (!n) return std::nullopt;
  if (poly::p_is_const(cf.den)) {
    CRat d = poly::p_const_val(cf.den);
    return d.is_one() ? *n : *n * Expr::number(CRat(1) / d);
  }
  auto d = convert_poly(cf.den);
  if (!d) return std::nullopt;
  return *n / *d;
}

/// Exact time pullback of an expression in (old t, new x) through the
/// transform's inverse map.
inline std::optional<Expr> pullback_time_exact(const Expr& e, const EquivTransform& g) {
  if (g.T_inv.exact) return substitute(e, Bindings().t(*g.T_inv.exact));
  if (!g.pullback) return std::nullopt;
  CanonicalForm cf;
  try {
    cf = canonicalize(e);
  } catch (const CanonicalError&) {
    return std::nullopt;
  }
  if (find_gen(cf, Generator::Kind::VarT)) return std::nullopt;  // bare t survives
  // the other exponential axis must be absent
  Generator::Kind wanted = g.pullback->imag_axis ? Generator::Kind::ExpImag
                                                 : Generator::Kind::ExpReal;
  Generator::Kind other = g.pullback->imag_axis ? Generator::Kind::ExpReal
                                                : Generator::Kind::ExpImag;
  if (find_gen(cf, other)) return std::nullopt;
  auto rule = [&](size_t j, int k) -> std::optional<Expr> {
    const Generator& gen = cf.gens[j];
    if (gen.kind != wanted) {
      if (gen.kind == Generator::Kind::Func) return std::nullopt;  // opaque under pullback
      return generator_to_expr_public(gen, k);
    }
    Rational ratio = gen.freq * k / g.pullback->freq_unit;
    if (rat_den(ratio) != 1) return std::nullopt;
    long m = rat_num(ratio).convert_to<long>();
    return Expr::pow(g.pullback->target, m);
  };
  return substitute_generators(cf, rule);
}

}  // namespace detail

/// Result of mapping a potential through an equivalence transform.  The
/// exact expression is present when the closed class suffices; the numeric
/// closure evaluates the transformation law piecewise and is always
/// available on the domain.
struct TransformedPotential {
  std::optional<Expr> exact;
  DecisionPath path = DecisionPath::Numeric;

  // numeric closure pieces in old variables
  Expr v_ref;         // potential after reflections
  Expr a_ratio;       // T_tt / T_t
  Expr a_ratio_t;     // d/dt of the above
  Expr x_shift;       // X
  Expr x_shift_t;     // X_t
  Expr x_shift_tt;    // X_tt
  Expr t_deriv;       // T_t
  Expr psi_t;         // Psi_t
  TimeMap t_inv;
  int eps = 1;

  /// Evaluate the mapped potential at a point in the new variables.
  template <class C>
  C eval_at(C t_new, C x_new, const std::map<std::string, C>& params = {}) const {
    C t_old = t_inv.eval_at(t_new, params);
    EvalPoint<C> pt;
    pt.t = t_old;
    pt.params = params;
    C tt = eval(t_deriv, pt);
    C sq = sqrt(tt);
    C x_old = (x_new - eval(x_shift, pt)) / (C(double(eps)) * sq);
    pt.x = x_old;
    C a = eval(a_ratio, pt);
    C at = eval(a_ratio_t, pt);
    C xt = eval(x_shift_t, pt);
    C xtt = eval(x_shift_tt, pt);
    C w = C(double(eps)) * xt / sq;
    C wt = C(double(eps)) * (xtt - C(0.5) * xt * a) / sq;
    C inner = eval(v_ref, pt) + C(0.125) * at * x_old * x_old + C(0.5) * wt * x_old +
              C(0.0, 0.25) * a -
              (C(0.25) * a * x_old + C(0.5) * w) * (C(0.25) * a * x_old + C(0.5) * w) +
              eval(psi_t, pt);
    return inner / tt;
  }
};

/// Map a potential through the transform: form the transformation law in
/// old variables, substitute the inverse point map, and return the result in
/// the new variables.  Falls back to the numeric closure when the inverse
/// leaves the exact class.
inline TransformedPotential apply_to_potential(const Potential& v, const EquivTransform& g) {
  TransformedPotential out;
  out.v_ref = detail::reflect_potential(v, g);
  out.t_deriv = diff(g.T, Var::T);
  out.a_ratio = diff(out.t_deriv, Var::T) / out.t_deriv;
  out.a_ratio_t = diff(out.a_ratio, Var::T);
  out.x_shift = g.X;
  out.x_shift_t = diff(g.X, Var::T);
  out.x_shift_tt = diff(out.x_shift_t, Var::T);
  out.psi_t = diff(g.Psi, Var::T);
  out.t_inv = g.T_inv;
  out.eps = g.eps;

  bool w_exact = is_zero(out.x_shift_t) || g.sqrt_Tt.has_value();
  if (!w_exact) return out;  // numeric only: X_t/sqrt(T_t) is not in-class

  Expr r_old = detail::mapped_potential_old_vars(out.v_ref, g);
  std::optional<CanonicalForm> cf;
  try {
    cf = canonicalize(r_old);
  } catch (const CanonicalError&) {
    return out;
  }
  Expr staged = to_expr(*cf);
  bool have_x = detail::find_gen(*cf, Generator::Kind::VarX).has_value();
  bool x_done = !have_x;
  if (have_x) {
    if (g.sqrt_Tt) {
      Expr x_old = (Expr::x() - g.X) / (Expr::integer(g.eps) * *g.sqrt_Tt);
      try {
        staged = substitute(staged, Bindings().x(x_old));
        x_done = true;
      } catch (const ExprError&) {
        return out;  // opaque in x: numeric only
      }
    } else if (is_zero(g.X)) {
      // even powers of x: substitute x^2 -> x^2 / T_t exactly
      size_t xj = *detail::find_gen(*cf, Generator::Kind::VarX);
      Expr xsq_rule = Expr::x() * Expr::x() / out.t_deriv;
      auto rule = [&](size_t j, int k) -> std::optional<Expr> {
        if (j == xj) {
          if (k % 2 != 0) return std::nullopt;
          return Expr::pow(xsq_rule, k / 2);
        }
        return detail::generator_to_expr_public(cf->gens[j], k);
      };
      auto r = detail::substitute_generators(*cf, rule);
      if (r) {
        staged = *r;
        x_done = true;
      }
    }
  }
  if (!x_done) return out;
  std::optional<Expr> pulled;
  try {
    pulled = detail::pullback_time_exact(staged, g);
  } catch (const ExprError&) {
    pulled = std::nullopt;  // e.g. opaque symbols meeting a nontrivial time map
  }
  if (!pulled) return out;
  try {
    out.exact = to_expr(canonicalize(*pulled));
  } catch (const CanonicalError&) {
    out.exact = *pulled;
  }
  out.path = DecisionPath::Exact;
  return out;
}

/// Complex field on (t, x); the numeric solution representation.
using Field = std::function<std::complex<double>(double, double)>;

inline Field field_of(const Expr& e) {
  return [e](double t, double x) { return eval_d(e, {t, 0}, {x, 0}); };
}

/// Map a solution field through the transform (new variables in, value out):
/// psi~(t~, x~) = psi(t, x) / sqrt(T_t) * exp(i [A x^2/8 + W x/2 + Psi]).
inline Field apply_to_solution(const Field& psi, const EquivTransform& g) {
  // reflections act on the input field first
  Field base = psi;
  if (g.reflect_t) {
    Field prev = base;
    base = [prev](double t, double x) { return std::conj(prev(-t, x)); };
  }
  if (g.reflect_x) {
    Field prev = base;
    base = [prev](double t, double x) { return prev(t, -x); };
  }
  if (g.is_continuous_identity()) return base;

  Expr Tt = diff(g.T, Var::T);
  Expr A = diff(Tt, Var::T) / Tt;
  Expr Xt = diff(g.X, Var::T);
  TimeMap inv = g.T_inv;
  Expr X = g.X;
  Expr Psi = g.Psi;
  int eps = g.eps;
  return [base, Tt, A, Xt, inv, X, Psi, eps](double tn, double xn) {
    using CD = std::complex<double>;
    CD t_old = inv.eval_at<CD>(CD(tn, 0));
    CD tt = eval_d(Tt, t_old, 0);
    CD sq = std::sqrt(tt);
    CD x_old = (CD(xn, 0) - eval_d(X, t_old, 0)) / (CD(double(eps), 0) * sq);
    CD a = eval_d(A, t_old, 0);
    CD w = CD(double(eps), 0) * eval_d(Xt, t_old, 0) / sq;
    CD psi_v = base(t_old.real(), x_old.real());
    CD phase = CD(0, 1) * (a * x_old * x_old / 8.0 + w * x_old / 2.0 + eval_d(Psi, t_old, 0));
    return psi_v / sq * std::exp(phase);
  };
}

// -- first-order (infinitesimal) action ----------------------------------------

namespace detail {

/// First-order jet a + eps*b over expressions.
struct Jet {
  Expr a, b;

  friend Jet operator+(const Jet& p, const Jet& q) { return {p.a + q.a, p.b + q.b}; }
  friend Jet operator-(const Jet& p, const Jet& q) { return {p.a - q.a, p.b - q.b}; }
  friend Jet operator*(const Jet& p, const Jet& q) {
    return {p.a * q.a, p.a * q.b + p.b * q.a};
  }
  Jet dt() const { return {diff(a, Var::T), diff(b, Var::T)}; }
};

inline Jet jet_const(Expr e) { return {std::move(e), Expr::integer(0)}; }

inline Jet jet_div(const Jet& p, const Jet& q) {
  // (a1 + e b1)/(a2 + e b2) = a1/a2 + e (b1 a2 - a1 b2)/a2^2
  return {p.a / q.a, (p.b * q.a - p.a * q.b) / (q.a * q.a)};
}

}  // namespace detail

/// First-order change of the potential under the equivalence flow of
/// Q = D(xi)+G(chi)+lam M, computed by expanding the finite transformation
/// T = t + eps xi, X = eps chi, Psi = eps lam to first order.
inline Expr infinitesimal_action(const Potential& v, const lie::AlgebraElement& q) {
  using detail::Jet;
  using detail::jet_const;
  using detail::jet_div;
  Expr x = Expr::x();
  Expr xi_t = diff(q.xi, Var::T);
  Jet Tt{Expr::integer(1), xi_t};
  Jet A = jet_div(Jet{Expr::integer(0), diff(xi_t, Var::T)}, Tt);
  // sqrt(T_t) = 1 + eps xi_t/2; W = X_t / sqrt(T_t)
  Jet sqrtTt{Expr::integer(1), Expr::rational(1, 2) * xi_t};
  Jet W = jet_div(Jet{Expr::integer(0), diff(q.chi, Var::T)}, sqrtTt);
  // V at the shifted old point: V(t~ - eps xi, x~ - eps(xi_t x/2 + chi))
  Jet V{v, -(q.xi * diff(v, Var::T)) -
               (Expr::rational(1, 2) * xi_t * x + q.chi) * diff(v, Var::X)};
  Jet PsiT{Expr::integer(0), diff(q.lam, Var::T)};
  Jet half = jet_const(Expr::rational(1, 2));
  Jet quarter = jet_const(Expr::rational(1, 4));
  Jet eighth = jet_const(Expr::rational(1, 8));
  Jet xj = jet_const(x);
  Jet ij = jet_const(Expr::i());
  Jet inner = V + eighth * A.dt() * xj * xj + half * W.dt() * xj + quarter * ij * A -
              (quarter * A * xj + half * W) * (quarter * A * xj + half * W) + PsiT;
  Jet result = jet_div(inner, Tt);
  return result.b;
}

// -- composition ----------------------------------------------------------------

/// Compose two transforms: apply g1 first, then g2.  g2 must be purely
/// continuous; reflection flags are carried from g1.
inline EquivTransform compose(const EquivTransform& g2, const EquivTransform& g1) {
  if (g2.reflect_x || g2.reflect_t)
    throw ExprError("compose: the outer transform must be continuous");
  EquivTransform g;
  g.reflect_x = g1.reflect_x;
  g.reflect_t = g1.reflect_t;
  g.domain = g1.domain;
  g.eps = g1.eps * g2.eps;
  Bindings via_T1 = Bindings().t(g1.T);
  g.T = substitute(g2.T, via_T1);
  Expr T2t_at = substitute(diff(g2.T, Var::T), via_T1);

  bool x1_zero = is_zero(g1.X);
  std::optional<Expr> sqrtT2_at;
  if (g2.sqrt_Tt) sqrtT2_at = substitute(*g2.sqrt_Tt, via_T1);
  if (x1_zero) {
    g.X = substitute(g2.X, via_T1);
  } else if (sqrtT2_at) {
    g.X = Expr::integer(g2.eps) * g1.X * *sqrtT2_at + substitute(g2.X, via_T1);
  } else {
    throw ExprError("compose: need sqrt(T_t) of the outer transform for a nonzero inner X");
  }

  // Psi: inner phase plus outer phase at T1, plus cross terms from x~ = ...
  Expr psi = g1.Psi + substitute(g2.Psi, via_T1);
  if (!x1_zero) {
    Expr A2_at = substitute(diff(diff(g2.T, Var::T), Var::T) / diff(g2.T, Var::T), via_T1);
    Expr X2t = diff(g2.X, Var::T);
    Expr W2_at;
    if (is_zero(X2t)) {
      W2_at = Expr::integer(0);
    } else if (g2.sqrt_Tt) {
      W2_at = substitute(X2t / *g2.sqrt_Tt, via_T1);
    } else {
      throw ExprError("compose: need sqrt(T_t) of the outer transform for phase cross terms");
    }
    psi = psi + Expr::rational(1, 8) * A2_at * g1.X * g1.X +
          Expr::rational(1, 2) * Expr::integer(g2.eps) * W2_at * g1.X;
  }
  g.Psi = psi;

  if (g1.sqrt_Tt && sqrtT2_at) g.sqrt_Tt = *sqrtT2_at * *g1.sqrt_Tt;

  // inverse: T1_inv after T2_inv
  if (g1.T_inv.exact && g2.T_inv.exact) {
    g.T_inv.exact = substitute(*g1.T_inv.exact, Bindings().t(*g2.T_inv.exact));
  } else if (g1.T_inv.defined() && g2.T_inv.defined()) {
    numexpr::NumExpr inner = g2.T_inv.numeric ? *g2.T_inv.numeric
                                              : numexpr::from_expr(*g2.T_inv.exact);
    numexpr::NumExpr outer = g1.T_inv.numeric ? *g1.T_inv.numeric
                                              : numexpr::from_expr(*g1.T_inv.exact);
    g.T_inv.numeric = outer.compose_t(inner);
  }
  g.label = g2.label + "*" + g1.label;
  return g;
}

}  // namespace symclass::equiv
