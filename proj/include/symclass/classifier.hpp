#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symclass/catalog.hpp"

namespace symclass::classifier {

using symmetry::Potential;

enum class Status { Matched, GenericX, GenericT, OutsideGrammar };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::Matched:
      return "matched";
    case Status::GenericX:
      return "generic_x";
    case Status::GenericT:
      return "generic_t";
    case Status::OutsideGrammar:
      return "outside_grammar";
  }
  return "?";
}

/// Canonical parameter value: exact rational when the normalization stayed
/// rational, a floating approximation otherwise.
struct ParamValue {
  std::optional<Rational> exact;
  double approx = 0;

  static ParamValue of(const Rational& r) {
    return {r, r.convert_to<double>()};
  }
  static ParamValue of_approx(double v) { return {std::nullopt, v}; }
};

struct ClassificationResult {
  Status status = Status::OutsideGrammar;
  int table = 0;
  int case_id = 0;
  std::map<std::string, ParamValue> params;
  std::optional<equiv::EquivTransform> witness;
  std::map<std::string, double> witness_bindings;  // numeric values of witness parameters
  std::vector<std::string> moves;
  bool verified = false;
  DecisionPath witness_path = DecisionPath::Exact;
  std::string reason;
  bool needs_manual_confirmation = false;
};

namespace detail {

/// Exact rational cube root, if one exists.
inline std::optional<Rational> rational_cbrt(const Rational& r) {
  if (r == 0) return Rational(0);
  bool neg = r < 0;
  Rational a = neg ? Rational(-r) : r;
  auto iroot = [](const Int& n) -> std::optional<Int> {
    if (n <= 0) return std::nullopt;
    Int lo = 0, hi = Int(1) << ((boost::multiprecision::msb(n) / 3) + 2);
    while (lo < hi) {
      Int mid = (lo + hi + 1) / 2;
      if (mid * mid * mid <= n)
        lo = mid;
      else
        hi = mid - 1;
    }
    return lo * lo * lo == n ? std::optional<Int>(lo) : std::nullopt;
  };
  auto cn = iroot(rat_num(a));
  auto cd = iroot(rat_den(a));
  if (!cn || !cd) return std::nullopt;
  Rational root(*cn, *cd);
  return neg ? Rational(-root) : root;
}

/// Complex-rational coefficients of the x-grammar
/// V = a2 x^2 + a1 x + a0 + q x^-2, extracted from the canonical form.
struct XCoeffs {
  CRat a2, a1, a0, q;
};

inline std::optional<XCoeffs> extract_x_grammar(const CanonicalForm& cf) {
  // generators must be at most {x}
  std::optional<size_t> xj;
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    if (cf.gens[j].kind == Generator::Kind::VarX)
      xj = j;
    else
      return std::nullopt;
  }
  using namespace poly;
  if (!xj) {
    // constant potential
    if (!p_is_const(cf.num) || !p_is_const(cf.den)) return std::nullopt;
    XCoeffs c;
    c.a0 = cf.is_zero() ? CRat(0) : cf.constant_value();
    return c;
  }
  int dden = p_deg_in(cf.den, *xj);
  if (dden > 2 || cf.den.size() != 1) return std::nullopt;  // denominator must be x^k, k <= 2
  CRat dc = cf.den.begin()->second;
  // numerator * x^(2 - dden) gives V * x^2 as a polynomial
  int shift = 2 - dden;
  XCoeffs c;
  for (const auto& [e, coeff] : cf.num) {
    int k = e[*xj] + shift;
    CRat v = coeff / dc;
    switch (k) {
      case 4:
        c.a2 = v;
        break;
      case 3:
        c.a1 = v;
        break;
      case 2:
        c.a0 = v;
        break;
      case 0:
        c.q = v;
        break;
      default:
        return std::nullopt;  // x^-1 or degree > 2 terms
    }
  }
  return c;
}

/// Restricted exact antiderivative in t: polynomial-times-exponential terms
/// with a monomial denominator.  Returns nullopt where a log or exponential
/// integral would be needed.
inline std::optional<Expr> antiderivative_t(const Expr& e) {
  CanonicalForm cf;
  try {
    cf = canonicalize(e);
  } catch (const CanonicalError&) {
    return std::nullopt;
  }
  if (cf.is_zero()) return Expr::integer(0);
  using namespace poly;
  std::optional<size_t> tj, uj, wj;
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    switch (cf.gens[j].kind) {
      case Generator::Kind::VarT:
        tj = j;
        break;
      case Generator::Kind::ExpReal:
        uj = j;
        break;
      case Generator::Kind::ExpImag:
        wj = j;
        break;
      default:
        return std::nullopt;  // x, parameters or opaque symbols
    }
  }
  if (cf.den.size() != 1) return std::nullopt;
  const auto& [dexps, dcoeff] = *cf.den.begin();
  // a monomial denominator only shifts powers and frequencies
  int dpow_t = tj ? dexps[*tj] : 0;
  int dpow_u = uj ? dexps[*uj] : 0;
  int dpow_w = wj ? dexps[*wj] : 0;

  std::vector<Expr> terms;
  for (const auto& [exps, coeff] : cf.num) {
    CRat c = coeff / dcoeff;
    long m = (tj ? exps[*tj] : 0) - dpow_t;
    CRat nu;
    if (uj) nu.re = cf.gens[*uj].freq * (exps[*uj] - dpow_u);
    if (wj) nu.im = cf.gens[*wj].freq * (exps[*wj] - dpow_w);
    if (nu.is_zero()) {
      if (m == -1) return std::nullopt;  // log
      terms.push_back(Expr::number(c / CRat(Rational(m + 1))) * Expr::pow(Expr::t(), m + 1));
      continue;
    }
    if (m < 0) return std::nullopt;  // exponential integral
    // int t^m e^{nu t} dt = e^{nu t} sum_r (-1)^r m!/(m-r)! t^{m-r} / nu^{r+1}
    Expr enu = Expr::exp(Expr::number(nu) * Expr::t());
    std::vector<Expr> sum;
    Rational fact(1);
    CRat nupow = nu;
    for (long r = 0; r <= m; ++r) {
      CRat f = c * CRat(Rational(r % 2 == 0 ? 1 : -1)) * CRat(fact) / nupow;
      sum.push_back(Expr::number(f) * Expr::pow(Expr::t(), m - r));
      fact *= (m - r);
      nupow = nupow * nu;
    }
    terms.push_back(enu * Expr::sum(std::move(sum)));
  }
  return Expr::sum(std::move(terms));
}

/// Shapes of the t-grammar after the real part has been removed.
struct TForm {
  enum class Kind { Zero, Constant, InverseTime, Mobius, GenericT } kind;
  Rational nu;  // Constant: the imaginary constant; InverseTime / Mobius: nu
};

/// Match i*W(t) in canonical form against the special families.
inline std::optional<TForm> match_t_form(const Expr& iw) {
  CanonicalForm cf;
  try {
    cf = canonicalize(iw);
  } catch (const CanonicalError&) {
    return std::nullopt;
  }
  using namespace poly;
  if (cf.is_zero()) return TForm{TForm::Kind::Zero, 0};
  if (cf.is_constant()) {
    CRat c = cf.constant_value();
    if (c.re != 0) return std::nullopt;  // residual real constant: internal error
    return TForm{TForm::Kind::Constant, c.im};
  }
  std::optional<size_t> tj;
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    if (cf.gens[j].kind == Generator::Kind::VarT)
      tj = j;
    else
      return TForm{TForm::Kind::GenericT, 0};
  }
  if (!tj) return TForm{TForm::Kind::GenericT, 0};
  // i*nu/t: monomial denominator t, constant numerator
  if (cf.den.size() == 1 && p_deg_in(cf.den, *tj) == 1 && p_is_const(cf.num)) {
    CRat c = p_const_val(cf.num) / cf.den.begin()->second;
    if (c.re == 0 && c.im != 0) return TForm{TForm::Kind::InverseTime, c.im};
    return TForm{TForm::Kind::GenericT, 0};
  }
  // (i/2)(t + nu)/(t^2 + 1): monic denominator t^2 + 1
  Poly want_den = p_add(p_mono(Exps{2}, CRat(1)), p_const(1, CRat(1)));
  if (cf.den == want_den && p_deg_in(cf.num, *tj) == 1) {
    CRat c1 = p_const_val(p_coeff_in(cf.num, *tj, 1));
    CRat c0 = p_const_val(p_coeff_in(cf.num, *tj, 0));
    if (c1 == CRat(Rational(0), Rational(1, 2))) {
      CRat nu = c0 / c1;
      if (nu.im == 0) return TForm{TForm::Kind::Mobius, nu.re};
    }
  }
  return TForm{TForm::Kind::GenericT, 0};
}

}  // namespace detail

/// Normalization plan for the x-grammar: reflection flags, continuous moves
/// and the resulting case with canonical parameters.
struct NormalizationPlan {
  bool ok = false;
  std::string reason;
  bool needs_manual_confirmation = false;
  bool reflect_t = false, reflect_x = false;
  std::vector<std::string> moves;
  int table = 0, case_id = 0;
  std::map<std::string, ParamValue> params;
  equiv::EquivTransform witness;
  std::map<std::string, double> witness_bindings;
};

namespace detail {

/// Compose the continuous move list in the fixed order
/// phase -> shift -> scale -> Moebius, with reflections as input-side flags.
struct MoveBuilder {
  std::vector<equiv::EquivTransform> seq;
  std::vector<std::string> names;

  void add(equiv::EquivTransform g, std::string name) {
    seq.push_back(std::move(g));
    names.push_back(std::move(name));
  }

  equiv::EquivTransform compose_all(bool reflect_t, bool reflect_x) const {
    equiv::EquivTransform acc = equiv::identity_transform();
    acc.reflect_t = reflect_t;
    acc.reflect_x = reflect_x;
    for (const auto& g : seq) acc = equiv::compose(g, acc);
    if (reflect_t) acc.label = "I_t*" + acc.label;
    if (reflect_x) acc.label = "I_x*" + acc.label;
    return acc;
  }
};

/// Plain rational scale move T = k t.
inline void add_scale_move(MoveBuilder& mb, const Rational& k) {
  if (k == 1) return;
  mb.add(equiv::scale_time(k), "scale T=" + rational_to_string(k) + "*t");
}

/// Irrational scale move T = mu^2 t with mu bound numerically.
inline void add_scale_move_symbolic(MoveBuilder& mb, double mu,
                                    std::map<std::string, double>& bindings,
                                    const std::string& note) {
  bindings["_scale_mu"] = mu;
  mb.add(equiv::scale_time_symbolic("_scale_mu"), "scale T=_scale_mu^2*t, _scale_mu=" + note);
}

}  // namespace detail

/// Normalize the x-grammar coefficients (a2 x^2 + a1 x + a0 + q x^-2) to a
/// canonical table case, recording the ordered moves.
inline NormalizationPlan normalize_x(const detail::XCoeffs& in) {
  using equiv::EquivTransform;
  NormalizationPlan plan;
  detail::XCoeffs c = in;

  if (c.a2.im != 0 || c.a1.im != 0) {
    plan.reason = "nonreal quadratic or linear coefficient: no branch of the "
                  "reduced equation (ax+b)V_x + 2aV = c2 x^2 + c1 x matches";
    return plan;
  }
  if (!c.a1.is_zero() && !c.q.is_zero()) {
    plan.reason = "linear term together with an inverse-square term: branch "
                  "conditions require c1 = 0 when a != 0";
    return plan;
  }
  if (!c.q.is_zero() && c.a2.re < 0) {
    plan.reason = "c2 < 0 unreachable: c2 = c0^2 has no real solution for a "
                  "negative quadratic coefficient with an inverse-square term";
    plan.needs_manual_confirmation = true;
    return plan;
  }

  // reflections: I_t fixes the sign of the imaginary constant (and
  // conjugates q); I_x fixes the sign of the linear coefficient.
  Rational b = c.a0.im;
  bool want_it = false;
  if (!c.q.is_zero() && c.a2.is_zero()) {
    want_it = c.q.im < 0;  // beta >= 0 for the inverse-square case
  } else {
    want_it = b < 0;
  }
  if (want_it) {
    c.a0 = c.a0.conj();
    c.q = c.q.conj();
    b = c.a0.im;
    plan.reflect_t = true;
  }
  if (c.a1.re < 0) {
    c.a1 = -c.a1;
    plan.reflect_x = true;
  }

  detail::MoveBuilder mb;
  Rational a2 = c.a2.re, a1 = c.a1.re;

  // shift: complete the square when both a2 and a1 are present
  if (a2 != 0 && a1 != 0) {
    Rational s = a1 / (2 * a2);
    // x~ = x + s removes the linear term; the constant gains -a1^2/(4 a2)
    mb.add(equiv::shift_x(Expr::number(CRat(s))), "shift X=" + rational_to_string(s));
    c.a0 = c.a0 - CRat(a1 * a1 / (4 * a2));
    a1 = 0;
    b = c.a0.im;
  }

  // phase: remove the real part of the constant
  if (c.a0.re != 0) {
    Expr psi = Expr::number(CRat(-c.a0.re)) * Expr::t();
    mb.add(equiv::add_phase(psi), "phase Psi=" + rational_to_string(-c.a0.re) + "*t");
    c.a0 = CRat(Rational(0), b);
  }

  auto finish = [&](int table, int id, std::map<std::string, ParamValue> params) {
    plan.ok = true;
    plan.table = table;
    plan.case_id = id;
    plan.params = std::move(params);
    plan.witness = mb.compose_all(plan.reflect_t, plan.reflect_x);
    plan.moves = mb.names;
  };

  if (!c.q.is_zero()) {
    if (a2 == 0) {
      if (b != 0) {
        plan.reason = "imaginary constant with an inverse-square term: the "
                      "branch c2 = c0^2 forces c0 = 0 when c2 = 0";
        return plan;
      }
      finish(2, 1, {{"alpha", ParamValue::of(c.q.re)}, {"beta", ParamValue::of(c.q.im)}});
      return plan;
    }
    // a2 > 0 here; the harmonic relation a2 = b^2 must hold exactly
    if (b * b != a2) {
      plan.reason = "quadratic and imaginary-constant coefficients violate "
                    "c2 = c0^2 (decided exactly on rationals)";
      return plan;
    }
    // T = b t maps to x~^2 + i + q x~^-2; the inverse-square coefficient is
    // scale invariant
    detail::add_scale_move(mb, b);
    finish(2, 2, {{"alpha", ParamValue::of(c.q.re)}, {"beta", ParamValue::of(c.q.im)}});
    return plan;
  }

  if (a2 != 0) {
    // scale k = sqrt(|a2|): exact when |a2| is a perfect rational square
    Rational k_abs = a2 < 0 ? -a2 : a2;
    auto root = rational_sqrt(k_abs);
    double k_num = std::sqrt(k_abs.convert_to<double>());
    if (root)
      detail::add_scale_move(mb, *root);
    else
      detail::add_scale_move_symbolic(mb, std::sqrt(k_num), plan.witness_bindings,
                                      "|a2|^(1/4)");
    std::map<std::string, ParamValue> params;
    ParamValue nu = root ? ParamValue::of(b / *root)
                         : ParamValue::of_approx(b.convert_to<double>() / k_num);
    if (a2 < 0) {
      params["nu"] = nu;
      finish(2, 5, std::move(params));
      return plan;
    }
    bool is_case9 = root && b == *root;  // nu == 1 exactly
    if (is_case9) {
      finish(2, 9, {});
      return plan;
    }
    params["nu"] = nu;
    finish(2, 6, std::move(params));
    return plan;
  }

  if (a1 != 0) {
    // scale k = a1^(2/3): exact when a1 is a perfect rational cube
    auto croot = detail::rational_cbrt(a1);
    double k_num = std::pow(a1.convert_to<double>(), 2.0 / 3.0);
    if (croot)
      detail::add_scale_move(mb, *croot * *croot);
    else
      detail::add_scale_move_symbolic(mb, std::cbrt(a1.convert_to<double>()),
                                      plan.witness_bindings, "a1^(1/3)");
    if (b == 0) {
      finish(2, 8, {});
      return plan;
    }
    ParamValue nu = croot ? ParamValue::of(b / (*croot * *croot))
                          : ParamValue::of_approx(b.convert_to<double>() / k_num);
    finish(2, 4, {{"nu", nu}});
    return plan;
  }

  // pure constant: already i*b after the phase move
  if (b == 0) {
    finish(1, 5, {});
    return plan;
  }
  detail::add_scale_move(mb, b);
  finish(1, 4, {});
  return plan;
}

/// Normalize the t-grammar: remove the real part by a phase, then match the
/// special families (constant, i nu/t, the Moebius row).
inline NormalizationPlan normalize_t(const Potential& v, bool reflected) {
  NormalizationPlan plan;
  plan.reflect_t = reflected;
  Expr re = real_part(v);
  Expr im = v - re;

  detail::MoveBuilder mb;
  if (!is_zero(re)) {
    auto anti = detail::antiderivative_t(re);
    if (!anti) {
      plan.reason = "real part has no in-class antiderivative (log or "
                    "exponential-integral term)";
      return plan;
    }
    mb.add(equiv::add_phase(-*anti), "phase Psi=-int(Re V)");
  }

  auto form = detail::match_t_form(im);
  if (!form) {
    plan.reason = "imaginary part leaves the exact class";
    return plan;
  }

  auto finish = [&](int id, std::map<std::string, ParamValue> params) {
    plan.ok = true;
    plan.table = 1;
    plan.case_id = id;
    plan.params = std::move(params);
    plan.witness = mb.compose_all(plan.reflect_t, false);
    plan.moves = mb.names;
  };

  switch (form->kind) {
    case detail::TForm::Kind::Zero:
      finish(5, {});
      return plan;
    case detail::TForm::Kind::Constant: {
      Rational nu = form->nu;
      if (nu < 0) {
        plan.reason = "needs_time_reflection";
        return plan;
      }
      detail::add_scale_move(mb, nu);
      finish(4, {});
      return plan;
    }
    case detail::TForm::Kind::InverseTime: {
      Rational nu = form->nu;
      if (nu == Rational(1, 2)) {
        mb.add(equiv::neg_inverse_time(), "mobius T=-1/t");
        finish(5, {});
        return plan;
      }
      if (nu < Rational(1, 4)) {
        mb.add(equiv::neg_inverse_time(), "mobius T=-1/t");
        nu = Rational(1, 2) - nu;
      }
      finish(3, {{"nu", ParamValue::of(nu)}});
      return plan;
    }
    case detail::TForm::Kind::Mobius: {
      Rational nu = form->nu;
      if (nu < 0) {
        plan.reason = "needs_time_reflection";
        return plan;
      }
      finish(2, {{"nu", ParamValue::of(nu)}});
      return plan;
    }
    case detail::TForm::Kind::GenericT:
      plan.reason = "no tabulated extension within the t-grammar";
      return plan;
  }
  return plan;
}

namespace detail {

/// Re-check a matched plan: the witnessed image must equal the instantiated
/// canonical template, exactly where possible.
inline std::pair<bool, DecisionPath> verify_witness(const Potential& input,
                                                    const NormalizationPlan& plan) {
  catalog::TableCase target = catalog::get_case(plan.table, plan.case_id);
  auto mapped = equiv::apply_to_potential(input, plan.witness);

  bool all_exact = plan.witness_bindings.empty();
  for (const auto& [name, val] : plan.params) all_exact = all_exact && val.exact.has_value();

  if (all_exact && mapped.exact) {
    Bindings b;
    for (const auto& [name, val] : plan.params) b.param(name, Expr::number(CRat(*val.exact)));
    Expr inst = substitute(target.potential, b);
    if (is_zero(*mapped.exact - inst)) return {true, DecisionPath::Exact};
    return {false, DecisionPath::Exact};
  }

  // numeric verification over the transform's domain
  std::map<std::string, std::complex<double>> tparams;
  for (const auto& [name, val] : plan.witness_bindings) tparams[name] = {val, 0.0};
  std::map<std::string, std::complex<double>> vparams;
  for (const auto& [name, val] : plan.params) vparams[name] = {val.approx, 0.0};
  const equiv::Interval dom = plan.witness.domain;
  int checked = 0;
  for (int j = 0; j < 24; ++j) {
    double t_old = dom.lo + (dom.hi - dom.lo) * (j + 0.5) / 24;
    double xs = 0.45 + 0.06 * j;
    try {
      std::complex<double> tn = eval_d(plan.witness.T, {t_old, 0}, {0, 0}, tparams);
      std::complex<double> got =
          mapped.eval_at<std::complex<double>>(tn, {xs, 0.0}, tparams);
      std::complex<double> want = eval_d(target.potential, tn, {xs, 0}, vparams);
      if (std::abs(got - want) > 1e-8 * (1 + std::abs(want))) return {false, DecisionPath::Numeric};
      ++checked;
    } catch (const EvalError&) {
      continue;  // pole at this sample
    }
  }
  return {checked >= 8, DecisionPath::Numeric};
}

inline bool constraints_hold(const NormalizationPlan& plan) {
  catalog::TableCase target = catalog::get_case(plan.table, plan.case_id);
  std::map<std::string, Rational> exact;
  for (const auto& [name, val] : plan.params)
    if (val.exact) exact[name] = *val.exact;
  for (const auto& con : target.constraints) {
    if (!con.holds(exact)) return false;
  }
  // approximate parameters: check the documented inequalities numerically
  for (const auto& [name, val] : plan.params) {
    if (val.exact) continue;
    if (plan.table == 2 && plan.case_id == 4 && name == "nu" && val.approx <= 0) return false;
    if (plan.table == 2 && (plan.case_id == 5 || plan.case_id == 6) && val.approx < -1e-12)
      return false;
  }
  return true;
}

}  // namespace detail

/// Decision procedure: map a potential from the restricted grammar to its
/// canonical table case with a verified witness transform.  Sound but
/// conservative: generic_* means "no tabulated extension found within the
/// grammar".
inline ClassificationResult classify(const Potential& v) {
  ClassificationResult res;
  CanonicalForm cf;
  try {
    cf = canonicalize(v);
  } catch (const CanonicalError& e) {
    res.reason = std::string("outside the exact class: ") + e.what();
    return res;
  } catch (const ExprError& e) {
    res.reason = std::string("ill-formed potential: ") + e.what();
    return res;
  }
  for (const auto& g : cf.gens) {
    if (g.kind == Generator::Kind::Param) {
      res.reason = "free parameters are not part of the input grammar";
      return res;
    }
    if (g.kind == Generator::Kind::Func) {
      res.reason = "opaque function symbols are not part of the input grammar";
      return res;
    }
  }

  auto coeffs = detail::extract_x_grammar(cf);
  if (coeffs) {
    bool x_dependent = !coeffs->a2.is_zero() || !coeffs->a1.is_zero() || !coeffs->q.is_zero();
    if (x_dependent) {
      NormalizationPlan plan = normalize_x(*coeffs);
      if (!plan.ok) {
        res.status = Status::GenericX;
        res.reason = plan.reason;
        res.needs_manual_confirmation = plan.needs_manual_confirmation;
        return res;
      }
      auto [ok, path] = detail::verify_witness(v, plan);
      if (!ok || !detail::constraints_hold(plan)) {
        res.status = Status::GenericX;
        res.reason = ok ? "canonical parameters violate the table constraints"
                        : "witness verification failed";
        return res;
      }
      res.status = Status::Matched;
      res.table = plan.table;
      res.case_id = plan.case_id;
      res.params = plan.params;
      res.witness = plan.witness;
      res.witness_bindings = plan.witness_bindings;
      res.moves = plan.moves;
      res.verified = true;
      res.witness_path = path;
      return res;
    }
  }

  // t-grammar (includes pure constants)
  bool t_only = true;
  for (const auto& g : cf.gens)
    if (g.kind == Generator::Kind::VarX) t_only = false;
  if (t_only) {
    NormalizationPlan plan = normalize_t(v, false);
    if (!plan.ok && plan.reason == "needs_time_reflection") {
      Expr reflected = substitute(conj(v), Bindings().t(-Expr::t()));
      plan = normalize_t(reflected, true);
    }
    if (!plan.ok) {
      if (plan.reason == "no tabulated extension within the t-grammar") {
        res.status = Status::GenericT;
        res.reason = plan.reason;
      } else {
        res.status = Status::OutsideGrammar;
        res.reason = plan.reason;
      }
      return res;
    }
    auto [ok, path] = detail::verify_witness(v, plan);
    if (!ok || !detail::constraints_hold(plan)) {
      res.status = Status::GenericT;
      res.reason = ok ? "canonical parameters violate the table constraints"
                      : "witness verification failed";
      return res;
    }
    res.status = Status::Matched;
    res.table = plan.table;
    res.case_id = plan.case_id;
    res.params = plan.params;
    res.witness = plan.witness;
    res.witness_bindings = plan.witness_bindings;
    res.moves = plan.moves;
    res.verified = true;
    res.witness_path = path;
    return res;
  }

  res.reason = "potential is outside the accepted x- and t-grammars";
  return res;
}

}  // namespace symclass::classifier
