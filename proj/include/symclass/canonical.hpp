#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "symclass/expr.hpp"

namespace symclass {

/// Raised when an expression leaves the closed class handled exactly
/// (nested transcendentals, non-linear or non-numeric frequencies).
class CanonicalError : public std::runtime_error {
 public:
  explicit CanonicalError(const std::string& what) : std::runtime_error(what) {}
};

namespace poly {

using Exps = std::vector<int32_t>;

inline int64_t total_degree(const Exps& e) {
  int64_t d = 0;
  for (auto v : e) d += v;
  return d;
}

/// Graded lexicographic order (earlier generator index = bigger variable).
struct GrlexLess {
  bool operator()(const Exps& a, const Exps& b) const {
    int64_t da = total_degree(a), db = total_degree(b);
    if (da != db) return da < db;
    for (size_t j = 0; j < a.size() && j < b.size(); ++j) {
      if (a[j] != b[j]) return a[j] < b[j];
    }
    return a.size() < b.size();
  }
};

using Poly = std::map<Exps, CRat, GrlexLess>;

/// Cooperative work limit for GCD reduction.  Canonical reduction is exact
/// whenever it completes; pathological inputs fall back to a cheap monomial
/// reduction, which never affects zero testing (num == 0 decides).
struct GcdBudgetExceeded {};
inline thread_local long gcd_budget = -1;  // negative: unlimited

struct GcdBudgetGuard {
  long saved;
  explicit GcdBudgetGuard(long budget) : saved(gcd_budget) { gcd_budget = budget; }
  ~GcdBudgetGuard() { gcd_budget = saved; }
};

inline void gcd_tick(long cost) {
  if (gcd_budget >= 0 && (gcd_budget -= cost) < 0) throw GcdBudgetExceeded{};
}

inline Poly p_const(size_t nvars, const CRat& c) {
  Poly p;
  if (!c.is_zero()) p.emplace(Exps(nvars, 0), c);
  return p;
}

inline Poly p_mono(Exps e, const CRat& c) {
  Poly p;
  if (!c.is_zero()) p.emplace(std::move(e), c);
  return p;
}

inline bool p_is_const(const Poly& p) {
  if (p.empty()) return true;
  if (p.size() > 1) return false;
  return total_degree(p.begin()->first) == 0;
}

inline CRat p_const_val(const Poly& p) { return p.empty() ? CRat(0) : p.begin()->second; }

inline Poly p_add(const Poly& a, const Poly& b) {
  Poly r = a;
  for (const auto& [e, c] : b) {
    auto it = r.find(e);
    if (it == r.end()) {
      r.emplace(e, c);
    } else {
      it->second += c;
      if (it->second.is_zero()) r.erase(it);
    }
  }
  return r;
}

inline Poly p_neg(const Poly& a) {
  Poly r = a;
  for (auto& [e, c] : r) c = -c;
  return r;
}

inline Poly p_sub(const Poly& a, const Poly& b) { return p_add(a, p_neg(b)); }

inline Poly p_scale(const Poly& a, const CRat& c) {
  if (c.is_zero()) return {};
  Poly r = a;
  for (auto& [e, v] : r) v *= c;
  return r;
}

inline Poly p_mul(const Poly& a, const Poly& b) {
  gcd_tick(static_cast<long>(a.size() * b.size()));
  Poly r;
  for (const auto& [ea, ca] : a) {
    for (const auto& [eb, cb] : b) {
      Exps e = ea;
      for (size_t j = 0; j < e.size(); ++j) e[j] += eb[j];
      CRat c = ca * cb;
      auto it = r.find(e);
      if (it == r.end()) {
        r.emplace(std::move(e), std::move(c));
      } else {
        it->second += c;
        if (it->second.is_zero()) r.erase(it);
      }
    }
  }
  return r;
}

inline Poly p_pow(const Poly& a, long k, size_t nvars) {
  Poly acc = p_const(nvars, CRat(1));
  Poly base = a;
  for (long e = k; e > 0; e >>= 1) {
    if (e & 1) acc = p_mul(acc, base);
    if (e > 1) base = p_mul(base, base);
  }
  return acc;
}

inline int p_deg_in(const Poly& p, size_t v) {
  int d = -1;
  for (const auto& [e, c] : p) d = std::max(d, static_cast<int>(e[v]));
  return d;
}

inline Poly p_coeff_in(const Poly& p, size_t v, int k) {
  Poly r;
  for (const auto& [e, c] : p) {
    if (e[v] == k) {
      Exps e2 = e;
      e2[v] = 0;
      r.emplace(std::move(e2), c);
    }
  }
  return r;
}

inline Poly p_mul_var_pow(const Poly& p, size_t v, int k) {
  Poly r;
  for (const auto& [e, c] : p) {
    Exps e2 = e;
    e2[v] += k;
    r.emplace(std::move(e2), c);
  }
  return r;
}

inline std::vector<size_t> p_active_vars(const Poly& a, const Poly& b) {
  std::set<size_t> s;
  auto scan = [&s](const Poly& p) {
    for (const auto& [e, c] : p)
      for (size_t j = 0; j < e.size(); ++j)
        if (e[j] != 0) s.insert(j);
  };
  scan(a);
  scan(b);
  return {s.begin(), s.end()};
}

inline Poly p_monic(const Poly& p) {
  if (p.empty()) return p;
  CRat lead = p.rbegin()->second;
  return p_scale(p, CRat(1) / lead);
}

inline Poly p_gcd(const Poly& a, const Poly& b);

/// Exact division; throws std::logic_error if b does not divide a.
inline Poly p_exact_div(const Poly& a, const Poly& b) {
  if (b.empty()) throw std::logic_error("p_exact_div: division by zero polynomial");
  if (a.empty()) return {};
  if (p_is_const(b)) return p_scale(a, CRat(1) / p_const_val(b));
  size_t nv = a.begin()->first.size();
  size_t v = nv;
  for (const auto& [e, c] : b) {
    for (size_t j = 0; j < e.size(); ++j)
      if (e[j] != 0) {
        v = std::min(v, j);
        break;
      }
  }
  int db = p_deg_in(b, v);
  Poly lcb = p_coeff_in(b, v, db);
  Poly rem = a;
  Poly quot;
  while (!rem.empty()) {
    gcd_tick(static_cast<long>(rem.size()));
    int dr = p_deg_in(rem, v);
    if (dr < db) throw std::logic_error("p_exact_div: not divisible (degree)");
    Poly lcr = p_coeff_in(rem, v, dr);
    Poly q = p_exact_div(lcr, lcb);
    Poly qterm = p_mul_var_pow(q, v, dr - db);
    quot = p_add(quot, qterm);
    rem = p_sub(rem, p_mul(qterm, b));
    if (!rem.empty() && p_deg_in(rem, v) >= dr)
      throw std::logic_error("p_exact_div: not divisible (no progress)");
  }
  return quot;
}

/// Pseudo-remainder of a by b with respect to variable v.
inline Poly p_prem(Poly r, const Poly& b, size_t v) {
  int db = p_deg_in(b, v);
  Poly lcb = p_coeff_in(b, v, db);
  while (!r.empty() && p_deg_in(r, v) >= db) {
    gcd_tick(static_cast<long>(r.size()));
    int dr = p_deg_in(r, v);
    Poly lcr = p_coeff_in(r, v, dr);
    r = p_sub(p_mul(lcb, r), p_mul(p_mul_var_pow(lcr, v, dr - db), b));
  }
  return r;
}

inline Poly p_content_in(const Poly& p, size_t v) {
  Poly c;
  int d = p_deg_in(p, v);
  for (int k = 0; k <= d; ++k) {
    Poly ck = p_coeff_in(p, v, k);
    if (!ck.empty()) c = p_gcd(c, ck);
  }
  return c;
}

inline Poly p_primitive_in(const Poly& p, size_t v) {
  if (p.empty()) return p;
  Poly c = p_content_in(p, v);
  return p_exact_div(p, c);
}

/// Common monomial factor (per-variable minimum exponents), as a monomial.
inline Exps p_monomial_content(const Poly& p) {
  Exps m;
  bool first = true;
  for (const auto& [e, c] : p) {
    if (first) {
      m = e;
      first = false;
    } else {
      for (size_t j = 0; j < m.size(); ++j) m[j] = std::min(m[j], e[j]);
    }
  }
  return m;
}

inline Poly p_div_monomial(const Poly& p, const Exps& m) {
  Poly r;
  for (const auto& [e, c] : p) {
    Exps e2 = e;
    for (size_t j = 0; j < e2.size(); ++j) e2[j] -= m[j];
    r.emplace(std::move(e2), c);
  }
  return r;
}

/// GCD over the field of complex rationals; result is monic in grlex order.
inline Poly p_gcd(const Poly& a, const Poly& b) {
  if (a.empty()) return p_monic(b);
  if (b.empty()) return p_monic(a);
  gcd_tick(1);
  // fast paths: units and monomials
  if (p_is_const(a) || p_is_const(b))
    return p_const(a.begin()->first.size(), CRat(1));
  if (a.size() == 1 || b.size() == 1) {
    Exps ma = p_monomial_content(a);
    Exps mb = p_monomial_content(b);
    for (size_t j = 0; j < ma.size(); ++j) ma[j] = std::min(ma[j], mb[j]);
    return p_mono(std::move(ma), CRat(1));
  }
  auto act = p_active_vars(a, b);
  if (act.empty()) return p_monic(a);  // both constants: unit
  // choose the active variable with the smallest degree span
  size_t v = act[0];
  int best = INT32_MAX;
  for (size_t cand : act) {
    int d = std::max(p_deg_in(a, cand), p_deg_in(b, cand));
    if (d < best) {
      best = d;
      v = cand;
    }
  }
  if (act.size() == 1) {
    // univariate over a field: plain Euclid with monic remainders
    Poly A = a, B = b;
    if (p_deg_in(A, v) < p_deg_in(B, v)) std::swap(A, B);
    while (!B.empty()) {
      int db = p_deg_in(B, v);
      CRat lcb = p_coeff_in(B, v, db).begin()->second;
      Poly R = A;
      while (!R.empty() && p_deg_in(R, v) >= db) {
        int dr = p_deg_in(R, v);
        CRat lcr = p_coeff_in(R, v, dr).begin()->second;
        Poly q = p_mul_var_pow(p_const(A.begin()->first.size(), lcr / lcb), v, dr - db);
        R = p_sub(R, p_mul(q, B));
      }
      A = B;
      B = R;
    }
    return p_monic(A);
  }
  // multivariate: primitive PRS in the first active variable
  Poly ca = p_content_in(a, v), cb = p_content_in(b, v);
  Poly pa = p_exact_div(a, ca), pb = p_exact_div(b, cb);
  Poly cg = p_gcd(ca, cb);
  Poly A = pa, B = pb;
  if (p_deg_in(A, v) < p_deg_in(B, v)) std::swap(A, B);
  for (;;) {
    Poly R = p_prem(A, B, v);
    if (R.empty()) break;
    if (p_deg_in(R, v) == 0) {
      // coprime in v: gcd reduces to the content part
      return p_monic(cg);
    }
    A = B;
    B = p_primitive_in(R, v);
  }
  return p_monic(p_mul(cg, p_primitive_in(B, v)));
}

/// Exact polynomial square root, if the polynomial is a perfect square.
inline std::optional<Poly> p_sqrt(const Poly& p) {
  if (p.empty()) return Poly{};
  // leading term must be a perfect square
  const auto& [le, lc] = *p.rbegin();
  auto sc = crat_sqrt(lc);
  if (!sc) return std::nullopt;
  Exps se = le;
  for (auto& e : se) {
    if (e % 2 != 0) return std::nullopt;
    e /= 2;
  }
  Poly s = p_mono(se, *sc);
  Poly lead2 = p_scale(p_mono(se, *sc), CRat(2));
  Poly rem = p_sub(p, p_mul(s, s));
  int guard = 0;
  while (!rem.empty()) {
    if (++guard > 512) return std::nullopt;
    const auto& [re, rc] = *rem.rbegin();
    // next term = lt(rem) / (2 * lt(s))
    Exps te = re;
    for (size_t j = 0; j < te.size(); ++j) {
      te[j] -= se[j];
      if (te[j] < 0) return std::nullopt;
    }
    CRat tc = rc / (CRat(2) * *sc);
    Poly tterm = p_mono(te, tc);
    if (!poly::GrlexLess{}(te, se)) return std::nullopt;  // must strictly decrease
    rem = p_sub(rem, p_add(p_mul(lead2, tterm), p_mul(tterm, tterm)));
    lead2 = p_add(lead2, p_scale(tterm, CRat(2)));
    s = p_add(s, tterm);
  }
  return s;
}

}  // namespace poly

/// One generator of the canonical rational-function representation.
struct Generator {
  enum class Kind : uint8_t { VarT, VarX, Param, ExpReal, ExpImag, Func };
  Kind kind;
  std::string name;   // Param, Func
  Rational freq{0};   // ExpReal: exp(freq*t); ExpImag: exp(i*freq*t); freq > 0
  int dt = 0, dx = 0;           // Func
  bool conjugated = false;      // Func
  bool dep_t = false, dep_x = false;  // Func

  friend bool operator==(const Generator& a, const Generator& b) {
    return a.kind == b.kind && a.name == b.name && a.freq == b.freq && a.dt == b.dt &&
           a.dx == b.dx && a.conjugated == b.conjugated;
  }
  friend bool operator<(const Generator& a, const Generator& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    if (a.name != b.name) return a.name < b.name;
    if (a.conjugated != b.conjugated) return a.conjugated < b.conjugated;
    if (a.dt != b.dt) return a.dt < b.dt;
    return a.dx < b.dx;
  }
};

/// Canonical form: a reduced rational function over a pruned generator set.
/// Equal in-class expressions produce identical forms (same generators, same
/// numerator and denominator polynomials, denominator monic in grlex order).
struct CanonicalForm {
  std::vector<Generator> gens;
  poly::Poly num, den;

  bool is_zero() const { return num.empty(); }
  bool is_constant() const { return poly::p_is_const(num) && poly::p_is_const(den); }
  CRat constant_value() const { return poly::p_const_val(num) / poly::p_const_val(den); }

  friend bool operator==(const CanonicalForm& a, const CanonicalForm& b) {
    return a.gens == b.gens && a.num == b.num && a.den == b.den;
  }
};

namespace detail {

struct RatFn {
  poly::Poly num, den;  // den nonzero
};

struct ConvCtx {
  std::vector<Generator> gens;
  size_t nvars() const { return gens.size(); }
  std::optional<size_t> find(const Generator& g) const {
    for (size_t j = 0; j < gens.size(); ++j)
      if (gens[j] == g) return j;
    return std::nullopt;
  }
};

inline RatFn fn_reduce(RatFn f) {
  using namespace poly;
  if (f.num.empty()) {
    size_t nv = f.den.empty() ? 0 : f.den.begin()->first.size();
    return {Poly{}, p_const(nv, CRat(1))};
  }
  // common monomial factor: cheap and always applied
  Exps mn = p_monomial_content(f.num);
  Exps md = p_monomial_content(f.den);
  bool any = false;
  for (size_t j = 0; j < mn.size(); ++j) {
    mn[j] = std::min(mn[j], md[j]);
    any |= mn[j] != 0;
  }
  if (any) {
    f.num = p_div_monomial(f.num, mn);
    f.den = p_div_monomial(f.den, mn);
  }
  if (!p_is_const(f.den) && f.num.size() > 1 && f.den.size() > 1) {
    GcdBudgetGuard guard(200000);
    try {
      Poly g = p_gcd(f.num, f.den);
      if (!p_is_const(g)) {
        Poly qn = p_exact_div(f.num, g);
        Poly qd = p_exact_div(f.den, g);
        f.num = std::move(qn);
        f.den = std::move(qd);
      }
    } catch (const GcdBudgetExceeded&) {
      // keep the unreduced form; zero tests remain exact
    }
  }
  CRat lead = f.den.rbegin()->second;
  if (!lead.is_one()) {
    CRat inv = CRat(1) / lead;
    f.num = p_scale(f.num, inv);
    f.den = p_scale(f.den, inv);
  }
  return f;
}

inline RatFn fn_const(size_t nv, const CRat& c) {
  return {poly::p_const(nv, c), poly::p_const(nv, CRat(1))};
}

inline RatFn fn_add(const RatFn& a, const RatFn& b) {
  using namespace poly;
  RatFn r;
  if (a.den == b.den) {
    r.num = p_add(a.num, b.num);
    r.den = a.den;
  } else {
    r.num = p_add(p_mul(a.num, b.den), p_mul(b.num, a.den));
    r.den = p_mul(a.den, b.den);
  }
  return fn_reduce(std::move(r));
}

inline RatFn fn_mul(const RatFn& a, const RatFn& b) {
  using namespace poly;
  RatFn r{p_mul(a.num, b.num), p_mul(a.den, b.den)};
  return fn_reduce(std::move(r));
}

inline RatFn fn_invert(const RatFn& a) {
  if (a.num.empty()) throw ExprError("division by an expression that is identically zero");
  RatFn r{a.den, a.num};
  return fn_reduce(std::move(r));
}

inline RatFn fn_pow(const RatFn& a, long k, size_t nv) {
  if (k == 0) return fn_const(nv, CRat(1));
  if (k < 0) return fn_pow(fn_invert(a), -k, nv);
  RatFn acc = fn_const(nv, CRat(1));
  RatFn base = a;
  for (long e = k; e > 0; e >>= 1) {
    if (e & 1) acc = fn_mul(acc, base);
    if (e > 1) base = fn_mul(base, base);
  }
  return acc;
}

struct ScanInfo {
  bool has_t = false, has_x = false;
  std::set<std::string> params;
  std::set<Generator> funcs;
  std::vector<Rational> re_freqs, im_freqs;
};

CRat linear_t_frequency(const Expr& arg);

inline void scan_expr(const Expr& e, ScanInfo& info) {
  const ExprNode& n = e.node();
  switch (n.kind) {
    case ExprKind::Number:
      return;
    case ExprKind::VarT:
      info.has_t = true;
      return;
    case ExprKind::VarX:
      info.has_x = true;
      return;
    case ExprKind::Param:
      info.params.insert(n.name);
      return;
    case ExprKind::FuncSym: {
      Generator g;
      g.kind = Generator::Kind::Func;
      g.name = n.name;
      g.dt = n.dt;
      g.dx = n.dx;
      g.conjugated = n.conjugated;
      g.dep_t = n.dep_t;
      g.dep_x = n.dep_x;
      info.funcs.insert(g);
      return;
    }
    case ExprKind::Exp:
    case ExprKind::Sin:
    case ExprKind::Cos: {
      CRat mu = linear_t_frequency(n.kids[0]);
      CRat nu = n.kind == ExprKind::Exp ? mu : CRat(-mu.im, mu.re);  // trig: nu = i*mu
      if (nu.re != 0) info.re_freqs.push_back(boost::multiprecision::abs(nu.re));
      if (nu.im != 0) info.im_freqs.push_back(boost::multiprecision::abs(nu.im));
      return;
    }
    default:
      for (const auto& k : n.kids) scan_expr(k, info);
      return;
  }
}

inline bool contains_transcendental(const Expr& e) {
  const ExprNode& n = e.node();
  if (n.kind == ExprKind::Exp || n.kind == ExprKind::Sin || n.kind == ExprKind::Cos ||
      n.kind == ExprKind::FuncSym)
    return true;
  for (const auto& k : n.kids)
    if (contains_transcendental(k)) return true;
  return false;
}

class Converter {
 public:
  explicit Converter(ConvCtx ctx) : ctx_(std::move(ctx)) {}

  const ConvCtx& ctx() const { return ctx_; }

  RatFn convert(const Expr& e) {
    const ExprNode& n = e.node();
    size_t nv = ctx_.nvars();
    switch (n.kind) {
      case ExprKind::Number:
        return fn_const(nv, n.value);
      case ExprKind::VarT:
        return gen_fn(Generator{Generator::Kind::VarT, "", Rational(0), 0, 0, false, true, false});
      case ExprKind::VarX:
        return gen_fn(Generator{Generator::Kind::VarX, "", Rational(0), 0, 0, false, false, true});
      case ExprKind::Param: {
        Generator g;
        g.kind = Generator::Kind::Param;
        g.name = n.name;
        return gen_fn(g);
      }
      case ExprKind::FuncSym: {
        Generator g;
        g.kind = Generator::Kind::Func;
        g.name = n.name;
        g.dt = n.dt;
        g.dx = n.dx;
        g.conjugated = n.conjugated;
        g.dep_t = n.dep_t;
        g.dep_x = n.dep_x;
        return gen_fn(g);
      }
      case ExprKind::Sum: {
        RatFn acc = fn_const(nv, CRat(0));
        for (const auto& k : n.kids) acc = fn_add(acc, convert(k));
        return acc;
      }
      case ExprKind::Product: {
        RatFn acc = fn_const(nv, CRat(1));
        for (const auto& k : n.kids) acc = fn_mul(acc, convert(k));
        return acc;
      }
      case ExprKind::Power:
        return fn_pow(convert(n.kids[0]), n.exponent, nv);
      case ExprKind::Exp: {
        CRat nu = linear_t_frequency(n.kids[0]);
        return exp_fn(nu);
      }
      case ExprKind::Sin: {
        CRat mu = linear_t_frequency(n.kids[0]);
        CRat nu(-mu.im, mu.re);
        // sin = (E(nu) - E(-nu)) / (2i)
        RatFn d = fn_add(exp_fn(nu), fn_mul(fn_const(nv, CRat(-1)), exp_fn(-nu)));
        return fn_mul(d, fn_const(nv, CRat(1) / CRat(Rational(0), Rational(2))));
      }
      case ExprKind::Cos: {
        CRat mu = linear_t_frequency(n.kids[0]);
        CRat nu(-mu.im, mu.re);
        RatFn s = fn_add(exp_fn(nu), exp_fn(-nu));
        return fn_mul(s, fn_const(nv, CRat(Rational(1, 2))));
      }
    }
    throw ExprError("convert: unreachable");
  }

 private:
  ConvCtx ctx_;

  RatFn gen_fn(const Generator& g) {
    auto idx = ctx_.find(g);
    if (!idx) throw std::logic_error("canonical: generator missing from context");
    poly::Exps e(ctx_.nvars(), 0);
    e[*idx] = 1;
    return {poly::p_mono(std::move(e), CRat(1)), poly::p_const(ctx_.nvars(), CRat(1))};
  }

  // exp(nu*t) as a monomial over the exp generators; negative powers go to
  // the denominator so polynomial exponents stay nonnegative.
  RatFn exp_fn(const CRat& nu) {
    using namespace poly;
    Exps en(ctx_.nvars(), 0), ed(ctx_.nvars(), 0);
    auto place = [&](Generator::Kind kind, const Rational& part) {
      if (part == 0) return;
      for (size_t j = 0; j < ctx_.gens.size(); ++j) {
        if (ctx_.gens[j].kind == kind) {
          Rational q = part / ctx_.gens[j].freq;
          Int qn = rat_num(q), qd = rat_den(q);
          if (qd != 1) throw std::logic_error("canonical: frequency base does not divide");
          long k = qn.convert_to<long>();
          if (k > 0)
            en[j] += static_cast<int32_t>(k);
          else
            ed[j] += static_cast<int32_t>(-k);
          return;
        }
      }
      throw std::logic_error("canonical: exp generator missing");
    };
    place(Generator::Kind::ExpReal, nu.re);
    place(Generator::Kind::ExpImag, nu.im);
    return {p_mono(std::move(en), CRat(1)), p_mono(std::move(ed), CRat(1))};
  }
};

/// The argument of exp/sin/cos must be (complex rational)*t.
inline CRat linear_t_frequency(const Expr& arg) {
  if (contains_transcendental(arg))
    throw CanonicalError("nested transcendental: exp/sin/cos argument contains exp, sin, cos "
                         "or an opaque function symbol");
  ScanInfo info;
  scan_expr(arg, info);
  if (info.has_x || !info.params.empty())
    throw CanonicalError("transcendental argument must be a rational multiple of t");
  ConvCtx ctx;
  if (info.has_t)
    ctx.gens.push_back(Generator{Generator::Kind::VarT, "", Rational(0), 0, 0, false, true, false});
  Converter conv(ctx);
  RatFn f = conv.convert(arg);
  if (!poly::p_is_const(f.den))
    throw CanonicalError("transcendental argument must be polynomial in t");
  CRat dv = poly::p_const_val(f.den);
  CRat c;
  for (const auto& [e, coeff] : f.num) {
    int64_t d = poly::total_degree(e);
    if (d == 0) throw CanonicalError("transcendental argument has a constant part");
    if (d > 1) throw CanonicalError("transcendental argument must be linear in t");
    c = coeff / dv;
  }
  return c;
}

inline Rational vector_gcd(const std::vector<Rational>& v) {
  Rational g(0);
  for (const auto& r : v) g = rational_gcd(g, r);
  return g;
}

}  // namespace detail

/// Canonicalize an in-class expression.  Throws CanonicalError when the
/// expression leaves the closed class, ExprError on division by zero.
inline CanonicalForm canonicalize(const Expr& e) {
  using namespace detail;
  using namespace poly;
  ScanInfo info;
  scan_expr(e, info);

  ConvCtx ctx;
  if (info.has_t)
    ctx.gens.push_back(Generator{Generator::Kind::VarT, "", Rational(0), 0, 0, false, true, false});
  if (info.has_x)
    ctx.gens.push_back(Generator{Generator::Kind::VarX, "", Rational(0), 0, 0, false, false, true});
  for (const auto& p : info.params) {
    Generator g;
    g.kind = Generator::Kind::Param;
    g.name = p;
    ctx.gens.push_back(g);
  }
  Rational alpha = vector_gcd(info.re_freqs);
  Rational gamma = vector_gcd(info.im_freqs);
  if (alpha != 0) {
    Generator g;
    g.kind = Generator::Kind::ExpReal;
    g.freq = alpha;
    g.dep_t = true;
    ctx.gens.push_back(g);
  }
  if (gamma != 0) {
    Generator g;
    g.kind = Generator::Kind::ExpImag;
    g.freq = gamma;
    g.dep_t = true;
    ctx.gens.push_back(g);
  }
  for (const auto& f : info.funcs) ctx.gens.push_back(f);

  Converter conv(ctx);
  RatFn f = fn_reduce(conv.convert(e));

  CanonicalForm cf;
  cf.gens = ctx.gens;
  cf.num = std::move(f.num);
  cf.den = std::move(f.den);

  // exp-generator exponent renormalization: if every exponent of an exp
  // generator is a multiple of g > 1, coarsen the base frequency.
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    auto& gen = cf.gens[j];
    if (gen.kind != Generator::Kind::ExpReal && gen.kind != Generator::Kind::ExpImag) continue;
    int64_t g = 0;
    auto fold = [&g, j](const Poly& p) {
      for (const auto& [e, c] : p) {
        int64_t v = e[j] < 0 ? -static_cast<int64_t>(e[j]) : e[j];
        if (v != 0) g = g == 0 ? v : boost::multiprecision::gcd(Int(g), Int(v)).convert_to<int64_t>();
      }
    };
    fold(cf.num);
    fold(cf.den);
    if (g > 1) {
      auto rescale = [&](Poly& p) {
        Poly q;
        for (const auto& [e, c] : p) {
          Exps e2 = e;
          e2[j] = static_cast<int32_t>(e2[j] / g);
          q.emplace(std::move(e2), c);
        }
        p = std::move(q);
      };
      rescale(cf.num);
      rescale(cf.den);
      gen.freq *= g;
    }
  }

  // prune unused generators
  std::vector<size_t> keep;
  for (size_t j = 0; j < cf.gens.size(); ++j) {
    bool used = false;
    for (const auto& [e, c] : cf.num)
      if (e[j] != 0) {
        used = true;
        break;
      }
    if (!used)
      for (const auto& [e, c] : cf.den)
        if (e[j] != 0) {
          used = true;
          break;
        }
    if (used) keep.push_back(j);
  }
  if (keep.size() != cf.gens.size()) {
    std::vector<Generator> gens2;
    for (auto j : keep) gens2.push_back(cf.gens[j]);
    auto remap = [&keep](const Poly& p) {
      Poly q;
      for (const auto& [e, c] : p) {
        Exps e2(keep.size());
        for (size_t m = 0; m < keep.size(); ++m) e2[m] = e[keep[m]];
        q.emplace(std::move(e2), c);
      }
      return q;
    };
    cf.num = remap(cf.num);
    cf.den = remap(cf.den);
    cf.gens = std::move(gens2);
  }

  // re-establish the monic denominator after reindexing
  if (!cf.den.empty()) {
    CRat lead = cf.den.rbegin()->second;
    if (!lead.is_one()) {
      CRat inv = CRat(1) / lead;
      cf.num = p_scale(cf.num, inv);
      cf.den = p_scale(cf.den, inv);
    }
  }
  if (cf.num.empty()) {
    cf.gens.clear();
    cf.num.clear();
    cf.den = p_const(0, CRat(1));
  }
  return cf;
}

namespace detail {

inline Expr generator_to_expr(const Generator& g, int exponent) {
  switch (g.kind) {
    case Generator::Kind::VarT:
      return Expr::pow(Expr::t(), exponent);
    case Generator::Kind::VarX:
      return Expr::pow(Expr::x(), exponent);
    case Generator::Kind::Param:
      return Expr::pow(Expr::param(g.name), exponent);
    case Generator::Kind::ExpReal:
      return Expr::exp(Expr::number(CRat(g.freq * exponent)) * Expr::t());
    case Generator::Kind::ExpImag: {
      Expr arg = Expr::number(CRat(g.freq * exponent)) * Expr::t();
      return Expr::cos(arg) + Expr::i() * Expr::sin(arg);
    }
    case Generator::Kind::Func:
      return Expr::pow(Expr::func_sym(g.name, g.dep_t, g.dep_x, g.dt, g.dx, g.conjugated),
                       exponent);
  }
  throw ExprError("generator_to_expr: unreachable");
}

inline Expr poly_to_expr(const poly::Poly& p, const std::vector<Generator>& gens) {
  std::vector<Expr> terms;
  for (const auto& [e, c] : p) {
    std::vector<Expr> factors;
    factors.push_back(Expr::number(c));
    for (size_t j = 0; j < gens.size(); ++j)
      if (e[j] != 0) factors.push_back(generator_to_expr(gens[j], e[j]));
    terms.push_back(Expr::product(std::move(factors)));
  }
  return Expr::sum(std::move(terms));
}

}  // namespace detail

/// Rebuild an expression tree from a canonical form (always in-class).
inline Expr to_expr(const CanonicalForm& cf) {
  Expr n = detail::poly_to_expr(cf.num, cf.gens);
  if (poly::p_is_const(cf.den)) {
    CRat d = poly::p_const_val(cf.den);
    return d.is_one() ? n : n * Expr::number(CRat(1) / d);
  }
  return n / detail::poly_to_expr(cf.den, cf.gens);
}

/// Exact square root of a canonical form, if representable in-class.
/// Handles odd exponents of exp generators by halving the base frequency.
inline std::optional<CanonicalForm> canonical_sqrt(const CanonicalForm& cf) {
  using namespace poly;
  if (cf.is_zero()) return CanonicalForm{{}, {}, p_const(0, CRat(1))};
  CanonicalForm w = cf;
  // refine exp bases where odd exponents block an exact square root
  for (size_t j = 0; j < w.gens.size(); ++j) {
    auto& g = w.gens[j];
    if (g.kind != Generator::Kind::ExpReal && g.kind != Generator::Kind::ExpImag) continue;
    bool odd = false;
    auto scan = [&odd, j](const Poly& p) {
      for (const auto& [e, c] : p)
        if (e[j] % 2 != 0) odd = true;
    };
    scan(w.num);
    scan(w.den);
    if (odd) {
      auto dbl = [&](Poly& p) {
        Poly q;
        for (const auto& [e, c] : p) {
          Exps e2 = e;
          e2[j] *= 2;
          q.emplace(std::move(e2), c);
        }
        p = std::move(q);
      };
      dbl(w.num);
      dbl(w.den);
      g.freq /= 2;
    }
  }
  auto ns = p_sqrt(w.num);
  auto ds = p_sqrt(w.den);
  if (!ns || !ds) return std::nullopt;
  CanonicalForm r;
  r.gens = w.gens;
  r.num = *ns;
  r.den = *ds;
  return r;
}

}  // namespace symclass
