#pragma once

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <complex>
#include <map>
#include <stdexcept>
#include <string>

#include "symclass/expr.hpp"

namespace symclass {

class EvalError : public std::runtime_error {
 public:
  enum class Kind { PoleProximity, UnboundParam, UnboundFunction };
  EvalError(Kind k, const std::string& what) : std::runtime_error(what), kind_(k) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

using MpFloat = boost::multiprecision::cpp_bin_float_50;

/// Minimal complex type over the 50-digit float backend.
struct MpComplex {
  MpFloat re{0}, im{0};

  MpComplex() = default;
  MpComplex(MpFloat r) : re(std::move(r)) {}
  MpComplex(MpFloat r, MpFloat i) : re(std::move(r)), im(std::move(i)) {}
  MpComplex(double r) : re(r) {}
  MpComplex(double r, double i) : re(r), im(i) {}

  friend MpComplex operator+(const MpComplex& a, const MpComplex& b) {
    return {a.re + b.re, a.im + b.im};
  }
  friend MpComplex operator-(const MpComplex& a, const MpComplex& b) {
    return {a.re - b.re, a.im - b.im};
  }
  friend MpComplex operator*(const MpComplex& a, const MpComplex& b) {
    return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
  }
  friend MpComplex operator/(const MpComplex& a, const MpComplex& b) {
    MpFloat n = b.re * b.re + b.im * b.im;
    return {(a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n};
  }
};

inline MpFloat abs(const MpComplex& z) {
  using boost::multiprecision::sqrt;
  return sqrt(z.re * z.re + z.im * z.im);
}
inline MpComplex exp(const MpComplex& z) {
  using boost::multiprecision::cos;
  using boost::multiprecision::exp;
  using boost::multiprecision::sin;
  MpFloat m = exp(z.re);
  return {m * cos(z.im), m * sin(z.im)};
}
inline MpComplex sin(const MpComplex& z) {
  using boost::multiprecision::cos;
  using boost::multiprecision::cosh;
  using boost::multiprecision::sin;
  using boost::multiprecision::sinh;
  return {sin(z.re) * cosh(z.im), cos(z.re) * sinh(z.im)};
}
inline MpComplex cos(const MpComplex& z) {
  using boost::multiprecision::cos;
  using boost::multiprecision::cosh;
  using boost::multiprecision::sin;
  using boost::multiprecision::sinh;
  return {cos(z.re) * cosh(z.im), -sin(z.re) * sinh(z.im)};
}
inline MpComplex log(const MpComplex& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::log;
  return {log(abs(z)), atan2(z.im, z.re)};
}
inline MpComplex sqrt(const MpComplex& z) {
  using boost::multiprecision::atan2;
  using boost::multiprecision::cos;
  using boost::multiprecision::sin;
  using boost::multiprecision::sqrt;
  MpFloat r = sqrt(abs(z));
  MpFloat th = atan2(z.im, z.re) / 2;
  return {r * cos(th), r * sin(th)};
}
inline MpComplex atan(const MpComplex& z) {
  // atan z = (i/2) [log(1 - iz) - log(1 + iz)]
  MpComplex iz(-z.im, z.re);
  MpComplex one(MpFloat(1), MpFloat(0));
  MpComplex d = log(one - iz) - log(one + iz);
  return MpComplex(MpFloat(0), MpFloat(1) / 2) * d;
}
inline MpComplex tanh(const MpComplex& z) {
  MpComplex e2 = exp(z * MpComplex(MpFloat(2), MpFloat(0)));
  MpComplex one(MpFloat(1), MpFloat(0));
  return (e2 - one) / (e2 + one);
}
inline MpComplex cosh(const MpComplex& z) {
  MpComplex e = exp(z);
  MpComplex one(MpFloat(1), MpFloat(0));
  return (e + one / e) / MpComplex(MpFloat(2), MpFloat(0));
}

namespace detail {

template <class C>
struct ScalarTraits;

template <>
struct ScalarTraits<std::complex<double>> {
  static std::complex<double> from_crat(const CRat& c) {
    return {c.re.convert_to<double>(), c.im.convert_to<double>()};
  }
  static double magnitude(const std::complex<double>& z) { return std::abs(z); }
  static constexpr double pole_eps = 1e-12;
};

template <>
struct ScalarTraits<MpComplex> {
  static MpComplex from_crat(const CRat& c) {
    return {MpFloat(rat_num(c.re)) / MpFloat(rat_den(c.re)),
            MpFloat(rat_num(c.im)) / MpFloat(rat_den(c.im))};
  }
  static double magnitude(const MpComplex& z) { return abs(z).convert_to<double>(); }
  static constexpr double pole_eps = 1e-40;
};

}  // namespace detail

template <class C>
struct EvalPoint {
  C t{};
  C x{};
  std::map<std::string, C> params;
};

struct EvalStats {
  double max_magnitude = 0.0;
};

template <class C>
C eval(const Expr& e, const EvalPoint<C>& pt, EvalStats* stats = nullptr) {
  using Traits = detail::ScalarTraits<C>;
  const ExprNode& n = e.node();
  auto track = [stats](const C& v) {
    if (stats) stats->max_magnitude = std::max(stats->max_magnitude, Traits::magnitude(v));
    return v;
  };
  switch (n.kind) {
    case ExprKind::Number:
      return track(Traits::from_crat(n.value));
    case ExprKind::VarT:
      return track(pt.t);
    case ExprKind::VarX:
      return track(pt.x);
    case ExprKind::Param: {
      auto it = pt.params.find(n.name);
      if (it == pt.params.end())
        throw EvalError(EvalError::Kind::UnboundParam, "unbound parameter '" + n.name + "'");
      return track(it->second);
    }
    case ExprKind::FuncSym:
      throw EvalError(EvalError::Kind::UnboundFunction,
                      "cannot evaluate opaque function symbol '" + n.name + "'");
    case ExprKind::Sum: {
      C acc{};
      for (const auto& k : n.kids) acc = acc + eval(k, pt, stats);
      return track(acc);
    }
    case ExprKind::Product: {
      C acc = Traits::from_crat(CRat(1));
      for (const auto& k : n.kids) acc = acc * eval(k, pt, stats);
      return track(acc);
    }
    case ExprKind::Power: {
      C base = eval(n.kids[0], pt, stats);
      long k = n.exponent;
      if (k < 0) {
        double scale = stats ? 1.0 + stats->max_magnitude : 1.0;
        if (Traits::magnitude(base) <= Traits::pole_eps * scale)
          throw EvalError(EvalError::Kind::PoleProximity, "evaluation point too close to a pole");
        base = Traits::from_crat(CRat(1)) / base;
        k = -k;
      }
      C acc = Traits::from_crat(CRat(1));
      for (long j = 0; j < k; ++j) acc = acc * base;
      return track(acc);
    }
    case ExprKind::Exp:
      return track(exp(eval(n.kids[0], pt, stats)));
    case ExprKind::Sin:
      return track(sin(eval(n.kids[0], pt, stats)));
    case ExprKind::Cos:
      return track(cos(eval(n.kids[0], pt, stats)));
  }
  throw ExprError("eval: unreachable");
}

inline std::complex<double> eval_d(const Expr& e, std::complex<double> t, std::complex<double> x,
                                   const std::map<std::string, std::complex<double>>& params = {}) {
  EvalPoint<std::complex<double>> pt;
  pt.t = t;
  pt.x = x;
  pt.params = params;
  return eval(e, pt);
}

/// Evaluate with a requested number of significant digits: the double
/// backend covers up to 15, the 50-digit backend the rest.
inline MpComplex eval_precise(const Expr& e, const MpComplex& t, const MpComplex& x,
                              const std::map<std::string, MpComplex>& params = {},
                              int digits = 50) {
  if (digits > 50) throw std::invalid_argument("requested precision exceeds the 50-digit backend");
  if (digits <= 15) {
    std::map<std::string, std::complex<double>> pd;
    for (const auto& [k, v] : params)
      pd[k] = {v.re.convert_to<double>(), v.im.convert_to<double>()};
    std::complex<double> r = eval_d(e, {t.re.convert_to<double>(), t.im.convert_to<double>()},
                                    {x.re.convert_to<double>(), x.im.convert_to<double>()}, pd);
    return {MpFloat(r.real()), MpFloat(r.imag())};
  }
  EvalPoint<MpComplex> pt;
  pt.t = t;
  pt.x = x;
  pt.params = params;
  return eval(e, pt);
}

}  // namespace symclass
