#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace symclass {

using Int = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Int rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Int rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

/// gcd over Q, taken nonnegative: gcd(a/b, c/d) = gcd(a*d, c*b) / (b*d).
inline Rational rational_gcd(const Rational& a, const Rational& b) {
  if (a == 0) return b < 0 ? Rational(-b) : b;
  if (b == 0) return a < 0 ? Rational(-a) : a;
  Int an = rat_num(a), ad = rat_den(a);
  Int bn = rat_num(b), bd = rat_den(b);
  Int g = boost::multiprecision::gcd(an * bd, bn * ad);
  Rational r(g, ad * bd);
  return r < 0 ? Rational(-r) : r;
}

/// Exact square root of a nonnegative rational, if one exists.
inline std::optional<Rational> rational_sqrt(const Rational& r) {
  if (r < 0) return std::nullopt;
  if (r == 0) return Rational(0);
  Int n = rat_num(r), d = rat_den(r);
  Int sn = boost::multiprecision::sqrt(n);
  Int sd = boost::multiprecision::sqrt(d);
  if (sn * sn != n || sd * sd != d) return std::nullopt;
  return Rational(sn, sd);
}

inline std::string rational_to_string(const Rational& r) {
  std::string s = rat_num(r).str();
  if (rat_den(r) != 1) s += "/" + rat_den(r).str();
  return s;
}

/// Complex number with exact rational real and imaginary parts.
struct CRat {
  Rational re{0};
  Rational im{0};

  CRat() = default;
  CRat(long n) : re(n) {}  // NOLINT: implicit by design, mirrors integer literals
  CRat(Rational r) : re(std::move(r)) {}
  CRat(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

  static CRat i() { return CRat(Rational(0), Rational(1)); }

  bool is_zero() const { return re == 0 && im == 0; }
  bool is_one() const { return re == 1 && im == 0; }
  bool is_real() const { return im == 0; }

  CRat conj() const { return CRat(re, -im); }

  friend CRat operator+(const CRat& a, const CRat& b) { return CRat(a.re + b.re, a.im + b.im); }
  friend CRat operator-(const CRat& a, const CRat& b) { return CRat(a.re - b.re, a.im - b.im); }
  friend CRat operator-(const CRat& a) { return CRat(-a.re, -a.im); }
  friend CRat operator*(const CRat& a, const CRat& b) {
    return CRat(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
  }
  friend CRat operator/(const CRat& a, const CRat& b) {
    Rational n = b.re * b.re + b.im * b.im;
    if (n == 0) throw std::domain_error("CRat: division by zero");
    return CRat((a.re * b.re + a.im * b.im) / n, (a.im * b.re - a.re * b.im) / n);
  }
  CRat& operator+=(const CRat& o) { return *this = *this + o; }
  CRat& operator-=(const CRat& o) { return *this = *this - o; }
  CRat& operator*=(const CRat& o) { return *this = *this * o; }
  CRat& operator/=(const CRat& o) { return *this = *this / o; }

  friend bool operator==(const CRat& a, const CRat& b) { return a.re == b.re && a.im == b.im; }
  friend bool operator!=(const CRat& a, const CRat& b) { return !(a == b); }

  CRat pow(long k) const {
    if (k < 0) return CRat(1) / pow(-k);
    CRat acc(1), base = *this;
    for (long e = k; e > 0; e >>= 1) {
      if (e & 1) acc *= base;
      if (e > 1) base *= base;
    }
    return acc;
  }

  std::string str() const {
    if (im == 0) return rational_to_string(re);
    std::string is = rational_to_string(im) + "*i";
    if (re == 0) return is;
    if (im > 0) return rational_to_string(re) + "+" + is;
    return rational_to_string(re) + "-" + rational_to_string(-im) + "*i";
  }
};

/// Exact complex square root, when both the result's parts are rational.
/// Only the cases needed here: nonnegative real, or zero.
inline std::optional<CRat> crat_sqrt(const CRat& c) {
  if (c.im != 0) return std::nullopt;
  auto r = rational_sqrt(c.re);
  if (!r) return std::nullopt;
  return CRat(*r);
}

}  // namespace symclass
