#pragma once

// Seeded random in-class expression generators shared by the unit and
// acceptance suites.  Fixed seeds keep property failures reproducible.

#include <random>
#include <vector>

#include "symclass/expr.hpp"

namespace testgen {

using symclass::CRat;
using symclass::Expr;
using symclass::Rational;

inline constexpr uint64_t kSeed = 0x5EEDULL;

class ExprGen {
 public:
  explicit ExprGen(uint64_t seed = kSeed) : rng_(seed) {}

  std::mt19937_64& rng() { return rng_; }

  Rational small_rational(bool nonzero = false) {
    std::uniform_int_distribution<int> num(-6, 6);
    std::uniform_int_distribution<int> den(1, 4);
    int n = num(rng_);
    while (nonzero && n == 0) n = num(rng_);
    return Rational(n, den(rng_));
  }

  CRat small_crat(bool nonzero = false) {
    CRat c(small_rational(), small_rational());
    while (nonzero && c.is_zero()) c = CRat(small_rational(), small_rational());
    return c;
  }

  /// Random expression in the exact class.  `vars` selects which of t, x may
  /// appear; depth bounds the tree.
  Expr expr(int depth, bool use_t = true, bool use_x = true, bool use_params = false) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
    switch (pick(rng_)) {
      case 0:
        return Expr::number(small_crat());
      case 1:
        if (use_t) return Expr::t();
        [[fallthrough]];
      case 2:
        if (use_x) return Expr::x();
        return Expr::number(small_crat());
      case 3:
        if (use_params) return Expr::param("nu");
        return expr(depth - 1, use_t, use_x, use_params) + Expr::number(small_crat());
      case 4:
        return expr(depth - 1, use_t, use_x, use_params) +
               expr(depth - 1, use_t, use_x, use_params);
      case 5:
        return expr(depth - 1, use_t, use_x, use_params) *
               expr(depth - 1, use_t, use_x, use_params);
      case 6: {
        std::uniform_int_distribution<int> ex(-2, 3);
        int k = ex(rng_);
        Expr base = expr(depth - 1, use_t, use_x, use_params);
        if (k < 0) base = base + Expr::number(nonzero_shift());  // keep away from 0
        return Expr::pow(base, k == 0 ? 2 : k);
      }
      case 7:
        if (use_t) return Expr::exp(Expr::integer(freq()) * Expr::t());
        return Expr::number(small_crat());
      case 8:
        if (use_t) return Expr::sin(Expr::integer(freq()) * Expr::t());
        return Expr::number(small_crat());
      default:
        if (use_t) return Expr::cos(Expr::integer(freq()) * Expr::t());
        return Expr::number(small_crat());
    }
  }

  /// Random polynomial-with-exp/trig function of t only, degree <= 3 pieces.
  Expr t_function(int terms = 3) {
    std::vector<Expr> acc;
    std::uniform_int_distribution<int> deg(0, 3);
    std::uniform_int_distribution<int> kind(0, 3);
    for (int j = 0; j < terms; ++j) {
      Expr c = Expr::number(small_crat());
      switch (kind(rng_)) {
        case 0:
          acc.push_back(c * Expr::pow(Expr::t(), deg(rng_)));
          break;
        case 1:
          acc.push_back(c * Expr::exp(Expr::integer(freq()) * Expr::t()));
          break;
        case 2:
          acc.push_back(c * Expr::sin(Expr::integer(freq()) * Expr::t()));
          break;
        default:
          acc.push_back(c * Expr::cos(Expr::integer(freq()) * Expr::t()));
          break;
      }
    }
    return Expr::sum(std::move(acc));
  }

  /// Random real-valued function of t (for potentials iW(t)).
  Expr real_t_function(int terms = 3) {
    std::vector<Expr> acc;
    std::uniform_int_distribution<int> deg(0, 3);
    std::uniform_int_distribution<int> kind(0, 3);
    for (int j = 0; j < terms; ++j) {
      Expr c = Expr::number(CRat(small_rational()));
      switch (kind(rng_)) {
        case 0:
          acc.push_back(c * Expr::pow(Expr::t(), deg(rng_)));
          break;
        case 1:
          acc.push_back(c * Expr::exp(Expr::integer(freq()) * Expr::t()));
          break;
        case 2:
          acc.push_back(c * Expr::sin(Expr::integer(freq()) * Expr::t()));
          break;
        default:
          acc.push_back(c * Expr::cos(Expr::integer(freq()) * Expr::t()));
          break;
      }
    }
    return Expr::sum(std::move(acc));
  }

  /// Random potential V(t, x): polynomial in t, x plus optional x^-2 and
  /// exp/trig in t.
  Expr potential(bool with_t = true, bool with_x = true) {
    std::vector<Expr> acc;
    std::uniform_int_distribution<int> degt(0, with_t ? 2 : 0);
    std::uniform_int_distribution<int> degx(0, with_x ? 2 : 0);
    std::uniform_int_distribution<int> nterms(2, 4);
    int n = nterms(rng_);
    for (int j = 0; j < n; ++j) {
      Expr term = Expr::number(small_crat());
      if (with_t) term = term * Expr::pow(Expr::t(), degt(rng_));
      if (with_x) term = term * Expr::pow(Expr::x(), degx(rng_));
      acc.push_back(term);
    }
    if (with_x && coin()) acc.push_back(Expr::number(small_crat()) * Expr::pow(Expr::x(), -2));
    if (with_t && coin())
      acc.push_back(Expr::number(small_crat()) * Expr::sin(Expr::integer(freq()) * Expr::t()));
    return Expr::sum(std::move(acc));
  }

  bool coin() {
    std::uniform_int_distribution<int> d(0, 1);
    return d(rng_) == 1;
  }

  int freq() {
    std::uniform_int_distribution<int> d(1, 3);
    return d(rng_);
  }

 private:
  std::mt19937_64 rng_;

  CRat nonzero_shift() {
    CRat c = small_crat();
    c.re += 7;  // keeps random negative-power bases away from the origin
    return c;
  }
};

}  // namespace testgen
