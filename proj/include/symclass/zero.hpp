#pragma once

#include <cstdint>
#include <cstdlib>
#include <random>
#include <string>
#include <vector>

#include "symclass/canonical.hpp"
#include "symclass/eval.hpp"

namespace symclass {

inline constexpr uint64_t kDefaultZeroSeed = 0x5EED;

/// Seed for randomized zero testing; SYMCLASS_SEED overrides the default.
inline uint64_t zero_test_seed() {
  if (const char* env = std::getenv("SYMCLASS_SEED")) {
    char* end = nullptr;
    unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0') return static_cast<uint64_t>(v);
  }
  return kDefaultZeroSeed;
}

enum class DecisionPath { Exact, Numeric };

struct ZeroDecision {
  bool zero = false;
  DecisionPath path = DecisionPath::Exact;
};

namespace detail {

/// Randomized evaluation at 32 complex points with 50-digit precision and a
/// scale-aware threshold.  Only reached for out-of-class expressions.
inline ZeroDecision is_zero_numeric(const Expr& e, uint64_t seed) {
  std::vector<std::string> params;
  collect_params(e, params);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mag(0.3, 2.1);
  std::uniform_real_distribution<double> im(-0.5, 0.5);
  std::uniform_int_distribution<int> sign(0, 1);
  auto draw = [&]() {
    double re = mag(rng) * (sign(rng) ? 1.0 : -1.0);
    return MpComplex(re, im(rng));
  };
  constexpr int kPoints = 32;
  int done = 0, attempts = 0;
  bool all_zero = true;
  while (done < kPoints && attempts < kPoints * 24) {
    ++attempts;
    EvalPoint<MpComplex> pt;
    pt.t = draw();
    pt.x = draw();
    for (const auto& p : params) pt.params[p] = draw();
    EvalStats stats;
    try {
      MpComplex v = eval(e, pt, &stats);
      ++done;
      double m = abs(v).convert_to<double>();
      if (m > 1e-30 * (1.0 + stats.max_magnitude)) {
        all_zero = false;
        break;
      }
    } catch (const EvalError& err) {
      if (err.kind() == EvalError::Kind::PoleProximity) continue;  // resample
      throw;
    }
  }
  if (done == 0)
    throw EvalError(EvalError::Kind::PoleProximity,
                    "randomized zero test: could not find pole-free sample points");
  return {all_zero, DecisionPath::Numeric};
}

}  // namespace detail

/// Zero test: exact canonicalization first, randomized high-precision
/// evaluation as a fallback for out-of-class expressions.  The decision path
/// is reported so callers can label numeric-only results.
inline ZeroDecision is_zero_detailed(const Expr& e, uint64_t seed = zero_test_seed()) {
  try {
    return {canonicalize(e).is_zero(), DecisionPath::Exact};
  } catch (const CanonicalError&) {
    return detail::is_zero_numeric(e, seed);
  }
}

inline bool is_zero(const Expr& e) { return is_zero_detailed(e).zero; }

/// Exact semantic equality where canonicalization applies.
inline bool equal_exprs(const Expr& a, const Expr& b) { return is_zero(a - b); }

}  // namespace symclass
