#include <catch2/catch.hpp>

#include "support/random_exprs.hpp"
#include "symclass/canonical.hpp"
#include "symclass/eval.hpp"
#include "symclass/parse.hpp"
#include "symclass/zero.hpp"

using namespace symclass;

TEST_CASE("pythagorean and exponential identities cancel exactly") {
  CHECK(canonicalize(parse("sin(2*t)^2 + cos(2*t)^2 - 1")).is_zero());
  CHECK(canonicalize(parse("exp(2*t)*exp(-2*t) - 1")).is_zero());
  CHECK(canonicalize(parse("sin(2*t) - 2*sin(t)*cos(t)")).is_zero());
  CHECK(canonicalize(parse("cos(2*t) - cos(t)^2 + sin(t)^2")).is_zero());
  CHECK(canonicalize(parse("exp(3*t)*exp(5*t) - exp(8*t)")).is_zero());
}

TEST_CASE("Mobius residual identity from Table 1 Case 2") {
  // (t^2+1) d/dt[(i/2)(t+nu)/(t^2+1)] + 2t (i/2)(t+nu)/(t^2+1) - i/2 == 0
  Expr v = parse("(i/2)*(t+nu)/(t^2+1)");
  Expr r = parse("t^2+1") * diff(v, Var::T) + parse("2*t") * v - parse("i/2");
  CHECK(canonicalize(r).is_zero());

  // numeric oracle at 32 points for the same identity
  std::mt19937_64 rng(testgen::kSeed);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int j = 0; j < 32; ++j) {
    EvalPoint<MpComplex> pt;
    pt.t = MpComplex(dist(rng), dist(rng) / 4);
    pt.x = MpComplex(1.0);
    pt.params["nu"] = MpComplex(dist(rng));
    EvalStats stats;
    MpComplex val = eval(r, pt, &stats);
    CHECK(abs(val).convert_to<double>() <= 1e-30 * (1 + stats.max_magnitude));
  }
}

TEST_CASE("canonical forms are identical for equal expressions") {
  auto a = canonicalize(parse("cos(4*t)"));
  auto b = canonicalize(parse("cos(4*t) + sin(2*t)^2 + cos(2*t)^2 - 1"));
  CHECK(a == b);
  auto c = canonicalize(parse("(t^2-1)/(t-1)"));
  auto d = canonicalize(parse("t+1"));
  CHECK(c == d);
  auto e1 = canonicalize(parse("exp(2*t)"));
  auto e2 = canonicalize(parse("exp(2*t) + exp(3*t) - exp(3*t)"));
  CHECK(e1 == e2);
}

TEST_CASE("numerator and denominator share no factor") {
  auto cf = canonicalize(parse("(t^2 + 2*t + 1)/(t^2 - 1)"));
  // reduces to (t+1)/(t-1)
  CHECK(poly::p_deg_in(cf.num, 0) == 1);
  CHECK(poly::p_deg_in(cf.den, 0) == 1);
  // denominator monic
  CHECK(cf.den.rbegin()->second.is_one());
}

TEST_CASE("canonical zero is the literal zero numerator") {
  auto cf = canonicalize(parse("x - x"));
  CHECK(cf.is_zero());
  CHECK(cf.num.empty());
  CHECK(cf.gens.empty());
}

TEST_CASE("out-of-class expressions are reported explicitly") {
  CHECK_THROWS_AS(canonicalize(parse("exp(sin(t))")), CanonicalError);
  CHECK_THROWS_AS(canonicalize(parse("sin(x)")), CanonicalError);
  CHECK_THROWS_AS(canonicalize(parse("exp(t^2)")), CanonicalError);
  CHECK_THROWS_AS(canonicalize(parse("exp(nu*t)")), CanonicalError);
  CHECK_THROWS_AS(canonicalize(parse("exp(t+1)")), CanonicalError);
  CHECK_THROWS_AS(canonicalize(parse("1/(sin(t)^2 + cos(t)^2 - 1)")), ExprError);
}

TEST_CASE("to_expr rebuilds an equivalent expression") {
  testgen::ExprGen gen(23);
  for (int j = 0; j < 40; ++j) {
    Expr e = gen.expr(3, true, true, true);
    Expr back = to_expr(canonicalize(e));
    INFO("expr: " << to_string(e));
    CHECK(canonicalize(back - e).is_zero());
  }
}

TEST_CASE("gcd reduction on random products") {
  testgen::ExprGen gen(31);
  for (int j = 0; j < 25; ++j) {
    // p*r / (q*r) must canonicalize equal to p/q
    Expr p = gen.expr(2, true, true, false);
    Expr q = gen.expr(2, true, true, false) + Expr::integer(3);
    Expr r = gen.expr(2, true, true, false) + Expr::integer(5);
    Expr lhs = (p * r) / (q * r);
    INFO("p: " << to_string(p) << " q: " << to_string(q) << " r: " << to_string(r));
    CHECK(canonicalize(lhs - p / q).is_zero());
  }
}

TEST_CASE("polynomial square roots") {
  auto sq = [](const std::string& s) {
    return canonical_sqrt(canonicalize(parse(s)));
  };
  auto check_root = [&](const std::string& s) {
    auto r = sq(s);
    REQUIRE(r);
    Expr root = to_expr(*r);
    CHECK(canonicalize(root * root - parse(s)).is_zero());
  };
  check_root("t^2 + 2*t + 1");
  check_root("4*exp(-4*t)");
  check_root("t^-2");
  check_root("9/4*x^4*t^2");
  CHECK(!sq("2"));        // sqrt(2) is irrational
  CHECK(!sq("t"));        // odd degree
  CHECK(!sq("t^2 + 1"));  // not a perfect square
}

TEST_CASE("exp frequency bases renormalize after cancellation") {
  // exp(4t) + exp(2t) - exp(2t) must print with base 4, identically to exp(4t)
  auto a = canonicalize(parse("exp(4*t) + exp(2*t) - exp(2*t)"));
  auto b = canonicalize(parse("exp(4*t)"));
  CHECK(a == b);
}
