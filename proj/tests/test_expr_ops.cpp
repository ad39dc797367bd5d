#include <catch2/catch.hpp>

#include <complex>

#include "support/random_exprs.hpp"
#include "symclass/eval.hpp"
#include "symclass/parse.hpp"
#include "symclass/zero.hpp"

using namespace symclass;

TEST_CASE("basic derivatives") {
  CHECK(is_zero(diff(parse("x^2"), Var::X) - parse("2*x")));
  CHECK(is_zero(diff(parse("exp(4*t)"), Var::T) - parse("4*exp(4*t)")));
  CHECK(is_zero(diff(parse("tan(2*t)"), Var::T) - parse("2/cos(2*t)^2")));
  CHECK(is_zero(diff(parse("nu*t"), Var::T) - parse("nu")));
  CHECK(diff(parse("nu"), Var::T).is_zero_literal());
}

TEST_CASE("derivative of tan matches centered finite differences") {
  Expr d = diff(parse("tan(2*t)"), Var::T);
  Expr f = parse("tan(2*t)");
  std::mt19937_64 rng(testgen::kSeed);
  std::uniform_real_distribution<double> dist(-1.2, 1.2);
  int checked = 0;
  while (checked < 10) {
    double t0 = dist(rng);
    if (std::abs(std::cos(2 * t0)) < 0.2) continue;  // stay away from poles
    double h = 1e-6;
    auto at = [&](double tt) { return eval_d(f, {tt, 0}, {0, 0}).real(); };
    double fd = (at(t0 + h) - at(t0 - h)) / (2 * h);
    double ex = eval_d(d, {t0, 0}, {0, 0}).real();
    CHECK(std::abs(fd - ex) / std::max(1.0, std::abs(ex)) < 1e-8);
    ++checked;
  }
}

TEST_CASE("substitution examples") {
  CHECK(is_zero(substitute(parse("x^2"), Bindings().x(parse("x+1"))) - parse("(x+1)^2")));
  CHECK(is_zero(substitute(parse("i*nu/t"), Bindings().t(parse("-1/t"))) - parse("-i*nu*t")));
  // V of Table 2 Case 6 with nu -> 0
  Expr v6 = parse("x^2 + i*nu");
  CHECK(is_zero(substitute(v6, Bindings().param("nu", parse("0"))) - parse("x^2")));
}

TEST_CASE("simultaneous substitution does not cascade") {
  // x -> x + t, t -> x must swap in one step
  Expr e = substitute(parse("x*t"), Bindings().x(parse("t")).t(parse("x")));
  CHECK(is_zero(e - parse("x*t")));
}

TEST_CASE("substituting an opaque function symbol applies derivatives") {
  Expr w = Expr::func_sym("W", true, false);
  Expr e = diff(w, Var::T) + w;
  Expr bound = substitute(e, Bindings().func("W", parse("t^3")));
  CHECK(is_zero(bound - parse("3*t^2 + t^3")));
}

TEST_CASE("conjugation") {
  CHECK(is_zero(conj(parse("i*t")) + parse("i*t")));
  CHECK(is_zero(conj(parse("(2+3*i)*x")) - parse("(2-3*i)*x")));
  CHECK(is_zero(conj(parse("exp(i*t)")) - parse("exp(-i*t)")));
  Expr v = Expr::func_sym("V", true, true);
  CHECK(conj(conj(v)).node().conjugated == false);
  CHECK(is_zero(real_part(parse("2+5*i")) - parse("2")));
  CHECK(is_zero(imag_part(parse("2+5*i")) - parse("5")));
}

TEST_CASE("diff is linear and satisfies the product rule") {
  testgen::ExprGen gen(7);
  for (int j = 0; j < 40; ++j) {
    Expr e1 = gen.expr(3);
    Expr e2 = gen.expr(3);
    Var v = gen.coin() ? Var::T : Var::X;
    Expr lhs = diff(e1 * e2, v) - diff(e1, v) * e2 - e1 * diff(e2, v);
    INFO("e1: " << to_string(e1) << " e2: " << to_string(e2));
    CHECK(is_zero_detailed(lhs).zero);
    Expr lin = diff(e1 + e2, v) - diff(e1, v) - diff(e2, v);
    CHECK(is_zero_detailed(lin).zero);
  }
}

TEST_CASE("eval against derivative: centered finite differences") {
  testgen::ExprGen gen(11);
  int done = 0;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> dist(0.4, 1.6);
  while (done < 50) {
    Expr e = gen.expr(3, true, true, false);
    Expr de = diff(e, Var::T);
    int pts = 0;
    for (int k = 0; k < 5; ++k) {
      double t0 = dist(rng), x0 = dist(rng);
      double h = 1e-5;
      try {
        auto at = [&](double tt) { return eval_d(e, {tt, 0}, {x0, 0}); };
        std::complex<double> fd = (at(t0 + h) - at(t0 - h)) / (2 * h);
        std::complex<double> ex = eval_d(de, {t0, 0}, {x0, 0});
        double scale = std::max({1.0, std::abs(ex), std::abs(at(t0))});
        if (scale > 1e6) continue;  // skip ill-conditioned samples
        CHECK(std::abs(fd - ex) / scale < 1e-6);
        ++pts;
      } catch (const EvalError&) {
        continue;  // pole at the sample; try another point
      }
    }
    if (pts > 0) ++done;
  }
}
