#include <catch2/catch.hpp>

#include <array>
#include <vector>

#include "support/random_exprs.hpp"
#include "symclass/liealg.hpp"

using namespace symclass;
using namespace symclass::lie;

namespace {

AlgebraElement random_element(testgen::ExprGen& gen) {
  // polynomial/exp/trig coefficient functions of degree <= 3
  return AlgebraElement(gen.t_function(2), gen.t_function(2), gen.t_function(2));
}

}  // namespace

TEST_CASE("to_vector_field expansion of Eq-style operators") {
  // D(t^2): coef_x = t*x, eta_psi = i*x^2/4 - t
  VectorField f = to_vector_field(AlgebraElement::D(parse("t^2")));
  CHECK(is_zero(f.coef_t - parse("t^2")));
  CHECK(is_zero(f.coef_x - parse("t*x")));
  CHECK(is_zero(f.eta_psi - parse("i*x^2/4 - t")));

  // M alone
  VectorField m = to_vector_field(AlgebraElement::M(parse("1")));
  CHECK(is_zero(m.coef_t));
  CHECK(is_zero(m.coef_x));
  CHECK(is_zero(m.eta_psi - parse("i")));

  // G(t): coef_x = t, eta_psi = i*x/2
  VectorField g = to_vector_field(AlgebraElement::G(parse("t")));
  CHECK(is_zero(g.coef_x - parse("t")));
  CHECK(is_zero(g.eta_psi - parse("i*x/2")));
}

TEST_CASE("bracket examples") {
  auto D = [](const char* s) { return AlgebraElement::D(parse(s)); };
  auto G = [](const char* s) { return AlgebraElement::G(parse(s)); };
  auto M = [](const char* s) { return AlgebraElement::M(parse(s)); };

  CHECK(equal_elements(bracket(D("1"), D("t")), D("1")));
  CHECK(is_zero_element(bracket(D("t^2+1"), D("t^2+1"))));
  CHECK(equal_elements(bracket(G("exp(2*t)"), G("exp(-2*t)")), M("-2")));
  CHECK(equal_elements(bracket(D("1"), G("t")), G("1")));
  CHECK(equal_elements(bracket(D("t"), D("t^2")), D("t^2")));
  // [D(xi), lam M] = xi lam_t M
  CHECK(equal_elements(bracket(D("t"), M("t^2")), M("2*t^2")));
}

TEST_CASE("sl(2,R) structure constants for <D(1), D(t), D(t^2)>") {
  auto D1 = AlgebraElement::D(parse("1"));
  auto Dt = AlgebraElement::D(parse("t"));
  auto Dt2 = AlgebraElement::D(parse("t^2"));
  CHECK(equal_elements(bracket(D1, Dt), D1));
  CHECK(equal_elements(bracket(D1, Dt2), AlgebraElement::D(parse("2*t"))));
  CHECK(equal_elements(bracket(Dt, Dt2), Dt2));
}

TEST_CASE("bracket matches the direct vector-field commutator") {
  CHECK(equal_fields(bracket_direct(AlgebraElement::D(parse("1")), AlgebraElement::G(parse("t"))),
                     to_vector_field(AlgebraElement::G(parse("1")))));
  CHECK(equal_fields(bracket_direct(AlgebraElement::D(parse("t")), AlgebraElement::D(parse("t^2"))),
                     to_vector_field(AlgebraElement::D(parse("t^2")))));
  // M is central except under D
  testgen::ExprGen gen(5);
  for (int j = 0; j < 5; ++j) {
    AlgebraElement q = random_element(gen);
    AlgebraElement m = AlgebraElement::M(parse("1"));
    CHECK(equal_fields(bracket_direct(m, q), to_vector_field(bracket(m, q))));
  }
}

TEST_CASE("oracle equivalence on random pairs") {
  testgen::ExprGen gen(13);
  for (int j = 0; j < 50; ++j) {
    AlgebraElement a = random_element(gen);
    AlgebraElement b = random_element(gen);
    CHECK(equal_fields(to_vector_field(bracket(a, b)), bracket_direct(a, b)));
  }
}

TEST_CASE("antisymmetry on random pairs") {
  testgen::ExprGen gen(17);
  for (int j = 0; j < 100; ++j) {
    AlgebraElement a = random_element(gen);
    AlgebraElement b = random_element(gen);
    CHECK(is_zero_element(bracket(a, b) + bracket(b, a)));
  }
}

TEST_CASE("Jacobi identity on random triples") {
  testgen::ExprGen gen(19);
  for (int j = 0; j < 50; ++j) {
    AlgebraElement a = random_element(gen);
    AlgebraElement b = random_element(gen);
    AlgebraElement c = random_element(gen);
    AlgebraElement jac =
        bracket(a, bracket(b, c)) + bracket(b, bracket(c, a)) + bracket(c, bracket(a, b));
    CHECK(is_zero_element(jac));
  }
}

TEST_CASE("reflections act as stated") {
  CHECK(equal_elements(ad_reflection(AlgebraElement::G(parse("t")), Reflection::SpaceX),
                       AlgebraElement::G(parse("-t"))));
  CHECK(equal_elements(ad_reflection(AlgebraElement::D(parse("t")), Reflection::TimeT),
                       AlgebraElement::D(parse("t"))));
  CHECK(equal_elements(ad_reflection(AlgebraElement::M(parse("1")), Reflection::TimeT),
                       AlgebraElement::M(parse("-1"))));
}

TEST_CASE("reflections are involutive Lie algebra automorphisms") {
  testgen::ExprGen gen(29);
  for (Reflection r : {Reflection::SpaceX, Reflection::TimeT}) {
    for (int j = 0; j < 20; ++j) {
      AlgebraElement a = random_element(gen);
      AlgebraElement b = random_element(gen);
      CHECK(equal_elements(ad_reflection(ad_reflection(a, r), r), a));
      CHECK(equal_elements(ad_reflection(bracket(a, b), r),
                           bracket(ad_reflection(a, r), ad_reflection(b, r))));
    }
  }
}

TEST_CASE("one-dimensional subalgebra classification") {
  CHECK(one_dim_class(AlgebraElement::D(parse("t^2+1")) + AlgebraElement::G(parse("1"))) ==
        OneDimClass::DType);
  CHECK(one_dim_class(AlgebraElement::G(parse("5")) + AlgebraElement::M(parse("t"))) ==
        OneDimClass::GType);
  CHECK(one_dim_class(AlgebraElement::M(parse("3*t"))) == OneDimClass::TMType);
  CHECK(one_dim_class(AlgebraElement::M(parse("1"))) == OneDimClass::MType);
  CHECK(one_dim_class(AlgebraElement{}) == OneDimClass::Zero);
}

TEST_CASE("span membership") {
  std::vector<AlgebraElement> basis9 = {
      AlgebraElement::M(parse("1")), AlgebraElement::D(parse("1")),
      AlgebraElement::G(parse("exp(2*t)")), AlgebraElement::G(parse("exp(-2*t)")),
      AlgebraElement::D(parse("exp(4*t)"))};
  auto c = in_span(AlgebraElement::M(parse("-2")), basis9);
  REQUIRE(c);
  CHECK((*c)[0] == Rational(-2));
  for (size_t k = 1; k < c->size(); ++k) CHECK((*c)[k] == 0);

  CHECK(!in_span(AlgebraElement::D(parse("t")),
                 std::vector<AlgebraElement>{AlgebraElement::M(parse("1")),
                                             AlgebraElement::D(parse("1"))}));

  std::vector<AlgebraElement> b3 = {AlgebraElement::G(parse("exp(2*t)"))};
  auto c2 = in_span(AlgebraElement::G(parse("2*exp(2*t)")), b3);
  REQUIRE(c2);
  CHECK((*c2)[0] == Rational(2));
}

TEST_CASE("operator parsing and printing") {
  AlgebraElement q = parse_operator("D(2*t)+G(3*t^2)+M(t^3)");
  CHECK(is_zero(q.xi - parse("2*t")));
  CHECK(is_zero(q.chi - parse("3*t^2")));
  CHECK(is_zero(q.lam - parse("t^3")));

  AlgebraElement r = parse_operator("-2*M(1)");
  CHECK(is_zero(r.lam - parse("-2")));
  CHECK(lie::to_string(r) == "-2*M(1)");

  AlgebraElement s = parse_operator("1/2*G(1) - D(t)");
  CHECK(is_zero(s.chi - parse("1/2")));
  CHECK(is_zero(s.xi - parse("-t")));

  CHECK_THROWS_AS(parse_operator("D(x)"), ParseError);
  CHECK_THROWS_AS(parse_operator("Q(t)"), ParseError);
  CHECK_THROWS_AS(parse_operator(""), ParseError);
  CHECK_THROWS_AS(parse_operator("i*M(1)"), ParseError);

  // round trip through the printer
  AlgebraElement rt = parse_operator(lie::to_string(q));
  CHECK(equal_elements(rt, q));
}

TEST_CASE("x-dependent coefficients are rejected") {
  CHECK_THROWS_AS(AlgebraElement::D(parse("x*t")), ExprError);
}
