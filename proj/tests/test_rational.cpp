#include <catch2/catch.hpp>

#include "symclass/rational.hpp"

using namespace symclass;

TEST_CASE("complex rational arithmetic is exact") {
  CRat a(Rational(1, 3), Rational(2));
  CRat b(Rational(-1, 2), Rational(1, 5));
  CHECK((a + b) - b == a);
  CHECK((a * b) / b == a);
  CHECK(a - a == CRat(0));
  CHECK(a.pow(3) == a * a * a);
  CHECK(a.pow(-2) == CRat(1) / (a * a));
  CHECK(CRat::i() * CRat::i() == CRat(-1));
  CHECK(a.conj().conj() == a);
}

TEST_CASE("division by zero throws") {
  CHECK_THROWS_AS(CRat(1) / CRat(0), std::domain_error);
}

TEST_CASE("rational gcd") {
  CHECK(rational_gcd(Rational(4, 3), Rational(2)) == Rational(2, 3));
  CHECK(rational_gcd(Rational(2), Rational(3)) == Rational(1));
  CHECK(rational_gcd(Rational(0), Rational(-5)) == Rational(5));
  CHECK(rational_gcd(Rational(6), Rational(4)) == Rational(2));
}

TEST_CASE("exact rational sqrt") {
  CHECK(*rational_sqrt(Rational(9, 4)) == Rational(3, 2));
  CHECK(!rational_sqrt(Rational(2)));
  CHECK(!rational_sqrt(Rational(-1)));
  CHECK(*rational_sqrt(Rational(0)) == Rational(0));
}
