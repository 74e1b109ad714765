#include <cmath>
#include <doctest.h>

#include "symsdp/error.hpp"
#include "symsdp/exact.hpp"

using namespace symsdp;

TEST_SUITE("exact") {

TEST_CASE("rational canonical form") {
  const Rational a(Integer(6), Integer(-4));
  CHECK(a.numerator() == -3);
  CHECK(a.denominator() == 2);
  CHECK(a.str() == "-3/2");
  CHECK((a + Rational(3, 2)).is_zero());
  CHECK(Rational(1, 3) < Rational(1, 2));
  CHECK(Rational(2, 4) == Rational(1, 2));
  try {
    Rational(Integer(1), Integer(0));
    FAIL("zero denominator accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK_THROWS_AS(Rational(1) / Rational(0), Error);
}

TEST_CASE("square-free split") {
  const auto s = split_square_free(Integer(72));
  CHECK(s.square_root_part == 6);
  CHECK(s.square_free_part == 2);
  CHECK(split_square_free(Integer(1)).square_free_part == 1);
  CHECK(split_square_free(Integer(30)).square_root_part == 1);
}

TEST_CASE("QuadExact sqrt and rendering") {
  const auto r8 = QuadExact::sqrt(Rational(8));
  CHECK(r8.coefficient() == Rational(2));
  CHECK(r8.radicand() == 2);
  CHECK(r8.str() == "2*sqrt(2)");
  const auto half = QuadExact::sqrt(Rational(1, 2));
  CHECK(half.str() == "1/2*sqrt(2)");
  CHECK(QuadExact::sqrt(Rational(9, 4)).str() == "3/2");
  CHECK(QuadExact::sqrt(Rational(9, 4)).is_rational());
  CHECK(half.to_double() == doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(QuadExact::sqrt(Rational(-1)), Error);
  CHECK_THROWS_AS(QuadExact(Rational(1), Integer(12)), Error);
}

TEST_CASE("QuadExact arithmetic is exact") {
  const auto a = QuadExact::sqrt(Rational(6));
  const auto b = QuadExact::sqrt(Rational(10));
  const auto p = a * b;
  CHECK(p.coefficient() == Rational(2));
  CHECK(p.radicand() == 15);
  CHECK(a * a == QuadExact(Rational(6)));
  CHECK((a / a) == QuadExact(Rational(1)));
  CHECK((a + a).str() == "2*sqrt(6)");
  CHECK((a - a).is_zero());
  try {
    (void)(a + b);
    FAIL("incommensurable sum accepted");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::Contract);
  }
  CHECK(QuadExact::sqrt(Rational(2)) < QuadExact(Rational(3, 2)));
  CHECK(QuadExact::sqrt(Rational(3)) > QuadExact::sqrt(Rational(2)));
  CHECK(-QuadExact::sqrt(Rational(3)) < -QuadExact::sqrt(Rational(2)));
  CHECK(QuadExact(Rational(0)) + b == b);
}

} // TEST_SUITE
