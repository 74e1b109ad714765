#include "symsdp/exact.hpp"

#include <cmath>

#include "symsdp/error.hpp"

namespace symsdp {

Rational::Rational(const Integer &num, const Integer &den) {
  if (den == 0)
    throw Error(ErrorKind::Domain, "rational with zero denominator");
  value_ = mpq_class(num, den);
  value_.canonicalize();
}

Rational &Rational::operator/=(const Rational &o) {
  if (o.is_zero())
    throw Error(ErrorKind::Domain, "division by zero");
  value_ /= o.value_;
  return *this;
}

SquareFreeSplit split_square_free(const Integer &value) {
  if (value <= 0)
    throw Error(ErrorKind::Domain, "square-free split needs a positive integer");
  Integer rest = value;
  Integer root = 1;
  Integer free = 1;
  for (Integer d = 2; d * d <= rest; ++d) {
    if (rest % d != 0)
      continue;
    unsigned exponent = 0;
    while (rest % d == 0) {
      rest /= d;
      ++exponent;
    }
    for (unsigned e = 0; e < exponent / 2; ++e)
      root *= d;
    if (exponent % 2)
      free *= d;
  }
  free *= rest;
  return {root, free};
}

QuadExact::QuadExact(const Rational &q, const Integer &radicand) : coeff_(q), radicand_(radicand) {
  if (radicand_ <= 0)
    throw Error(ErrorKind::Domain, "radicand must be positive");
  if (split_square_free(radicand_).square_root_part != 1)
    throw Error(ErrorKind::Domain, "radicand " + radicand_.get_str() + " is not square-free");
  normalize();
}

QuadExact QuadExact::sqrt(const Rational &value) {
  if (value.sign() < 0)
    throw Error(ErrorKind::Domain, "square root of a negative rational " + value.str());
  if (value.is_zero())
    return QuadExact();
  // sqrt(a/b) = sqrt(a b) / b
  const Integer den = value.denominator();
  const auto split = split_square_free(value.numerator() * den);
  QuadExact out;
  out.coeff_ = Rational(split.square_root_part, den);
  out.radicand_ = split.square_free_part;
  return out;
}

void QuadExact::normalize() {
  if (coeff_.is_zero())
    radicand_ = 1;
}

double QuadExact::to_double() const {
  return coeff_.to_double() * std::sqrt(radicand_.get_d());
}

std::string QuadExact::str() const {
  if (is_rational())
    return coeff_.str();
  return coeff_.str() + "*sqrt(" + radicand_.get_str() + ")";
}

QuadExact &QuadExact::operator+=(const QuadExact &o) {
  if (o.is_zero())
    return *this;
  if (is_zero()) {
    *this = o;
    return *this;
  }
  if (radicand_ != o.radicand_)
    throw Error(ErrorKind::Contract, "adding incommensurable square roots sqrt(" +
                                         radicand_.get_str() + ") and sqrt(" + o.radicand_.get_str() + ")");
  coeff_ += o.coeff_;
  normalize();
  return *this;
}

QuadExact &QuadExact::operator*=(const QuadExact &o) {
  // Both radicands square-free: s t = g^2 (s/g)(t/g) with (s/g)(t/g) square-free.
  Integer g;
  mpz_gcd(g.get_mpz_t(), radicand_.get_mpz_t(), o.radicand_.get_mpz_t());
  coeff_ *= o.coeff_ * Rational(g);
  radicand_ = (radicand_ / g) * (o.radicand_ / g);
  normalize();
  return *this;
}

QuadExact &QuadExact::operator/=(const QuadExact &o) {
  if (o.is_zero())
    throw Error(ErrorKind::Domain, "division by zero");
  // 1 / (q sqrt(s)) = sqrt(s) / (q s)
  QuadExact inverse;
  inverse.coeff_ = Rational(1) / (o.coeff_ * Rational(o.radicand_));
  inverse.radicand_ = o.radicand_;
  return *this *= inverse;
}

std::strong_ordering operator<=>(const QuadExact &a, const QuadExact &b) {
  const int sa = a.sign();
  const int sb = b.sign();
  if (sa != sb)
    return sa <=> sb;
  if (sa == 0)
    return std::strong_ordering::equal;
  const Rational a2 = a.coeff_ * a.coeff_ * Rational(a.radicand_);
  const Rational b2 = b.coeff_ * b.coeff_ * Rational(b.radicand_);
  return sa > 0 ? a2 <=> b2 : b2 <=> a2;
}

} // namespace symsdp
