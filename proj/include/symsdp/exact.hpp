#pragma once

#include <compare>
#include <string>

#include <gmpxx.h>

namespace symsdp {

using Integer = mpz_class;

/// Exact rational in canonical form (gcd 1, positive denominator).
class Rational {
public:
  Rational() = default;
  Rational(long value) : value_(value) {}
  Rational(const Integer &value) : value_(value) {}
  Rational(const Integer &num, const Integer &den);
  explicit Rational(const mpq_class &value) : value_(value) { value_.canonicalize(); }

  Integer numerator() const { return value_.get_num(); }
  Integer denominator() const { return value_.get_den(); }
  const mpq_class &get() const noexcept { return value_; }

  bool is_zero() const { return sgn(value_) == 0; }
  int sign() const { return sgn(value_); }
  double to_double() const { return value_.get_d(); }
  /// "p" or "p/q".
  std::string str() const { return value_.get_str(); }

  Rational &operator+=(const Rational &o) { value_ += o.value_; return *this; }
  Rational &operator-=(const Rational &o) { value_ -= o.value_; return *this; }
  Rational &operator*=(const Rational &o) { value_ *= o.value_; return *this; }
  Rational &operator/=(const Rational &o);

  friend Rational operator+(Rational a, const Rational &b) { return a += b; }
  friend Rational operator-(Rational a, const Rational &b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational &b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational &b) { return a /= b; }
  friend Rational operator-(const Rational &a) { return Rational(mpq_class(-a.value_)); }

  friend bool operator==(const Rational &a, const Rational &b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const Rational &a, const Rational &b) {
    const int c = cmp(a.value_, b.value_);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

private:
  mpq_class value_;
};

/// Largest d with d^2 | value, and value / d^2; value > 0. Trial division.
struct SquareFreeSplit {
  Integer square_root_part;
  Integer square_free_part;
};
SquareFreeSplit split_square_free(const Integer &value);

/// q * sqrt(s), s a positive square-free integer; zero is stored with s = 1.
/// Products are always exact. Sums require a common radicand and throw
/// Contract otherwise.
class QuadExact {
public:
  QuadExact() = default;
  QuadExact(const Rational &q) : coeff_(q) {}
  QuadExact(long q) : coeff_(q) {}
  /// q * sqrt(s) with s square-free; throws Domain otherwise.
  QuadExact(const Rational &q, const Integer &radicand);

  /// sqrt(value) for value >= 0; throws Domain on negative input.
  static QuadExact sqrt(const Rational &value);

  const Rational &coefficient() const noexcept { return coeff_; }
  const Integer &radicand() const noexcept { return radicand_; }
  bool is_zero() const { return coeff_.is_zero(); }
  bool is_rational() const { return radicand_ == 1; }
  int sign() const { return coeff_.sign(); }
  double to_double() const;
  /// "p/q" or "p/q*sqrt(s)".
  std::string str() const;

  QuadExact &operator+=(const QuadExact &o);
  QuadExact &operator-=(const QuadExact &o) { return *this += -o; }
  QuadExact &operator*=(const QuadExact &o);
  QuadExact &operator/=(const QuadExact &o);

  friend QuadExact operator+(QuadExact a, const QuadExact &b) { return a += b; }
  friend QuadExact operator-(QuadExact a, const QuadExact &b) { return a -= b; }
  friend QuadExact operator*(QuadExact a, const QuadExact &b) { return a *= b; }
  friend QuadExact operator/(QuadExact a, const QuadExact &b) { return a /= b; }
  friend QuadExact operator-(const QuadExact &a) {
    QuadExact out = a;
    out.coeff_ = -out.coeff_;
    return out;
  }

  /// Exact: equal radicands and coefficients, or both zero.
  friend bool operator==(const QuadExact &a, const QuadExact &b) {
    return a.coeff_ == b.coeff_ && (a.radicand_ == b.radicand_ || a.is_zero());
  }

  /// Sign-aware total order; exact via squaring.
  friend std::strong_ordering operator<=>(const QuadExact &a, const QuadExact &b);

private:
  void normalize();

  Rational coeff_;
  Integer radicand_ = 1;
};

} // namespace symsdp
