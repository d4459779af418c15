#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace tfm {

/// Exact signed rational, always in lowest terms with a positive denominator.
///
/// Serialized as "num/den" (e.g. "13/2", "0/1"). Parsing accepts "p/q",
/// integers, and finite decimals ("6.5", "-0.25"), all converted exactly.
class Rational {
 public:
  Rational() = default;
  Rational(long long value);  // NOLINT(google-explicit-constructor)
  Rational(long long num, long long den);
  explicit Rational(mpq_class q);

  static Rational parse(std::string_view text);

  std::string str() const;
  int sign() const { return sgn(q_); }
  bool is_zero() const { return sign() == 0; }

  mpz_class numerator() const { return q_.get_num(); }
  mpz_class denominator() const { return q_.get_den(); }
  const mpq_class& raw() const { return q_; }

  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

 private:
  mpq_class q_;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator-(const Rational& a, const Rational& b);
Rational operator*(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, const Rational& b);
Rational operator-(const Rational& a);
bool operator==(const Rational& a, const Rational& b);
std::strong_ordering operator<=>(const Rational& a, const Rational& b);
std::ostream& operator<<(std::ostream& os, const Rational& r);

Rational abs(const Rational& r);
Rational min(const Rational& a, const Rational& b);
Rational max(const Rational& a, const Rational& b);

using SignedMoney = Rational;

/// A non-negative exact amount: bids, payments, burns, reserves.
class Money {
 public:
  Money() = default;
  Money(long long value);  // NOLINT(google-explicit-constructor)
  Money(long long num, long long den);
  explicit Money(Rational value);

  static Money parse(std::string_view text);

  const Rational& value() const noexcept { return v_; }
  operator const Rational&() const noexcept { return v_; }  // NOLINT
  std::string str() const { return v_.str(); }
  bool is_zero() const { return v_.is_zero(); }

  friend bool operator==(const Money& a, const Money& b) { return a.v_ == b.v_; }
  friend std::strong_ordering operator<=>(const Money& a, const Money& b) {
    return a.v_ <=> b.v_;
  }
  friend Money operator+(const Money& a, const Money& b) { return Money(a.v_ + b.v_); }
  friend std::ostream& operator<<(std::ostream& os, const Money& m) { return os << m.v_; }

 private:
  Rational v_;
};

}  // namespace tfm
