#include "tfm/rational.hpp"

#include <cctype>
#include <ostream>
#include <stdexcept>

namespace tfm {
namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c)) == 0) return false;
  }
  return true;
}

[[noreturn]] void bad_rational(std::string_view text) {
  throw std::invalid_argument("invalid rational '" + std::string(text) + "'");
}

}  // namespace

static_assert(sizeof(long) == sizeof(long long), "LP64 expected for mpz_class(long)");

Rational::Rational(long long value) : q_(static_cast<long>(value)) {}

Rational::Rational(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("rational with zero denominator");
  q_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
  q_.canonicalize();
}

Rational::Rational(mpq_class q) : q_(std::move(q)) { q_.canonicalize(); }

Rational Rational::parse(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  bool negative = false;
  if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  mpq_class q;
  if (auto slash = s.find('/'); slash != std::string_view::npos) {
    auto num = s.substr(0, slash);
    auto den = s.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) bad_rational(text);
    mpz_class d{std::string(den)};
    if (d == 0) bad_rational(text);
    q = mpq_class(mpz_class(std::string(num)), d);
  } else if (auto dot = s.find('.'); dot != std::string_view::npos) {
    auto whole = s.substr(0, dot);
    auto frac = s.substr(dot + 1);
    if ((whole.empty() && frac.empty()) || (!whole.empty() && !all_digits(whole)) ||
        (!frac.empty() && !all_digits(frac))) {
      bad_rational(text);
    }
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac.size());
    mpz_class w = whole.empty() ? mpz_class(0) : mpz_class(std::string(whole));
    mpz_class f = frac.empty() ? mpz_class(0) : mpz_class(std::string(frac));
    q = mpq_class(w * scale + f, scale);
  } else {
    if (!all_digits(s)) bad_rational(text);
    q = mpq_class(mpz_class(std::string(s)), 1);
  }
  q.canonicalize();
  if (negative) q = -q;
  return Rational(q);
}

std::string Rational::str() const {
  return q_.get_num().get_str() + "/" + q_.get_den().get_str();
}

Rational& Rational::operator+=(const Rational& o) {
  q_ += o.q_;
  return *this;
}
Rational& Rational::operator-=(const Rational& o) {
  q_ -= o.q_;
  return *this;
}
Rational& Rational::operator*=(const Rational& o) {
  q_ *= o.q_;
  return *this;
}
Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("rational division by zero");
  q_ /= o.q_;
  return *this;
}

Rational operator+(const Rational& a, const Rational& b) { return Rational(mpq_class(a.raw() + b.raw())); }
Rational operator-(const Rational& a, const Rational& b) { return Rational(mpq_class(a.raw() - b.raw())); }
Rational operator*(const Rational& a, const Rational& b) { return Rational(mpq_class(a.raw() * b.raw())); }
Rational operator/(const Rational& a, const Rational& b) {
  Rational r = a;
  r /= b;
  return r;
}
Rational operator-(const Rational& a) { return Rational(mpq_class(-a.raw())); }

bool operator==(const Rational& a, const Rational& b) { return a.raw() == b.raw(); }

std::strong_ordering operator<=>(const Rational& a, const Rational& b) {
  int c = cmp(a.raw(), b.raw());
  if (c < 0) return std::strong_ordering::less;
  if (c > 0) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }
Rational min(const Rational& a, const Rational& b) { return b < a ? b : a; }
Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

Money::Money(long long value) : Money(Rational(value)) {}
Money::Money(long long num, long long den) : Money(Rational(num, den)) {}

Money::Money(Rational value) : v_(std::move(value)) {
  if (v_.sign() < 0) throw std::invalid_argument("negative amount " + v_.str());
}

Money Money::parse(std::string_view text) { return Money(Rational::parse(text)); }

}  // namespace tfm
