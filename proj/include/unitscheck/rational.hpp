#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <iosfwd>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace unitscheck {

using BigInt = boost::multiprecision::cpp_int;

struct DivisionByZero : std::domain_error {
  DivisionByZero() : std::domain_error("rational division by zero") {}
};

/// Exact rational number. Canonical form is maintained at all times:
/// gcd(|num|, den) == 1, den >= 1, zero stored as 0/1.
class Rational {
public:
  Rational() : value_(0) {}
  Rational(long long n) : value_(n) {}  // NOLINT: implicit integers are intended
  Rational(long long num, long long den) : Rational(BigInt(num), BigInt(den)) {}
  Rational(BigInt num, BigInt den) {
    if (den == 0) throw DivisionByZero();
    value_ = Backend(std::move(num));
    value_ /= Backend(std::move(den));
  }

  BigInt numerator() const { return boost::multiprecision::numerator(value_); }
  BigInt denominator() const { return boost::multiprecision::denominator(value_); }

  bool is_zero() const { return value_.is_zero(); }
  bool is_integer() const { return denominator() == 1; }
  bool is_negative() const { return value_ < 0; }

  Rational operator-() const { return Rational(Backend(-value_)); }

  Rational inv() const {
    if (is_zero()) throw DivisionByZero();
    return Rational(Backend(1 / value_));
  }

  Rational abs() const { return is_negative() ? -*this : *this; }

  Rational& operator+=(const Rational& o) { value_ += o.value_; return *this; }
  Rational& operator-=(const Rational& o) { value_ -= o.value_; return *this; }
  Rational& operator*=(const Rational& o) { value_ *= o.value_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw DivisionByZero();
    value_ /= o.value_;
    return *this;
  }

  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }

  friend bool operator==(const Rational& a, const Rational& b) { return a.value_ == b.value_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.value_ != b.value_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.value_ < b.value_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.value_ <= b.value_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.value_ > b.value_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.value_ >= b.value_; }

  /// "3", "-3" or "5/6", "-5/6".
  std::string str() const {
    std::ostringstream os;
    os << value_;
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) {
    return os << r.value_;
  }

private:
  using Backend = boost::multiprecision::cpp_rational;
  explicit Rational(Backend v) : value_(std::move(v)) {}
  Backend value_;
};

}  // namespace unitscheck
