// Arbitrary-precision integers and rationals, wrapped over GMP.
//
// All exact computations in this library run on these types; floats only
// appear after an explicit to_double() conversion. Rational is always kept
// in canonical form (reduced, positive denominator), so operator== is a
// plain component comparison and str() prints the reduced "p/q" form.

#pragma once

#include <gmp.h>

#include <cstdint>
#include <iosfwd>
#include <string>

namespace jshap {

class BigInt {
 public:
  BigInt() { mpz_init(z_); }
  BigInt(long v) { mpz_init_set_si(z_, v); }  // NOLINT: implicit by design
  explicit BigInt(const std::string& decimal);
  BigInt(const BigInt& o) { mpz_init_set(z_, o.z_); }
  BigInt(BigInt&& o) noexcept {
    mpz_init(z_);
    mpz_swap(z_, o.z_);
  }
  BigInt& operator=(const BigInt& o) {
    if (this != &o) mpz_set(z_, o.z_);
    return *this;
  }
  BigInt& operator=(BigInt&& o) noexcept {
    mpz_swap(z_, o.z_);
    return *this;
  }
  ~BigInt() { mpz_clear(z_); }

  static BigInt pow2(unsigned long e);
  static BigInt factorial(unsigned long m);
  static BigInt gcd(const BigInt& a, const BigInt& b);
  static BigInt lcm(const BigInt& a, const BigInt& b);

  BigInt operator+(const BigInt& o) const;
  BigInt operator-(const BigInt& o) const;
  BigInt operator*(const BigInt& o) const;
  BigInt operator-() const;
  BigInt& operator+=(const BigInt& o);
  BigInt& operator-=(const BigInt& o);
  BigInt& operator*=(const BigInt& o);

  // Truncated division; divexact requires an exact multiple.
  BigInt div_trunc(const BigInt& o) const;
  BigInt divexact(const BigInt& o) const;

  int cmp(const BigInt& o) const { return mpz_cmp(z_, o.z_); }
  bool operator==(const BigInt& o) const { return cmp(o) == 0; }
  bool operator!=(const BigInt& o) const { return cmp(o) != 0; }
  bool operator<(const BigInt& o) const { return cmp(o) < 0; }
  bool operator<=(const BigInt& o) const { return cmp(o) <= 0; }
  bool operator>(const BigInt& o) const { return cmp(o) > 0; }
  bool operator>=(const BigInt& o) const { return cmp(o) >= 0; }

  int sign() const { return mpz_sgn(z_); }
  bool is_zero() const { return mpz_sgn(z_) == 0; }
  bool fits_slong() const { return mpz_fits_slong_p(z_) != 0; }
  long to_long() const { return mpz_get_si(z_); }
  double to_double() const { return mpz_get_d(z_); }
  std::string str() const;

  const mpz_t& raw() const { return z_; }
  mpz_t& raw() { return z_; }

 private:
  mpz_t z_;
};

class Rational {
 public:
  Rational() { mpq_init(q_); }
  Rational(long v) {  // NOLINT: implicit by design
    mpq_init(q_);
    mpq_set_si(q_, v, 1);
  }
  Rational(long num, long den);
  Rational(const BigInt& num, const BigInt& den);
  // Parses "p", "p/q" or a plain decimal integer string.
  explicit Rational(const std::string& s);
  Rational(const Rational& o) {
    mpq_init(q_);
    mpq_set(q_, o.q_);
  }
  Rational(Rational&& o) noexcept {
    mpq_init(q_);
    mpq_swap(q_, o.q_);
  }
  Rational& operator=(const Rational& o) {
    if (this != &o) mpq_set(q_, o.q_);
    return *this;
  }
  Rational& operator=(Rational&& o) noexcept {
    mpq_swap(q_, o.q_);
    return *this;
  }
  ~Rational() { mpq_clear(q_); }

  // Exact binary expansion of the double (no rounding involved).
  static Rational from_double_exact(double v);

  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;  // throws on /0
  Rational operator-() const;
  Rational& operator+=(const Rational& o);
  Rational& operator-=(const Rational& o);
  Rational& operator*=(const Rational& o);
  Rational& operator/=(const Rational& o);

  int cmp(const Rational& o) const { return mpq_cmp(q_, o.q_); }
  bool operator==(const Rational& o) const { return mpq_equal(q_, o.q_) != 0; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const { return cmp(o) < 0; }
  bool operator<=(const Rational& o) const { return cmp(o) <= 0; }
  bool operator>(const Rational& o) const { return cmp(o) > 0; }
  bool operator>=(const Rational& o) const { return cmp(o) >= 0; }

  int sign() const { return mpq_sgn(q_); }
  bool is_zero() const { return mpq_sgn(q_) == 0; }
  Rational abs() const;

  BigInt numerator() const;
  BigInt denominator() const;

  double to_double() const { return mpq_get_d(q_); }
  // Canonical form: "p" when the denominator is 1, else "p/q".
  std::string str() const;

  const mpq_t& raw() const { return q_; }
  mpq_t& raw() { return q_; }

 private:
  mpq_t q_;
};

std::ostream& operator<<(std::ostream& os, const BigInt& v);
std::ostream& operator<<(std::ostream& os, const Rational& v);

}  // namespace jshap
