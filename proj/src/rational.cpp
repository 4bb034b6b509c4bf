#include "jshap/rational.hpp"

#include <ostream>
#include <stdexcept>
#include <vector>

namespace jshap {

BigInt::BigInt(const std::string& decimal) {
  if (mpz_init_set_str(z_, decimal.c_str(), 10) != 0) {
    mpz_clear(z_);
    throw std::invalid_argument("BigInt: not a decimal integer: '" + decimal + "'");
  }
}

BigInt BigInt::pow2(unsigned long e) {
  BigInt r;
  mpz_ui_pow_ui(r.z_, 2, e);
  return r;
}

BigInt BigInt::factorial(unsigned long m) {
  BigInt r;
  mpz_fac_ui(r.z_, m);
  return r;
}

BigInt BigInt::gcd(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_gcd(r.z_, a.z_, b.z_);
  return r;
}

BigInt BigInt::lcm(const BigInt& a, const BigInt& b) {
  BigInt r;
  mpz_lcm(r.z_, a.z_, b.z_);
  return r;
}

BigInt BigInt::operator+(const BigInt& o) const {
  BigInt r;
  mpz_add(r.z_, z_, o.z_);
  return r;
}

BigInt BigInt::operator-(const BigInt& o) const {
  BigInt r;
  mpz_sub(r.z_, z_, o.z_);
  return r;
}

BigInt BigInt::operator*(const BigInt& o) const {
  BigInt r;
  mpz_mul(r.z_, z_, o.z_);
  return r;
}

BigInt BigInt::operator-() const {
  BigInt r;
  mpz_neg(r.z_, z_);
  return r;
}

BigInt& BigInt::operator+=(const BigInt& o) {
  mpz_add(z_, z_, o.z_);
  return *this;
}

BigInt& BigInt::operator-=(const BigInt& o) {
  mpz_sub(z_, z_, o.z_);
  return *this;
}

BigInt& BigInt::operator*=(const BigInt& o) {
  mpz_mul(z_, z_, o.z_);
  return *this;
}

BigInt BigInt::div_trunc(const BigInt& o) const {
  if (o.is_zero()) throw std::domain_error("BigInt: division by zero");
  BigInt r;
  mpz_tdiv_q(r.z_, z_, o.z_);
  return r;
}

BigInt BigInt::divexact(const BigInt& o) const {
  if (o.is_zero()) throw std::domain_error("BigInt: division by zero");
  BigInt r;
  mpz_divexact(r.z_, z_, o.z_);
  return r;
}

std::string BigInt::str() const {
  std::vector<char> buf(mpz_sizeinbase(z_, 10) + 2);
  mpz_get_str(buf.data(), 10, z_);
  return std::string(buf.data());
}

Rational::Rational(long num, long den) {
  if (den == 0) throw std::domain_error("Rational: zero denominator");
  mpq_init(q_);
  mpq_set_si(q_, num, 1);
  mpq_t d;
  mpq_init(d);
  mpq_set_si(d, den, 1);
  mpq_div(q_, q_, d);
  mpq_clear(d);
}

Rational::Rational(const BigInt& num, const BigInt& den) {
  if (den.is_zero()) throw std::domain_error("Rational: zero denominator");
  mpq_init(q_);
  mpz_set(mpq_numref(q_), num.raw());
  mpz_set(mpq_denref(q_), den.raw());
  if (mpz_sgn(mpq_denref(q_)) < 0) {
    mpz_neg(mpq_numref(q_), mpq_numref(q_));
    mpz_neg(mpq_denref(q_), mpq_denref(q_));
  }
  mpq_canonicalize(q_);
}

Rational::Rational(const std::string& s) {
  mpq_init(q_);
  if (mpq_set_str(q_, s.c_str(), 10) != 0 || mpz_sgn(mpq_denref(q_)) == 0) {
    mpq_clear(q_);
    throw std::invalid_argument("Rational: cannot parse '" + s + "'");
  }
  if (mpz_sgn(mpq_denref(q_)) < 0) {
    mpz_neg(mpq_numref(q_), mpq_numref(q_));
    mpz_neg(mpq_denref(q_), mpq_denref(q_));
  }
  mpq_canonicalize(q_);
}

Rational Rational::from_double_exact(double v) {
  Rational r;
  mpq_set_d(r.q_, v);
  return r;
}

Rational Rational::operator+(const Rational& o) const {
  Rational r;
  mpq_add(r.q_, q_, o.q_);
  return r;
}

Rational Rational::operator-(const Rational& o) const {
  Rational r;
  mpq_sub(r.q_, q_, o.q_);
  return r;
}

Rational Rational::operator*(const Rational& o) const {
  Rational r;
  mpq_mul(r.q_, q_, o.q_);
  return r;
}

Rational Rational::operator/(const Rational& o) const {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  Rational r;
  mpq_div(r.q_, q_, o.q_);
  return r;
}

Rational Rational::operator-() const {
  Rational r;
  mpq_neg(r.q_, q_);
  return r;
}

Rational& Rational::operator+=(const Rational& o) {
  mpq_add(q_, q_, o.q_);
  return *this;
}

Rational& Rational::operator-=(const Rational& o) {
  mpq_sub(q_, q_, o.q_);
  return *this;
}

Rational& Rational::operator*=(const Rational& o) {
  mpq_mul(q_, q_, o.q_);
  return *this;
}

Rational& Rational::operator/=(const Rational& o) {
  if (o.is_zero()) throw std::domain_error("Rational: division by zero");
  mpq_div(q_, q_, o.q_);
  return *this;
}

Rational Rational::abs() const {
  Rational r;
  mpq_abs(r.q_, q_);
  return r;
}

BigInt Rational::numerator() const {
  BigInt r;
  mpz_set(r.raw(), mpq_numref(q_));
  return r;
}

BigInt Rational::denominator() const {
  BigInt r;
  mpz_set(r.raw(), mpq_denref(q_));
  return r;
}

std::string Rational::str() const {
  if (mpz_cmp_ui(mpq_denref(q_), 1) == 0) {
    std::vector<char> buf(mpz_sizeinbase(mpq_numref(q_), 10) + 2);
    mpz_get_str(buf.data(), 10, mpq_numref(q_));
    return std::string(buf.data());
  }
  std::vector<char> buf(mpz_sizeinbase(mpq_numref(q_), 10) +
                        mpz_sizeinbase(mpq_denref(q_), 10) + 3);
  mpq_get_str(buf.data(), 10, q_);
  return std::string(buf.data());
}

std::ostream& operator<<(std::ostream& os, const BigInt& v) { return os << v.str(); }
std::ostream& operator<<(std::ostream& os, const Rational& v) { return os << v.str(); }

}  // namespace jshap
