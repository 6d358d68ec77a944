#pragma once

// Numeric foundation: variable-precision reals (MPFR), exact rationals (GMP),
// a minimal complex type over Real, and the library error type.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cantorlab {

using Real = boost::multiprecision::mpfr_float;
using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

enum class ErrorKind {
  kInvalidArgument,  // bad input or configuration
  kNumerical,        // precision exhausted, non-convergence, overflow
  kInternal,         // an internal consistency check failed
};

class LabError : public std::runtime_error {
 public:
  LabError(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline LabError invalid(const std::string& what) {
  return {ErrorKind::kInvalidArgument, what};
}
inline LabError numerical(const std::string& what) {
  return {ErrorKind::kNumerical, what};
}
inline LabError internal(const std::string& what) {
  return {ErrorKind::kInternal, what};
}

/// Working precision in bits. Reals created while this is active get at least
/// `bits` bits of mantissa (MPFR precision is set via decimal digits, which
/// rounds up by at most a few bits).
unsigned working_precision();
void set_working_precision(unsigned bits);

/// Restores the previous working precision on scope exit.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned bits);
  ~PrecisionGuard();
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_digits10_;
  unsigned saved_bits_;
};

Real to_real(const Rational& q);
Real pi();
/// 2^e as a Real.
Real pow2(long e);
/// Decimal digits needed to round-trip `bits` of mantissa.
unsigned decimal_digits(unsigned bits);
/// Scientific decimal string carrying the full working precision.
std::string to_decimal(const Real& x);
std::string to_decimal(const Real& x, unsigned digits);
Real parse_real(const std::string& s);
/// Accepts "p/q", integers and finite decimals ("0.125", "1e-3").
Rational parse_rational(const std::string& s);
std::string to_string(const Rational& q);

struct Complex {
  Real re;
  Real im;

  Complex() : re(0), im(0) {}
  Complex(Real r) : re(std::move(r)), im(0) {}  // NOLINT: implicit real embedding
  Complex(Real r, Real i) : re(std::move(r)), im(std::move(i)) {}

  bool is_real() const { return im == 0; }
};

Complex operator+(const Complex& a, const Complex& b);
Complex operator-(const Complex& a, const Complex& b);
Complex operator*(const Complex& a, const Complex& b);
Complex operator/(const Complex& a, const Complex& b);
Complex operator*(const Real& s, const Complex& a);
Real abs(const Complex& z);
Real log_abs(const Complex& z);
/// Principal square root (branch cut along the negative real axis).
Complex sqrt(const Complex& z);

}  // namespace cantorlab
