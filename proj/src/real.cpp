#include "cantorlab/real.hpp"

#include <cmath>
#include <sstream>

namespace cantorlab {

namespace {

unsigned g_bits = 256;

unsigned digits10_for_bits(unsigned bits) {
  return static_cast<unsigned>(std::ceil(bits * 0.30102999566398120)) + 1;
}

}  // namespace

unsigned working_precision() { return g_bits; }

void set_working_precision(unsigned bits) {
  if (bits < 53) throw invalid("precision must be at least 53 bits");
  g_bits = bits;
  Real::default_precision(digits10_for_bits(bits));
  // Tower leading coefficients reach magnitudes like 2^(3*2^40).
  mpfr_set_emax(mpfr_get_emax_max());
  mpfr_set_emin(mpfr_get_emin_min());
}

namespace {
const bool g_default_precision_set = (set_working_precision(256), true);
}  // namespace

PrecisionGuard::PrecisionGuard(unsigned bits)
    : saved_digits10_(Real::default_precision()), saved_bits_(g_bits) {
  set_working_precision(bits);
}

PrecisionGuard::~PrecisionGuard() {
  g_bits = saved_bits_;
  Real::default_precision(saved_digits10_);
}

Real to_real(const Rational& q) {
  Real r;
  mpfr_set_q(r.backend().data(), q.backend().data(), MPFR_RNDN);
  return r;
}

Real pi() {
  Real r;
  mpfr_const_pi(r.backend().data(), MPFR_RNDN);
  return r;
}

Real pow2(long e) {
  Real r(1);
  mpfr_mul_2si(r.backend().data(), r.backend().data(), e, MPFR_RNDN);
  return r;
}

unsigned decimal_digits(unsigned bits) { return digits10_for_bits(bits) + 1; }

std::string to_decimal(const Real& x) { return to_decimal(x, decimal_digits(g_bits)); }

std::string to_decimal(const Real& x, unsigned digits) {
  if (x == 0) return "0";
  return x.str(static_cast<std::streamsize>(digits), std::ios_base::scientific);
}

Real parse_real(const std::string& s) {
  if (s.find('/') != std::string::npos) return to_real(parse_rational(s));
  Real r;
  if (mpfr_set_str(r.backend().data(), s.c_str(), 10, MPFR_RNDN) != 0) {
    throw invalid("not a decimal number: '" + s + "'");
  }
  return r;
}

Rational parse_rational(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (c != ' ') s.push_back(c);
  }
  if (s.empty()) throw invalid("empty rational literal");
  try {
    auto slash = s.find('/');
    if (slash != std::string::npos) {
      Integer num(s.substr(0, slash));
      Integer den(s.substr(slash + 1));
      if (den == 0) throw invalid("zero denominator in '" + text + "'");
      return Rational(num, den);
    }
    // Finite decimal with optional exponent.
    long exponent = 0;
    auto epos = s.find_first_of("eE");
    std::string mant = s;
    if (epos != std::string::npos) {
      exponent = std::stol(s.substr(epos + 1));
      mant = s.substr(0, epos);
    }
    bool negative = false;
    if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
      negative = mant[0] == '-';
      mant = mant.substr(1);
    }
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exponent -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) {
      throw invalid("not a rational literal: '" + text + "'");
    }
    Integer num(digits);
    if (negative) num = -num;
    Integer ten_pow = boost::multiprecision::pow(Integer(10), static_cast<unsigned>(std::labs(exponent)));
    return exponent >= 0 ? Rational(num * ten_pow) : Rational(num, ten_pow);
  } catch (const LabError&) {
    throw;
  } catch (const std::exception&) {
    throw invalid("not a rational literal: '" + text + "'");
  }
}

std::string to_string(const Rational& q) { return q.str(); }

Complex operator+(const Complex& a, const Complex& b) { return {a.re + b.re, a.im + b.im}; }
Complex operator-(const Complex& a, const Complex& b) { return {a.re - b.re, a.im - b.im}; }
Complex operator*(const Complex& a, const Complex& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}
Complex operator/(const Complex& a, const Complex& b) {
  Real d = b.re * b.re + b.im * b.im;
  return {(a.re * b.re + a.im * b.im) / d, (a.im * b.re - a.re * b.im) / d};
}
Complex operator*(const Real& s, const Complex& a) { return {s * a.re, s * a.im}; }

Real abs(const Complex& z) { return boost::multiprecision::hypot(z.re, z.im); }

Real log_abs(const Complex& z) { return boost::multiprecision::log(abs(z)); }

Complex sqrt(const Complex& z) {
  if (z.im == 0) {
    if (z.re >= 0) return {boost::multiprecision::sqrt(z.re), Real(0)};
    return {Real(0), boost::multiprecision::sqrt(-z.re)};
  }
  Real r = abs(z);
  if (z.re >= 0) {
    Real u = boost::multiprecision::sqrt((r + z.re) / 2);
    return {u, z.im / (2 * u)};
  }
  Real v = boost::multiprecision::sqrt((r - z.re) / 2);
  if (z.im < 0) v = -v;
  return {z.im / (2 * v), v};
}

}  // namespace cantorlab
