#pragma once

// Internal helpers shared by the implementation files.

#include <utility>

#include "cantorlab/real.hpp"

namespace cantorlab::detail {

inline Real epsilon() { return pow2(-static_cast<long>(working_precision())); }

/// 2^{-p * num / den} at working precision.
inline Real precision_fraction(long num, long den) {
  return pow2(-static_cast<long>(working_precision()) * num / den);
}

inline int sign(const Real& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

/// Root of f on [lo, hi] where f changes sign (or vanishes at an end).
/// `f` returns (f(x), f'(x)). Newton steps, falling back to bisection when a
/// step leaves the bracket. Stops once Newton steps stop shrinking below
/// 2^{-p/2}, where rounding noise in f dominates.
template <class F>
Real solve_bracketed(F&& f, Real lo, Real hi) {
  const Real eps = epsilon();
  const Real noise_floor = precision_fraction(1, 2);
  Real last_step = -1;
  auto [flo, dlo] = f(lo);
  if (flo == 0) return lo;
  auto [fhi, dhi] = f(hi);
  if (fhi == 0) return hi;
  const int slo = sign(flo);
  Real x = (lo + hi) / 2;
  const int max_iter = 4 * static_cast<int>(working_precision()) + 64;
  for (int it = 0; it < max_iter; ++it) {
    auto [fx, dfx] = f(x);
    if (fx == 0) return x;
    if (dfx != 0) {
      Real newton = fx / dfx;
      Real sx = boost::multiprecision::abs(x);
      if (sx == 0) sx = 1;
      if (boost::multiprecision::abs(newton) <= 8 * eps * sx) return x - newton;
    }
    if (sign(fx) == slo) {
      lo = x;
    } else {
      hi = x;
    }
    Real next;
    bool newton_ok = dfx != 0;
    if (newton_ok) {
      next = x - fx / dfx;
      newton_ok = next > lo && next < hi;
    }
    if (!newton_ok) next = (lo + hi) / 2;
    Real scale = boost::multiprecision::abs(next);
    if (scale == 0) scale = 1;
    Real step = boost::multiprecision::abs(next - x);
    if (step <= 8 * eps * scale) return next;
    if (newton_ok && step <= noise_floor * scale && last_step >= 0 && step * 2 > last_step) return next;
    last_step = newton_ok ? step : Real(-1);
    if (hi - lo <= 4 * eps * scale) return (lo + hi) / 2;
    x = std::move(next);
  }
  return x;
}

}  // namespace cantorlab::detail
