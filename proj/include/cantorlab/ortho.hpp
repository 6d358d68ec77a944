#pragma once

// Recurrence coefficients of discrete measures, monic orthogonal
// polynomials, their zeros, and Widom-Hilbert factors.

#include <optional>
#include <string>
#include <vector>

#include "cantorlab/measures.hpp"

namespace cantorlab {

/// x P_n = P_{n+1} + b_{n+1} P_n + a_n^2 P_{n-1}; a[0] is a_1, b[0] is b_1.
struct JacobiData {
  std::vector<Real> a;
  std::vector<Real> b;
  int trusted_n = 0;
  MeasureProvenance source;
  unsigned precision = 256;   // bits actually used
  Real orthogonality = 0;     // max |<q_i, q_j>| over i != j
  std::vector<std::string> notes;

  int size() const { return static_cast<int>(b.size()); }
};

struct StieltjesOptions {
  bool auto_precision = true;  // double precision until the residual passes
  unsigned max_bits = 1024;
};

/// Lanczos form of the discretized Stieltjes procedure with full
/// reorthogonalization. N may not exceed the node count.
JacobiData stieltjes(const DiscreteMeasure& mu, int N, const StieltjesOptions& options = {});

struct CrossLevelResult {
  JacobiData coarse;  // level s
  JacobiData fine;    // level s + 1, trusted_n from the comparison
  Real max_difference = 0;  // over n <= fine.trusted_n
};

/// Runs stieltjes on the pullback measures of levels s and s + 1 and trusts
/// the coefficients up to the first disagreement beyond `tol`.
CrossLevelResult stieltjes_cross_level(const GammaTower& t, int s, int N, int m = 0,
                                       const Real& tol = Real("1e-8"));

Real eval_monic(const JacobiData& j, int n, const Real& x);
/// P_n(x) and P_n'(x)
std::pair<Real, Real> eval_monic_with_derivative(const JacobiData& j, int n, const Real& x);

/// Zeros of P_n: Sturm-count isolation, then safeguarded Newton.
std::vector<Real> zeros(const JacobiData& j, int n);
/// Zeros of P_1 .. P_{n_max}.
std::vector<std::vector<Real>> zeros_up_to(const JacobiData& j, int n_max);

struct SpacingReport {
  int n = 0;
  std::vector<Real> zeros;
  Real u_n = 0;
  int s = 0;  // 2^{s-1} <= n < 2^s
  std::optional<Real> general_lower;  // delta_{s+2}
  std::optional<Real> general_upper;  // pi^2/4 delta_{s-2}
  std::optional<Rational> c;
  std::optional<Real> c_lower;  // c^2 delta_s
  std::optional<Real> c_upper;  // pi^2/(4 c^2) delta_s
  bool ok = true;
  std::vector<std::string> notes;
  std::string verdict;
};

/// `delta[k]` = delta_k of the tower.
SpacingReport zero_spacing(const JacobiData& j, int n, const std::vector<Real>& delta,
                           const std::optional<Rational>& c = std::nullopt);
/// Same, reusing zeros already computed.
SpacingReport zero_spacing(std::vector<Real> zs, int n, const std::vector<Real>& delta,
                           const std::optional<Rational>& c = std::nullopt);

struct WidomHilbertSeries {
  std::vector<Real> w2;        // W_n^2, n = 1..trusted_n
  std::vector<Real> root;      // (W_n^2)^{1/n}
  Real cap = 0;
  Real inf_w2 = 0;
  Real inf_sqrt_w2 = 0;        // the same bound read as a statement on sqrt(W_n^2)
  Real window_liminf = 0;      // over the upper half of the trusted range
  Real window_limsup = 0;
  bool below_one = false;      // some W_n^2 < 1
  bool equilibrium_source = true;
  std::vector<std::string> notes;
};

WidomHilbertSeries widom_hilbert(const JacobiData& j, const Real& cap, bool equilibrium_source = true);

}  // namespace cantorlab
