#pragma once

// Capacity, Green function, equilibrium-measure distribution and
// Parreau-Widom sums for tower level sets.

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cantorlab/set_builder.hpp"

namespace cantorlab {

struct PotentialContext {
  std::shared_ptr<const GammaTower> tower;
  std::vector<Real> cap_levels;  // Cap(K_s), s = 0..s_max
  Real cap_limit = 0;            // Cap of the limit set
  bool polar = false;            // weighted log-sum of gamma diverges
  bool limit_is_finite_level = false;  // custom/interval: limit = deepest level
  unsigned precision = 256;
};

PotentialContext make_potential_context(std::shared_ptr<const GammaTower> tower);

/// Cap(K_s) by pullback of Cap([-1, 1]) = 1/2: (1 / (2 |A_s|))^{1 / D_s}.
Real capacity(const PotentialContext& ctx, int s);
const Real& capacity_limit(const PotentialContext& ctx);
/// The independent product form, 4^{-2^-s} prod_{k<=s} gamma_k^{2^-k}
/// (times 2^{1 - 2^{1-s}} / 4^{-2^{-s}} for K1-gamma). Gamma variants only.
Real capacity_product_form(const GammaTower& t, int s);

struct GreenSample {
  Complex z;
  int level = 0;
  Real value = 0;
  bool converged = false;
  std::optional<Real> distance;
};

/// g_{K_s}(z) = log|phi(F_s(z))| / D_s with phi(w) = w + sqrt(w^2 - 1), |phi| >= 1.
Real green_level(const PotentialContext& ctx, int s, const Complex& z);

/// Green function of the limit set: increases s until |g_{s+1} - g_s| < tol
/// or s_max is reached. Zero for z in the deepest level set.
GreenSample green(const PotentialContext& ctx, const Complex& z, const Real& tol = Real("1e-10"));

enum class ShellPlacement {
  kAll,       // real-axis and off-axis points
  kRealAxis,  // gap sides and outer rays
  kOffAxis,   // x + i*delta above points of the set
};

struct ModulusRow {
  Real delta = 0;
  Real omega_max = 0;
  Real omega_min = 0;
  Real ratio = 0;
  int samples = 0;
  bool skipped = false;
  std::string note;
};

struct ModulusReport {
  std::vector<ModulusRow> rows;
  Real alpha_fit = 0;      // slope of log omega_max against log delta
  Real alpha_min_fit = 0;  // slope of log omega_min against log delta
  Real c1_fit = 0;         // min omega_min / delta^alpha
  Real c2_fit = 0;         // max omega_max / delta^alpha
  Real residual = 0;       // RMS residual of the omega_max fit
  int geometry_level = 0;
  std::vector<std::string> warnings;
};

struct ModulusOptions {
  std::vector<Real> deltas;
  int samples_per_delta = 64;
  ShellPlacement placement = ShellPlacement::kAll;
  int geometry_level = -1;  // -1: min(s_max, 10)
  Real tol = Real("1e-10");
};

ModulusReport green_modulus(const PotentialContext& ctx, const ModulusOptions& options);

struct CdfValue {
  Rational mass = 0;  // exact k / D_s
  Real value = 0;
  int level = 0;      // first level at which c is exterior
};

/// mu_K([alpha, c]) for c outside some built level set.
CdfValue equilibrium_cdf(const PotentialContext& ctx, const Real& c);

struct PwLevel {
  int level = 0;
  int critical_points = 0;  // critical points of F_level outside K_level
  Real value_min = 0;       // min g_level over them
  Real value_max = 0;
  Real partial_sum = 0;     // Parreau-Widom sum of K_level
};

struct PwReport {
  std::vector<PwLevel> levels;
  Real sum = 0;
};

/// Partial Parreau-Widom sums: level k sums g_{K_k} over the critical points
/// of F_k, which are exactly the critical points of g_{K_k}.
PwReport pw_sum(const PotentialContext& ctx, int s);

}  // namespace cantorlab
