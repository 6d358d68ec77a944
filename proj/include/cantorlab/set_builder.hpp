#pragma once

// Polynomial towers F_s = f_s o ... o f_1 and their level sets
// K_s = F_s^{-1}([-1, 1]).

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cantorlab/real.hpp"

namespace cantorlab {

enum class GammaKind { kConstant, kPeriodic, kExplicitList, kFormulaFamily };

enum class GammaFamily {
  kPower,              // gamma_k = a * b^k
  kReciprocal,         // gamma_k = a / (k + b)
  kDoubleExponential,  // gamma_k = a * b^(2^k)
};

/// Exact description of gamma = (gamma_k)_{k>=1}. An explicit list repeats
/// its last entry beyond its length.
struct GammaSpec {
  GammaKind kind = GammaKind::kConstant;
  std::vector<Rational> values;
  GammaFamily family = GammaFamily::kPower;
  Rational a = 0;
  Rational b = 0;

  static GammaSpec constant(Rational c);
  static GammaSpec periodic(std::vector<Rational> period);
  static GammaSpec explicit_list(std::vector<Rational> list);
  static GammaSpec formula(GammaFamily family, Rational a, Rational b);

  /// gamma_k for k >= 1; gamma_0 = 1.
  Rational gamma(int k) const;
  /// Exact infimum over all k >= 1.
  Rational infimum() const;
  /// Exact supremum over all k >= 1.
  Rational supremum() const;
  /// sum_k gamma_k < infinity.
  bool summable() const;
  /// sum_k 2^{-k} log(gamma_k) = -infinity, i.e. the limit set is polar.
  bool log_sum_diverges() const;
  /// sum_{k>=1} 2^{-k} log(gamma_k) at working precision (finite models only).
  Real weighted_log_sum() const;
  std::string describe() const;
};

enum class TowerVariant {
  kKGamma,    // f_1 = 2z(z-1)/gamma_1 + 1, f_n = (z^2-1)/(2 gamma_n) + 1
  kK1Gamma,   // f_n = (z^2-1)/(2 gamma_n) + 1 for all n
  kCustom,    // user-supplied admissible stages
  kInterval,  // no stages: K_0 = [-1, 1]
};

std::string to_string(TowerVariant v);
TowerVariant parse_variant(const std::string& s);

enum class StageForm { kKGammaFirst, kQuadratic, kGeneral };

struct Stage {
  StageForm form = StageForm::kGeneral;
  Rational gamma = 0;                  // closed forms only
  Real gamma_real = 0;
  std::vector<Rational> exact_coeffs;  // ascending, when known exactly
  std::vector<Real> coeffs;            // ascending
  int degree = 0;
  Real lower_ratio = 0;                // sum_j<d |a_j| / |a_d|
  std::vector<Real> critical_points;   // sorted
  std::vector<Real> critical_values;
  /// f^{-1}([-1, 1]) as sorted (l, r) pairs, one per monotone branch.
  std::vector<std::pair<Real, Real>> branch_intervals;

  const Real& leading() const { return coeffs.back(); }
};

/// Immutable after construction.
struct GammaTower {
  TowerVariant variant = TowerVariant::kInterval;
  std::optional<GammaSpec> spec;
  int s_max = 0;
  unsigned precision = 256;
  std::vector<Rational> gamma;     // gamma[0] = 1; gamma variants only
  std::vector<Stage> stages;       // stages[n - 1] is f_n
  std::vector<Real> leading;       // leading[s] = A_s, leading[0] = 1
  std::vector<Real> log_leading;   // log |A_s|
  std::vector<Real> total_degree;  // D_s = d_1 ... d_s
  std::vector<Real> delta;         // delta[s] = gamma_0 ... gamma_s; gamma variants only

  const Stage& stage(int n) const { return stages.at(static_cast<size_t>(n - 1)); }
  bool has_gamma() const {
    return variant == TowerVariant::kKGamma || variant == TowerVariant::kK1Gamma;
  }
  /// 2^s for quadratic towers.
  long branch_count(int s) const;
};

GammaTower build_tower(const GammaSpec& spec, TowerVariant variant, int s_max, unsigned precision);
/// Stages given as exact ascending coefficients; each must be admissible and
/// map its level-one set back into [-1, 1].
GammaTower build_custom_tower(const std::vector<std::vector<Rational>>& stages, unsigned precision);
/// The degenerate tower with K_0 = [-1, 1].
GammaTower interval_tower(unsigned precision);

/// Deepest s with delta_s resolvable at `precision` bits (gamma variants).
int max_resolvable_level(const GammaSpec& spec, unsigned precision, int cap = 64);

Real eval_poly(const std::vector<Real>& ascending, const Real& x);
Complex eval_poly(const std::vector<Real>& ascending, const Complex& z);
/// Value and derivative by Horner.
std::pair<Real, Real> eval_poly_with_derivative(const std::vector<Real>& ascending, const Real& x);

/// F_s(x). Throws kNumerical with "use log variant" on overflow.
Real eval_tower(const GammaTower& t, int s, const Real& x);
Complex eval_tower(const GammaTower& t, int s, const Complex& z);
/// log |F_s(z)|, stage by stage, switching to leading-term asymptotics once
/// |F_k(z)| exceeds 2^(p + 32).
Real eval_tower_log(const GammaTower& t, int s, const Complex& z);
/// F_s(x) and F_s'(x).
std::pair<Real, Real> eval_tower_with_derivative(const GammaTower& t, int s, const Real& x);

struct IntervalUnion {
  std::vector<std::pair<Real, Real>> intervals;
  /// Monotone branches of F_s carried by each component (1 unless touching
  /// branches merged, as for T-sets with critical values exactly +-1).
  std::vector<long> branches;
  unsigned precision = 256;

  size_t size() const { return intervals.size(); }
  bool contains(const Real& x) const;
  /// Every interval of `this` lies inside some interval of `outer`.
  bool subset_of(const IntervalUnion& outer) const;
  Real distance(const Real& x) const;
  Real min_length() const;
  Real max_length() const;
};

IntervalUnion level_set(const GammaTower& t, int s);

/// All real x with F_s(x) = target, sorted. |target| <= 1.
std::vector<Real> branch_preimages(const GammaTower& t, int s, const Real& target);

/// Preimages of `target` under one stage, sorted; one per monotone branch.
std::vector<Real> invert_stage(const Stage& stage, const Real& target);

enum class AdmissibilityVerdict {
  kAdmissible,
  kAdmissibleMarginal,
  kNotAdmissible,
};

struct AdmissibilityReport {
  int degree = 0;
  std::vector<Real> zeros;
  std::vector<Real> critical_points;
  std::vector<Real> critical_values;
  AdmissibilityVerdict verdict = AdmissibilityVerdict::kNotAdmissible;
  std::string reason;  // first violated condition, or empty
  Real margin = 0;     // min |T(y_i)| - 1

  bool admissible() const { return verdict != AdmissibilityVerdict::kNotAdmissible; }
};

AdmissibilityReport check_admissible(const std::vector<Real>& ascending);

struct RegularityReport {
  Real a1 = 0;  // inf |leading coefficient|
  Real a2 = 0;  // sup |a_{n,j}| / |a_{n,d_n}|
  Real a3 = 0;  // sup log|a_{n,d_n}| / d_n
  bool regular = false;
  std::string verdict;
};

RegularityReport check_regular_sequence(const GammaTower& t);

}  // namespace cantorlab
