#pragma once

// Almost-periodicity diagnostics for coefficient sequences and mass versus
// candidate dimension function on the basic intervals of K(gamma).

#include <string>
#include <vector>

#include "cantorlab/set_builder.hpp"

namespace cantorlab {

struct DyadicPoint {
  int j = 0;
  int shift = 0;  // 2^j
  Real d = 0;
};

struct APReport {
  int window = 0;
  int k_max = 0;
  std::vector<Real> d;  // d[k] = max_{n <= N - k} |c_{n+k} - c_n|, k = 0..k_max
  std::vector<Real> eps;
  std::vector<std::vector<int>> almost_periods;  // E(eps[i]), shifts k >= 1
  std::vector<Real> first_half;   // D profile on c_1 .. c_{N/2}
  std::vector<Real> second_half;  // D profile on c_{N/2+1} .. c_N
  std::vector<DyadicPoint> dyadic;
  bool dyadic_nonincreasing = true;
  std::vector<std::string> notes;
};

std::vector<Real> default_eps_grid();

APReport ap_profile(const std::vector<Real>& seq, int k_max, const std::vector<Real>& eps_grid = default_eps_grid());

struct TailCurve {
  int k = 0;
  std::vector<int> n0;
  std::vector<Real> sup;  // sup_{n >= n0} |c_{n+k} - c_n|, nonincreasing
};

struct TailReport {
  int window = 0;
  std::vector<TailCurve> curves;
};

/// Needs at least four times the largest candidate shift.
TailReport asymptotic_ap_gap(const std::vector<Real>& seq, const std::vector<int>& period_candidates, int points = 32);

struct HLevel {
  int s = 0;
  long components = 0;
  Real min_length = 0;
  Real max_length = 0;
  Real delta = 0;
  Rational mass;         // equilibrium mass of each component, 2^{-s}
  Rational total_mass;   // components * mass
  Real h_delta = 0;      // candidate h at delta_s
  Real ratio_min = 0;    // mass / h(min_length)
  Real ratio_max = 0;    // mass / h(max_length)
  Real length_ratio = 0; // max_length / delta_s
};

struct HReport {
  std::vector<HLevel> levels;
  Real c = 0;             // max over levels of max(r, 1/r) for both ratios
  Real length_c = 0;      // max over levels of max_length / delta_s
  bool summable = false;  // sum gamma_k < infinity for the model
  std::string label = "candidate-h";
  std::vector<std::string> notes;
};

/// Candidate dimension function: h(delta_s) = 2^{-s}, geometric in between.
Real candidate_h(const GammaTower& t, const Real& length);

/// K-gamma towers with every gamma_k < 1/32 only.
HReport h_compare(const GammaTower& t, int s_max);

}  // namespace cantorlab
