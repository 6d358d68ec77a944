#pragma once

// Chebyshev polynomials of interval unions, Widom factors and Markov factors.

#include <optional>
#include <string>
#include <vector>

#include "cantorlab/set_builder.hpp"

namespace cantorlab {

/// Chebyshev-Lobatto points, `density` per component, sorted.
std::vector<Real> chebyshev_grid(const IntervalUnion& k, int density);

struct Extremum {
  Real x;
  int sign = 0;
};

struct ExtremalReport {
  int degree = 0;
  std::vector<Real> monomial;   // ascending, monic
  std::vector<Real> chebyshev;  // coefficients in T_k of the enclosing interval
  Real norm = 0;                // sup over K when polished, else over the grid
  std::vector<Extremum> equioscillation;
  int alternation = 0;
  int grid_density = 0;
  int grid_size = 0;
  int iterations = 0;
  Real refinement_change = 0;   // relative norm change at doubled density
  bool certified = false;
  std::vector<std::string> notes;
};

struct RemezOptions {
  bool refine = true;  // rerun at doubled density to certify
  int max_iterations = 0;  // 0: 100 (n + 1)
  bool polish = true;  // move the reference off the grid; false keeps the grid optimum
};

/// Single-exchange Remez on the Chebyshev grid of K, then continued off the
/// grid from the converged reference. n <= 64.
ExtremalReport remez(const IntervalUnion& k, int n, int grid_density, const RemezOptions& options = {});

/// F_s / A_s, the Chebyshev polynomial of K_s at degree D_s; norm 1 / A_s.
Real dyadic_chebyshev_norm(const GammaTower& t, int s);

struct WidomRow {
  int n = 0;
  Real norm = 0;
  Real w = 0;
  bool certified = false;
};

struct WidomSeries {
  std::vector<WidomRow> rows;
  Real cap = 0;
  Real max_w = 0;
  Real trend = 0;  // least-squares slope of W_n against n
  bool below_one = false;
  std::vector<std::string> notes;
};

WidomSeries widom_factors(const IntervalUnion& k, const Real& cap, const std::vector<int>& n_list, int grid_density);
/// Same from reports already computed.
WidomSeries widom_series(const std::vector<ExtremalReport>& reports, const Real& cap);

struct MarkovOptions {
  int grid_density = 64;
  /// Optional tower for F_k candidates and the 2 / delta_s ratio.
  const GammaTower* tower = nullptr;
  int level = -1;  // level of K in the tower
  bool chebyshev_candidate = true;
};

struct MarkovReport {
  int n = 0;
  Real lower = 0;  // best candidate ||q'|| / ||q|| on the grid
  Real upper = 0;  // grid LP value, certified by dual multipliers
  Real argmax = 0;
  std::optional<Real> ratio;  // upper * delta_s / 2 when n = 2^s
  int grid_size = 0;
  long pivots = 0;
  std::string best_candidate;
  std::vector<std::string> notes;
};

MarkovReport markov_factor(const IntervalUnion& k, int n, const MarkovOptions& options = {});

}  // namespace cantorlab
