#pragma once

// Discrete equilibrium measures of tower level sets and weighted variants.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cantorlab/set_builder.hpp"

namespace cantorlab {

struct MeasureProvenance {
  std::string tower;  // tower description
  int level = 0;
  int base_size = 0;  // m
  std::string weight = "equilibrium";
  int atoms = 0;
};

struct DiscreteMeasure {
  std::vector<Real> nodes;  // sorted
  std::vector<Real> weights;
  /// w(node) before renormalization; empty for unweighted measures.
  std::vector<Real> density;
  /// Weights of the measure `density` was applied to.
  std::vector<Real> base_weights;
  MeasureProvenance provenance;
  unsigned precision = 256;

  size_t size() const { return nodes.size(); }
  Real total_mass() const;
};

struct WeightSpec {
  std::string description;
  std::function<Real(const Real&)> eval;

  static WeightSpec constant(Real c);
  /// 1 on [lo, hi], 0 elsewhere.
  static WeightSpec indicator(Real lo, Real hi);
  /// |x - x0|^alpha
  static WeightSpec abs_power(Real x0, Real alpha);
  /// "constant:c", "indicator:lo,hi", "abs_power:x0,alpha"
  static WeightSpec parse(const std::string& text);
};

struct Atom {
  Real point;
  Real mass;
};

/// Base rule size giving at least 2n nodes; the pullback rule is then exact
/// for degree 2n against mu_{K_s}.
int default_quadrature_size(int n_target, const GammaTower& t, int s);

/// Gauss-Chebyshev nodes of the arcsine measure pulled back through F_s;
/// each node carries weight 1 / (m D_s).
DiscreteMeasure pullback_quadrature(const GammaTower& t, int s, int m);

/// Multiplies weights by w(node) and renormalizes.
DiscreteMeasure apply_weight(const DiscreteMeasure& mu, const WeightSpec& w);

/// (1 - sum masses) mu + sum masses * delta_point.
DiscreteMeasure add_atoms(const DiscreteMeasure& mu, const std::vector<Atom>& atoms);

struct SzegoValue {
  Real value = 0;
  bool minus_infinity = false;
};

/// sum_i base_i log w(node_i) for a measure produced by apply_weight from `base`.
SzegoValue szego_integral(const DiscreteMeasure& weighted, const DiscreteMeasure& base);

/// mu((-inf, c])
Real quadrature_cdf(const DiscreteMeasure& mu, const Real& c);

/// int x^k dmu
Real moment(const DiscreteMeasure& mu, int k);

}  // namespace cantorlab
