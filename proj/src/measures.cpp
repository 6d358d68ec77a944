#include "cantorlab/measures.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cantorlab {

namespace mp = boost::multiprecision;

Real DiscreteMeasure::total_mass() const {
  Real sum = 0;
  for (const auto& w : weights) sum += w;
  return sum;
}

WeightSpec WeightSpec::constant(Real c) {
  if (c < 0) throw invalid("weight must be nonnegative");
  WeightSpec w;
  w.description = "constant " + to_decimal(c, 12);
  w.eval = [c](const Real&) { return c; };
  return w;
}

WeightSpec WeightSpec::indicator(Real lo, Real hi) {
  if (hi < lo) throw invalid("indicator: empty interval");
  WeightSpec w;
  w.description = "indicator [" + to_decimal(lo, 12) + ", " + to_decimal(hi, 12) + "]";
  w.eval = [lo, hi](const Real& x) { return (x >= lo && x <= hi) ? Real(1) : Real(0); };
  return w;
}

WeightSpec WeightSpec::abs_power(Real x0, Real alpha) {
  WeightSpec w;
  w.description = "|x - " + to_decimal(x0, 12) + "|^" + to_decimal(alpha, 12);
  w.eval = [x0, alpha](const Real& x) { return Real(mp::pow(mp::abs(x - x0), alpha)); };
  return w;
}

WeightSpec WeightSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  std::vector<Real> args;
  if (colon != std::string::npos) {
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) args.push_back(parse_real(item));
  }
  auto need = [&](size_t n) {
    if (args.size() != n) throw invalid("weight '" + text + "': expected " + std::to_string(n) + " arguments");
  };
  if (kind == "constant") {
    need(1);
    return constant(args[0]);
  }
  if (kind == "indicator") {
    need(2);
    return indicator(args[0], args[1]);
  }
  if (kind == "abs_power") {
    need(2);
    return abs_power(args[0], args[1]);
  }
  throw invalid("unknown weight '" + text + "'");
}

int default_quadrature_size(int n_target, const GammaTower& t, int s) {
  if (n_target < 1) throw invalid("quadrature size: target must be positive");
  const long d = t.branch_count(s);
  return 2 * static_cast<int>(n_target / d) + 2;
}

DiscreteMeasure pullback_quadrature(const GammaTower& t, int s, int m) {
  if (m < 1) throw invalid("pullback_quadrature: m must be positive");
  if (s < 0 || s > t.s_max) throw invalid("pullback_quadrature: level outside built range");
  DiscreteMeasure mu;
  mu.precision = working_precision();
  mu.provenance.tower = to_string(t.variant);
  mu.provenance.level = s;
  mu.provenance.base_size = m;
  const Real p = pi();
  for (int j = 1; j <= m; ++j) {
    Real node = mp::cos((2 * j - 1) * p / (2 * m));
    auto pre = branch_preimages(t, s, node);
    for (auto& x : pre) mu.nodes.push_back(std::move(x));
  }
  std::sort(mu.nodes.begin(), mu.nodes.end());
  const Real w = Real(1) / Real(mu.nodes.size());
  mu.weights.assign(mu.nodes.size(), w);
  return mu;
}

DiscreteMeasure apply_weight(const DiscreteMeasure& mu, const WeightSpec& w) {
  DiscreteMeasure out = mu;
  out.density.resize(mu.size());
  Real total = 0;
  for (size_t i = 0; i < mu.size(); ++i) {
    Real v = w.eval(mu.nodes[i]);
    if (!mp::isfinite(v) || v < 0) {
      throw invalid("weight not finite and nonnegative at node " + to_decimal(mu.nodes[i], 20));
    }
    out.density[i] = v;
    out.weights[i] = mu.weights[i] * v;
    total += out.weights[i];
  }
  if (total == 0) throw invalid("degenerate weight");
  for (auto& x : out.weights) x /= total;
  out.base_weights = mu.weights;
  out.provenance.weight = w.description;
  return out;
}

DiscreteMeasure add_atoms(const DiscreteMeasure& mu, const std::vector<Atom>& atoms) {
  Real mass = 0;
  for (const auto& a : atoms) {
    if (a.mass <= 0) throw invalid("atom mass must be positive");
    mass += a.mass;
  }
  if (mass >= 1) throw invalid("atom masses must sum to less than 1");
  std::vector<std::pair<Real, Real>> pairs;
  for (size_t i = 0; i < mu.size(); ++i) pairs.emplace_back(mu.nodes[i], mu.weights[i] * (1 - mass));
  for (const auto& a : atoms) pairs.emplace_back(a.point, a.mass);
  std::stable_sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
  DiscreteMeasure out;
  out.precision = mu.precision;
  out.provenance = mu.provenance;
  out.provenance.atoms += static_cast<int>(atoms.size());
  for (auto& [x, w] : pairs) {
    out.nodes.push_back(std::move(x));
    out.weights.push_back(std::move(w));
  }
  return out;
}

SzegoValue szego_integral(const DiscreteMeasure& weighted, const DiscreteMeasure& base) {
  if (weighted.density.size() != weighted.size() || weighted.size() != base.size()) {
    throw invalid("szego_integral: measure was not weighted from this base");
  }
  for (size_t i = 0; i < base.size(); ++i) {
    if (weighted.nodes[i] != base.nodes[i]) throw invalid("szego_integral: node sets differ");
  }
  SzegoValue out;
  for (size_t i = 0; i < base.size(); ++i) {
    if (base.weights[i] == 0) continue;
    if (weighted.density[i] == 0) {
      out.minus_infinity = true;
      out.value = 0;
      return out;
    }
    out.value += base.weights[i] * mp::log(weighted.density[i]);
  }
  return out;
}

Real quadrature_cdf(const DiscreteMeasure& mu, const Real& c) {
  Real sum = 0;
  for (size_t i = 0; i < mu.size() && mu.nodes[i] <= c; ++i) sum += mu.weights[i];
  return sum;
}

Real moment(const DiscreteMeasure& mu, int k) {
  Real sum = 0;
  for (size_t i = 0; i < mu.size(); ++i) sum += mu.weights[i] * mp::pow(mu.nodes[i], k);
  return sum;
}

}  // namespace cantorlab
