#include "cantorlab/potential.hpp"

#include <algorithm>
#include <cmath>

#include "numeric.hpp"

namespace cantorlab {

namespace mp = boost::multiprecision;

PotentialContext make_potential_context(std::shared_ptr<const GammaTower> tower) {
  if (!tower) throw invalid("potential context needs a tower");
  PotentialContext ctx;
  ctx.precision = working_precision();
  const Real log2v = mp::log(Real(2));
  for (int s = 0; s <= tower->s_max; ++s) {
    ctx.cap_levels.push_back(mp::exp(-(log2v + tower->log_leading[static_cast<size_t>(s)]) /
                                     tower->total_degree[static_cast<size_t>(s)]));
  }
  if (tower->has_gamma() && tower->spec) {
    if (tower->spec->log_sum_diverges()) {
      ctx.polar = true;
      ctx.cap_limit = 0;
    } else {
      ctx.cap_limit = mp::exp(tower->spec->weighted_log_sum());
      if (tower->variant == TowerVariant::kK1Gamma) ctx.cap_limit *= 2;
    }
  } else {
    ctx.cap_limit = ctx.cap_levels.back();
    ctx.limit_is_finite_level = true;
  }
  ctx.tower = std::move(tower);
  return ctx;
}

Real capacity(const PotentialContext& ctx, int s) {
  if (s < 0 || s > ctx.tower->s_max) throw invalid("capacity: level outside built range");
  return ctx.cap_levels[static_cast<size_t>(s)];
}

const Real& capacity_limit(const PotentialContext& ctx) { return ctx.cap_limit; }

Real capacity_product_form(const GammaTower& t, int s) {
  if (!t.has_gamma()) throw invalid("capacity_product_form: gamma variants only");
  if (s < 0 || s > t.s_max) throw invalid("capacity_product_form: level outside built range");
  if (s == 0) return Real("0.5");
  Real log_cap = 0;
  for (int k = 1; k <= s; ++k) log_cap += pow2(-k) * mp::log(to_real(t.gamma[static_cast<size_t>(k)]));
  const Real log2v = mp::log(Real(2));
  if (t.variant == TowerVariant::kKGamma) {
    log_cap -= pow2(-s) * 2 * log2v;
  } else {
    log_cap += (1 - pow2(1 - s)) * log2v;
  }
  return mp::exp(log_cap);
}

namespace {

// log |phi(w)| for the exterior map of [-1, 1]; zero on the segment.
Real log_phi(const Complex& w) {
  if (w.im == 0 && mp::abs(w.re) <= 1) return Real(0);
  Complex r = sqrt(w * w - Complex(Real(1)));
  // Pick the sign that avoids cancellation; |w + r| |w - r| = 1.
  const bool plus = w.re * r.re + w.im * r.im >= 0;
  Complex phi = plus ? w + r : w - r;
  return mp::abs(log_abs(phi));
}

// Steps z through the stages, tracking F_k(z) until it is large enough that
// log|F_k| follows the leading terms exactly at working precision.
class Orbit {
 public:
  Orbit(const GammaTower& t, Complex z) : tower_(t), w_(std::move(z)) {}

  void step() {
    ++level_;
    const Stage& st = tower_.stage(level_);
    if (!asymptotic_) {
      w_ = eval_poly(st.coeffs, w_);
      Real m = abs(w_);
      if (m > pow2(static_cast<long>(working_precision()) + 32) * (1 + st.lower_ratio)) {
        asymptotic_ = true;
        log_mod_ = mp::log(m);
      }
    } else {
      log_mod_ = st.degree * log_mod_ + mp::log(mp::abs(st.leading()));
    }
  }

  // log |phi(F_k(z))|
  Real log_phi_value() const {
    if (asymptotic_) return log_mod_ + mp::log(Real(2));
    return log_phi(w_);
  }

  bool inside_segment() const { return !asymptotic_ && w_.im == 0 && mp::abs(w_.re) <= 1; }
  int level() const { return level_; }

 private:
  const GammaTower& tower_;
  Complex w_;
  int level_ = 0;
  bool asymptotic_ = false;
  Real log_mod_ = 0;
};

}  // namespace

Real green_level(const PotentialContext& ctx, int s, const Complex& z) {
  const GammaTower& t = *ctx.tower;
  if (s < 0 || s > t.s_max) throw invalid("green_level: level outside built range");
  Orbit orbit(t, z);
  for (int k = 1; k <= s; ++k) orbit.step();
  return orbit.log_phi_value() / t.total_degree[static_cast<size_t>(s)];
}

GreenSample green(const PotentialContext& ctx, const Complex& z, const Real& tol) {
  const GammaTower& t = *ctx.tower;
  GreenSample sample;
  sample.z = z;
  Orbit orbit(t, z);
  Real previous = orbit.log_phi_value();
  if (t.s_max == 0) {
    sample.value = previous;
    sample.converged = true;
    return sample;
  }
  for (int s = 1; s <= t.s_max; ++s) {
    orbit.step();
    Real g = orbit.log_phi_value() / t.total_degree[static_cast<size_t>(s)];
    sample.level = s;
    if (g > 0 && previous > 0 && mp::abs(g - previous) < tol) {
      sample.value = std::move(g);
      sample.converged = true;
      return sample;
    }
    previous = std::move(g);
  }
  sample.value = previous;
  sample.converged = sample.value == 0 && orbit.inside_segment();
  return sample;
}

// ---------------------------------------------------------------------------
// Modulus of continuity probe

namespace {

struct Fit {
  Real slope = 0;
  Real intercept = 0;
  Real rms = 0;
};

Fit least_squares(const std::vector<Real>& x, const std::vector<Real>& y) {
  Fit f;
  const size_t n = x.size();
  if (n < 2) return f;
  Real mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  Real sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  Real ss = 0;
  for (size_t i = 0; i < n; ++i) {
    Real r = y[i] - (f.intercept + f.slope * x[i]);
    ss += r * r;
  }
  f.rms = mp::sqrt(ss / n);
  return f;
}

}  // namespace

ModulusReport green_modulus(const PotentialContext& ctx, const ModulusOptions& options) {
  const GammaTower& t = *ctx.tower;
  if (options.deltas.empty()) throw invalid("green_modulus: empty delta grid");
  for (size_t i = 0; i < options.deltas.size(); ++i) {
    if (options.deltas[i] <= 0) throw invalid("green_modulus: deltas must be positive");
    if (i > 0 && options.deltas[i] >= options.deltas[i - 1]) {
      throw invalid("green_modulus: delta grid must be strictly decreasing");
    }
  }
  if (options.samples_per_delta < 1) throw invalid("green_modulus: samples_per_delta must be positive");

  ModulusReport report;
  const int g = options.geometry_level < 0 ? std::min(t.s_max, 10) : options.geometry_level;
  if (g > t.s_max) throw invalid("green_modulus: geometry level beyond the built tower");
  report.geometry_level = g;
  const IntervalUnion set = level_set(t, g);
  const bool exact = g == t.s_max;
  // Structure below level g is invisible to the sampler.
  const Real resolution = exact ? Real(0) : set.max_length();

  std::vector<Real> fit_x, fit_y, fit_y_min;
  for (const Real& delta : options.deltas) {
    ModulusRow row;
    row.delta = delta;
    if (delta <= resolution) {
      row.skipped = true;
      row.note = "delta below level-" + std::to_string(g) + " resolution";
      report.warnings.push_back("skipped delta " + to_decimal(delta, 6) + ": " + row.note);
      report.rows.push_back(std::move(row));
      continue;
    }
    std::vector<Complex> points;
    const bool real_axis = options.placement != ShellPlacement::kOffAxis;
    const bool off_axis = options.placement != ShellPlacement::kRealAxis;
    if (real_axis) {
      points.emplace_back(set.intervals.front().first - delta, Real(0));
      points.emplace_back(set.intervals.back().second + delta, Real(0));
    }
    if (off_axis) {
      if (exact) {
        for (const auto& [l, r] : set.intervals) points.emplace_back((l + r) / 2, delta);
      }
      points.emplace_back(set.intervals.front().first, delta);
      points.emplace_back(set.intervals.back().second, delta);
    }
    std::vector<Complex> rest;
    if (real_axis) {
      for (size_t i = 0; i + 1 < set.size(); ++i) {
        const Real& right = set.intervals[i].second;
        const Real& left = set.intervals[i + 1].first;
        if (left - right < 2 * delta) continue;
        rest.emplace_back(right + delta, Real(0));
        rest.emplace_back(left - delta, Real(0));
      }
    }
    if (off_axis) {
      for (size_t i = 0; i < set.size(); ++i) {
        if (i > 0) rest.emplace_back(set.intervals[i].first, delta);
        if (i + 1 < set.size()) rest.emplace_back(set.intervals[i].second, delta);
      }
    }
    const size_t budget = static_cast<size_t>(options.samples_per_delta);
    if (points.size() > budget) points.resize(budget);
    const size_t room = budget - points.size();
    if (rest.size() <= room) {
      for (auto& p : rest) points.push_back(std::move(p));
    } else if (room > 0) {
      for (size_t k = 0; k < room; ++k) points.push_back(rest[k * rest.size() / room]);
    }

    bool first = true;
    for (const Complex& z : points) {
      GreenSample gs = green(ctx, z, options.tol);
      if (first) {
        row.omega_max = gs.value;
        row.omega_min = gs.value;
        first = false;
      } else {
        row.omega_max = mp::max(row.omega_max, gs.value);
        row.omega_min = mp::min(row.omega_min, gs.value);
      }
      if (!gs.converged) row.note = "some samples unconverged";
    }
    row.samples = static_cast<int>(points.size());
    row.ratio = row.omega_min > 0 ? Real(row.omega_max / row.omega_min) : Real(0);
    if (row.omega_min > 0) {
      fit_x.push_back(mp::log(delta));
      fit_y.push_back(mp::log(row.omega_max));
      fit_y_min.push_back(mp::log(row.omega_min));
    }
    report.rows.push_back(std::move(row));
  }

  if (fit_x.size() >= 2) {
    Fit fmax = least_squares(fit_x, fit_y);
    Fit fmin = least_squares(fit_x, fit_y_min);
    report.alpha_fit = fmax.slope;
    report.alpha_min_fit = fmin.slope;
    report.residual = fmax.rms;
    bool first = true;
    for (const auto& row : report.rows) {
      if (row.skipped || row.omega_min <= 0) continue;
      Real scale = mp::pow(row.delta, report.alpha_fit);
      Real lo = row.omega_min / scale;
      Real hi = row.omega_max / scale;
      if (first) {
        report.c1_fit = lo;
        report.c2_fit = hi;
        first = false;
      } else {
        report.c1_fit = mp::min(report.c1_fit, lo);
        report.c2_fit = mp::max(report.c2_fit, hi);
      }
    }
  } else {
    report.warnings.emplace_back("fewer than two usable deltas; no fit");
  }
  return report;
}

// ---------------------------------------------------------------------------
// Equilibrium measure distribution

CdfValue equilibrium_cdf(const PotentialContext& ctx, const Real& c) {
  const GammaTower& t = *ctx.tower;
  CdfValue out;
  if (c < -1 || c > 1) {
    out.mass = c < -1 ? Rational(0) : Rational(1);
    out.value = to_real(out.mass);
    out.level = 0;
    return out;
  }
  Integer count = 0;
  Integer total = 1;
  int orientation = 1;
  Real w = c;
  for (int k = 1; k <= t.s_max; ++k) {
    const Stage& st = t.stage(k);
    const auto& iv = st.branch_intervals;
    const int d = static_cast<int>(iv.size());
    int left = 0;
    int inside = -1;
    for (int j = 0; j < d; ++j) {
      if (iv[static_cast<size_t>(j)].second < w) {
        ++left;
      } else if (iv[static_cast<size_t>(j)].first <= w) {
        inside = j;
      }
    }
    const int below = orientation > 0 ? left : d - left - (inside >= 0 ? 1 : 0);
    count = count * d + below;
    total *= d;
    if (inside < 0) {
      out.mass = Rational(count, total);
      out.value = to_real(out.mass);
      out.level = k;
      return out;
    }
    const auto& branch = iv[static_cast<size_t>(inside)];
    const Real mid = (branch.first + branch.second) / 2;
    orientation *= detail::sign(eval_poly_with_derivative(st.coeffs, mid).second);
    w = eval_poly(st.coeffs, w);
  }
  throw invalid("point not separated at s_max (c = " + to_decimal(c, 20) + ")");
}

// ---------------------------------------------------------------------------
// Parreau-Widom partial sums

PwReport pw_sum(const PotentialContext& ctx, int s) {
  const GammaTower& t = *ctx.tower;
  if (s < 0 || s > t.s_max) throw invalid("pw_sum: level outside built range");
  PwReport report;
  std::vector<Real> critical;
  for (int k = 1; k <= s; ++k) {
    const Stage& st = t.stage(k);
    for (size_t j = 0; j < st.critical_points.size(); ++j) {
      // Critical values of modulus exactly 1 sit inside K_k.
      if (mp::abs(st.critical_values[j]) <= 1) continue;
      const Real& y = st.critical_points[j];
      if (mp::abs(y) > 1) continue;
      auto xs = branch_preimages(t, k - 1, y);
      for (auto& x : xs) critical.push_back(std::move(x));
    }
    PwLevel row;
    row.level = k;
    row.critical_points = static_cast<int>(critical.size());
    bool first = true;
    for (const Real& x : critical) {
      Real g = green_level(ctx, k, Complex(x));
      row.partial_sum += g;
      if (first) {
        row.value_min = g;
        row.value_max = g;
        first = false;
      } else {
        row.value_min = mp::min(row.value_min, g);
        row.value_max = mp::max(row.value_max, g);
      }
    }
    report.levels.push_back(std::move(row));
  }
  report.sum = report.levels.empty() ? Real(0) : report.levels.back().partial_sum;
  return report;
}

}  // namespace cantorlab
