#include "cantorlab/set_builder.hpp"

#include <algorithm>
#include <sstream>

#include "numeric.hpp"

namespace cantorlab {

namespace mp = boost::multiprecision;

namespace {

Rational rational_pow(const Rational& q, unsigned long e) {
  Integer num = mp::pow(mp::numerator(q), static_cast<unsigned>(e));
  Integer den = mp::pow(mp::denominator(q), static_cast<unsigned>(e));
  return Rational(num, den);
}

const Rational kQuarter(1, 4);

}  // namespace

// ---------------------------------------------------------------------------
// GammaSpec

GammaSpec GammaSpec::constant(Rational c) {
  GammaSpec g;
  g.kind = GammaKind::kConstant;
  g.values = {std::move(c)};
  return g;
}

GammaSpec GammaSpec::periodic(std::vector<Rational> period) {
  if (period.empty()) throw invalid("gamma: empty period");
  GammaSpec g;
  g.kind = GammaKind::kPeriodic;
  g.values = std::move(period);
  return g;
}

GammaSpec GammaSpec::explicit_list(std::vector<Rational> list) {
  if (list.empty()) throw invalid("gamma: empty list");
  GammaSpec g;
  g.kind = GammaKind::kExplicitList;
  g.values = std::move(list);
  return g;
}

GammaSpec GammaSpec::formula(GammaFamily family, Rational a, Rational b) {
  GammaSpec g;
  g.kind = GammaKind::kFormulaFamily;
  g.family = family;
  g.a = std::move(a);
  g.b = std::move(b);
  if (g.a <= 0) throw invalid("gamma: family parameter a must be positive");
  switch (family) {
    case GammaFamily::kPower:
      if (g.b <= 0) throw invalid("gamma: power family needs b > 0");
      break;
    case GammaFamily::kReciprocal:
      if (g.b <= -1) throw invalid("gamma: reciprocal family needs b > -1");
      break;
    case GammaFamily::kDoubleExponential:
      if (g.b <= 0 || g.b >= 1) throw invalid("gamma: double-exponential family needs 0 < b < 1");
      break;
  }
  return g;
}

Rational GammaSpec::gamma(int k) const {
  if (k < 0) throw invalid("gamma index must be nonnegative");
  if (k == 0) return Rational(1);
  switch (kind) {
    case GammaKind::kConstant:
      return values.front();
    case GammaKind::kPeriodic:
      return values[static_cast<size_t>(k - 1) % values.size()];
    case GammaKind::kExplicitList:
      return values[std::min(static_cast<size_t>(k), values.size()) - 1];
    case GammaKind::kFormulaFamily:
      switch (family) {
        case GammaFamily::kPower:
          return a * rational_pow(b, static_cast<unsigned long>(k));
        case GammaFamily::kReciprocal:
          return a / (Rational(k) + b);
        case GammaFamily::kDoubleExponential:
          if (k > 24) throw invalid("gamma: double-exponential family is limited to k <= 24");
          return a * rational_pow(b, 1ul << k);
      }
  }
  throw internal("unknown gamma kind");
}

Rational GammaSpec::infimum() const {
  switch (kind) {
    case GammaKind::kConstant:
      return values.front();
    case GammaKind::kPeriodic:
    case GammaKind::kExplicitList:
      return *std::min_element(values.begin(), values.end());
    case GammaKind::kFormulaFamily:
      if (family == GammaFamily::kPower) {
        if (b == 1) return a;
        if (b > 1) return a * b;
      }
      return Rational(0);
  }
  throw internal("unknown gamma kind");
}

Rational GammaSpec::supremum() const {
  switch (kind) {
    case GammaKind::kConstant:
      return values.front();
    case GammaKind::kPeriodic:
    case GammaKind::kExplicitList:
      return *std::max_element(values.begin(), values.end());
    case GammaKind::kFormulaFamily:
      switch (family) {
        case GammaFamily::kPower:
          // Unbounded for b > 1; any value >= 1/4 signals that.
          return b > 1 ? Rational(1) : a * b;
        case GammaFamily::kReciprocal:
          return a / (Rational(1) + b);
        case GammaFamily::kDoubleExponential:
          return a * b * b;
      }
  }
  throw internal("unknown gamma kind");
}

bool GammaSpec::summable() const {
  if (kind != GammaKind::kFormulaFamily) return false;
  switch (family) {
    case GammaFamily::kPower:
      return b < 1;
    case GammaFamily::kReciprocal:
      return false;
    case GammaFamily::kDoubleExponential:
      return true;
  }
  return false;
}

bool GammaSpec::log_sum_diverges() const {
  return kind == GammaKind::kFormulaFamily && family == GammaFamily::kDoubleExponential;
}

Real GammaSpec::weighted_log_sum() const {
  if (log_sum_diverges()) throw invalid("gamma: weighted log-sum diverges (polar limit set)");
  switch (kind) {
    case GammaKind::kConstant:
      return mp::log(to_real(values.front()));
    case GammaKind::kPeriodic: {
      // sum_j 2^{-j} log p_j / (1 - 2^{-L})
      const long period = static_cast<long>(values.size());
      Real sum = 0;
      for (long j = 1; j <= period; ++j) sum += pow2(-j) * mp::log(to_real(values[static_cast<size_t>(j - 1)]));
      return sum / (1 - pow2(-period));
    }
    case GammaKind::kExplicitList: {
      const long len = static_cast<long>(values.size());
      Real sum = 0;
      for (long j = 1; j <= len; ++j) sum += pow2(-j) * mp::log(to_real(values[static_cast<size_t>(j - 1)]));
      // Constant tail gamma_k = gamma_L for k > L.
      sum += pow2(-len) * mp::log(to_real(values.back()));
      return sum;
    }
    case GammaKind::kFormulaFamily:
      if (family == GammaFamily::kPower) {
        // sum 2^{-k} (log a + k log b) = log a + 2 log b
        return mp::log(to_real(a)) + 2 * mp::log(to_real(b));
      } else {
        Real sum = 0;
        const Real la = mp::log(to_real(a));
        const Real bb = to_real(b);
        const long terms = static_cast<long>(working_precision()) + 64;
        for (long k = 1; k <= terms; ++k) sum += pow2(-k) * (la - mp::log(Real(k) + bb));
        return sum;
      }
  }
  throw internal("unknown gamma kind");
}

std::string GammaSpec::describe() const {
  std::ostringstream os;
  auto list = [&os](const std::vector<Rational>& v) {
    os << "[";
    for (size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i].str();
    os << "]";
  };
  switch (kind) {
    case GammaKind::kConstant:
      os << "constant " << values.front().str();
      break;
    case GammaKind::kPeriodic:
      os << "periodic ";
      list(values);
      break;
    case GammaKind::kExplicitList:
      os << "list ";
      list(values);
      break;
    case GammaKind::kFormulaFamily:
      switch (family) {
        case GammaFamily::kPower:
          os << "power a*b^k, a=" << a.str() << ", b=" << b.str();
          break;
        case GammaFamily::kReciprocal:
          os << "reciprocal a/(k+b), a=" << a.str() << ", b=" << b.str();
          break;
        case GammaFamily::kDoubleExponential:
          os << "double-exponential a*b^(2^k), a=" << a.str() << ", b=" << b.str();
          break;
      }
      break;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Variants and stages

std::string to_string(TowerVariant v) {
  switch (v) {
    case TowerVariant::kKGamma:
      return "K-gamma";
    case TowerVariant::kK1Gamma:
      return "K1-gamma";
    case TowerVariant::kCustom:
      return "custom-stages";
    case TowerVariant::kInterval:
      return "interval";
  }
  return "?";
}

TowerVariant parse_variant(const std::string& s) {
  if (s == "K-gamma" || s == "K_gamma" || s == "kgamma") return TowerVariant::kKGamma;
  if (s == "K1-gamma" || s == "K1_gamma" || s == "k1gamma") return TowerVariant::kK1Gamma;
  if (s == "custom-stages" || s == "custom") return TowerVariant::kCustom;
  if (s == "interval") return TowerVariant::kInterval;
  throw invalid("unknown variant '" + s + "'");
}

long GammaTower::branch_count(int s) const {
  long count = 1;
  for (int n = 1; n <= s; ++n) count *= stage(n).degree;
  return count;
}

namespace {

void finish_stage(Stage& st) {
  st.degree = static_cast<int>(st.coeffs.size()) - 1;
  const Real lead = mp::abs(st.leading());
  st.lower_ratio = 0;
  for (int j = 0; j < st.degree; ++j) st.lower_ratio += mp::abs(st.coeffs[static_cast<size_t>(j)]) / lead;
  st.branch_intervals.clear();
  auto lo = invert_stage(st, Real(-1));
  auto hi = invert_stage(st, Real(1));
  std::vector<Real> ends;
  ends.insert(ends.end(), lo.begin(), lo.end());
  ends.insert(ends.end(), hi.begin(), hi.end());
  std::sort(ends.begin(), ends.end());
  for (size_t i = 0; i + 1 < ends.size(); i += 2) st.branch_intervals.emplace_back(ends[i], ends[i + 1]);
}

Stage gamma_stage(StageForm form, const Rational& g) {
  Stage st;
  st.form = form;
  st.gamma = g;
  st.gamma_real = to_real(g);
  if (form == StageForm::kKGammaFirst) {
    // 2z(z-1)/g + 1
    st.exact_coeffs = {Rational(1), Rational(-2) / g, Rational(2) / g};
    st.critical_points = {Real(1) / 2};
  } else {
    // (z^2 - 1)/(2g) + 1
    st.exact_coeffs = {Rational(1) - Rational(1) / (2 * g), Rational(0), Rational(1) / (2 * g)};
    st.critical_points = {Real(0)};
  }
  for (const auto& c : st.exact_coeffs) st.coeffs.push_back(to_real(c));
  st.critical_values = {to_real(Rational(1) - Rational(1) / (2 * g))};
  finish_stage(st);
  return st;
}

void fill_composed_data(GammaTower& t) {
  t.leading.assign(1, Real(1));
  t.log_leading.assign(1, Real(0));
  t.total_degree.assign(1, Real(1));
  for (int n = 1; n <= t.s_max; ++n) {
    const Stage& st = t.stage(n);
    const Real lead = st.leading();
    t.leading.push_back(mp::pow(t.leading.back(), st.degree) * lead);
    t.log_leading.push_back(st.degree * t.log_leading.back() + mp::log(mp::abs(lead)));
    t.total_degree.push_back(t.total_degree.back() * st.degree);
  }
}

}  // namespace

int max_resolvable_level(const GammaSpec& spec, unsigned precision, int cap) {
  PrecisionGuard guard(std::max(precision, 64u));
  const Real floor_log2 = -Real(static_cast<long>(precision) - 16);
  Real log2_delta = 0;
  int level = 0;
  for (int k = 1; k <= cap; ++k) {
    if (spec.log_sum_diverges() && k > 24) break;
    log2_delta += mp::log2(to_real(spec.gamma(k)));
    if (log2_delta < floor_log2) break;
    level = k;
  }
  return level;
}

GammaTower build_tower(const GammaSpec& spec, TowerVariant variant, int s_max, unsigned precision) {
  if (variant != TowerVariant::kKGamma && variant != TowerVariant::kK1Gamma) {
    throw invalid("build_tower: variant must be K-gamma or K1-gamma");
  }
  if (s_max < 1) throw invalid("s_max must be at least 1");
  if (precision < 64) throw invalid("precision must be at least 64 bits");
  PrecisionGuard guard(precision);

  GammaTower t;
  t.variant = variant;
  t.spec = spec;
  t.s_max = s_max;
  t.precision = precision;
  t.gamma.push_back(Rational(1));
  for (int k = 1; k <= s_max; ++k) {
    Rational g = spec.gamma(k);
    if (g <= 0 || g >= kQuarter) {
      throw invalid("gamma[" + std::to_string(k) + "] out of (0, 1/4): gamma out of range (" + g.str() + ")");
    }
    t.gamma.push_back(std::move(g));
  }
  if (spec.supremum() >= kQuarter) {
    throw invalid("gamma out of range: the model leaves (0, 1/4) beyond the built levels");
  }

  // delta_s from the exact product, rounded once.
  Rational running(1);
  t.delta.push_back(Real(1));
  const Real floor_log2 = -Real(static_cast<long>(precision) - 16);
  for (int k = 1; k <= s_max; ++k) {
    running *= t.gamma[static_cast<size_t>(k)];
    Real d = to_real(running);
    if (mp::log2(d) < floor_log2) {
      throw numerical("precision too low: delta_" + std::to_string(k) + " is not resolvable at " +
                      std::to_string(precision) + " bits");
    }
    t.delta.push_back(std::move(d));
  }

  for (int n = 1; n <= s_max; ++n) {
    const bool first = n == 1 && variant == TowerVariant::kKGamma;
    t.stages.push_back(gamma_stage(first ? StageForm::kKGammaFirst : StageForm::kQuadratic,
                                   t.gamma[static_cast<size_t>(n)]));
  }
  fill_composed_data(t);
  return t;
}

GammaTower build_custom_tower(const std::vector<std::vector<Rational>>& stages, unsigned precision) {
  if (stages.empty()) throw invalid("custom tower needs at least one stage");
  if (precision < 64) throw invalid("precision must be at least 64 bits");
  PrecisionGuard guard(precision);
  GammaTower t;
  t.variant = TowerVariant::kCustom;
  t.precision = precision;
  t.s_max = static_cast<int>(stages.size());
  const Real slack = detail::precision_fraction(1, 2);
  for (size_t n = 0; n < stages.size(); ++n) {
    std::vector<Rational> exact = stages[n];
    while (exact.size() > 1 && exact.back() == 0) exact.pop_back();
    Stage st;
    st.form = StageForm::kGeneral;
    st.exact_coeffs = exact;
    for (const auto& c : exact) st.coeffs.push_back(to_real(c));
    if (st.coeffs.size() < 3) throw invalid("stage " + std::to_string(n + 1) + ": degree must be at least 2");
    AdmissibilityReport rep = check_admissible(st.coeffs);
    if (!rep.admissible()) {
      throw invalid("stage " + std::to_string(n + 1) + ": level set not an interval union (" + rep.reason + ")");
    }
    st.critical_points = rep.critical_points;
    st.critical_values = rep.critical_values;
    finish_stage(st);
    if (n > 0) {
      const Real& lo = st.branch_intervals.front().first;
      const Real& hi = st.branch_intervals.back().second;
      if (lo < -1 - slack || hi > 1 + slack) {
        throw invalid("stage " + std::to_string(n + 1) +
                      ": level set not an interval union (stage does not map back into [-1, 1])");
      }
    }
    t.stages.push_back(std::move(st));
  }
  fill_composed_data(t);
  return t;
}

GammaTower interval_tower(unsigned precision) {
  PrecisionGuard guard(precision);
  GammaTower t;
  t.variant = TowerVariant::kInterval;
  t.precision = precision;
  t.s_max = 0;
  t.gamma.push_back(Rational(1));
  t.delta.push_back(Real(1));
  fill_composed_data(t);
  return t;
}

// ---------------------------------------------------------------------------
// Evaluation

Real eval_poly(const std::vector<Real>& c, const Real& x) {
  Real acc = c.back();
  for (size_t i = c.size() - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

Complex eval_poly(const std::vector<Real>& c, const Complex& z) {
  Complex acc(c.back());
  for (size_t i = c.size() - 1; i-- > 0;) {
    acc = acc * z;
    acc.re += c[i];
  }
  return acc;
}

std::pair<Real, Real> eval_poly_with_derivative(const std::vector<Real>& c, const Real& x) {
  Real p = c.back();
  Real dp = 0;
  for (size_t i = c.size() - 1; i-- > 0;) {
    dp = dp * x + p;
    p = p * x + c[i];
  }
  return {p, dp};
}

namespace {

void check_level(const GammaTower& t, int s) {
  if (s < 0 || s > t.s_max) {
    throw invalid("level " + std::to_string(s) + " outside built range 0.." + std::to_string(t.s_max));
  }
}

}  // namespace

Real eval_tower(const GammaTower& t, int s, const Real& x) {
  check_level(t, s);
  Real w = x;
  for (int n = 1; n <= s; ++n) {
    w = eval_poly(t.stage(n).coeffs, w);
    if (mp::isinf(w)) throw numerical("F_s overflow at level " + std::to_string(n) + "; use log variant");
  }
  return w;
}

Complex eval_tower(const GammaTower& t, int s, const Complex& z) {
  check_level(t, s);
  Complex w = z;
  for (int n = 1; n <= s; ++n) {
    w = eval_poly(t.stage(n).coeffs, w);
    if (mp::isinf(w.re) || mp::isinf(w.im)) {
      throw numerical("F_s overflow at level " + std::to_string(n) + "; use log variant");
    }
  }
  return w;
}

Real eval_tower_log(const GammaTower& t, int s, const Complex& z) {
  check_level(t, s);
  const long p = static_cast<long>(working_precision());
  Complex w = z;
  bool asymptotic = false;
  Real log_mod = 0;
  for (int n = 1; n <= s; ++n) {
    const Stage& st = t.stage(n);
    if (!asymptotic) {
      w = eval_poly(st.coeffs, w);
      Real m = abs(w);
      if (m > pow2(p + 32) * (1 + st.lower_ratio)) {
        asymptotic = true;
        log_mod = mp::log(m);
      }
    } else {
      // |f(w)| = |a_d| |w|^d (1 + O(|w|^{-1})), the correction is below 2^{-p}.
      log_mod = st.degree * log_mod + mp::log(mp::abs(st.leading()));
    }
  }
  return asymptotic ? log_mod : log_abs(w);
}

std::pair<Real, Real> eval_tower_with_derivative(const GammaTower& t, int s, const Real& x) {
  check_level(t, s);
  Real w = x;
  Real dw = 1;
  for (int n = 1; n <= s; ++n) {
    auto [v, dv] = eval_poly_with_derivative(t.stage(n).coeffs, w);
    dw *= dv;
    w = std::move(v);
  }
  return {w, dw};
}

// ---------------------------------------------------------------------------
// Inversion

std::vector<Real> invert_stage(const Stage& st, const Real& target) {
  if (st.form != StageForm::kGeneral) {
    Real disc = 1 + 2 * st.gamma_real * (target - 1);
    if (disc < 0) throw internal("negative discriminant inverting a gamma stage");
    Real r = mp::sqrt(disc);
    if (st.form == StageForm::kKGammaFirst) return {(1 - r) / 2, (1 + r) / 2};
    return {-r, r};
  }
  // One root of f - target on each monotone branch between critical points.
  const Real lead = mp::abs(st.leading());
  Real bound = 1 + mp::abs(target - st.coeffs[0]) / lead;
  for (int j = 1; j < st.degree; ++j) bound = mp::max(bound, 1 + mp::abs(st.coeffs[static_cast<size_t>(j)]) / lead);
  bound = bound * st.degree + 1;
  std::vector<Real> edges;
  edges.push_back(-bound);
  edges.insert(edges.end(), st.critical_points.begin(), st.critical_points.end());
  edges.push_back(bound);
  auto f = [&](const Real& x) {
    auto [v, dv] = eval_poly_with_derivative(st.coeffs, x);
    return std::pair<Real, Real>(v - target, dv);
  };
  std::vector<Real> roots;
  for (size_t i = 0; i + 1 < edges.size(); ++i) {
    Real fa = f(edges[i]).first;
    Real fb = f(edges[i + 1]).first;
    if (detail::sign(fa) * detail::sign(fb) > 0) {
      throw internal("stage inversion: target outside the branch range (stage not admissible?)");
    }
    roots.push_back(detail::solve_bracketed(f, edges[i], edges[i + 1]));
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

std::vector<Real> branch_preimages(const GammaTower& t, int s, const Real& target) {
  check_level(t, s);
  if (mp::abs(target) > 1) throw invalid("branch_preimages: |target| must be at most 1");
  std::vector<Real> values{target};
  for (int n = s; n >= 1; --n) {
    std::vector<Real> next;
    next.reserve(values.size() * static_cast<size_t>(t.stage(n).degree));
    for (const Real& v : values) {
      auto pre = invert_stage(t.stage(n), v);
      for (auto& x : pre) next.push_back(std::move(x));
    }
    values = std::move(next);
  }
  if (s == 0) return values;
  const Real tolerance = detail::precision_fraction(1, 2);
  for (Real& x : values) {
    auto [fx, dfx] = eval_tower_with_derivative(t, s, x);
    if (dfx != 0) x -= (fx - target) / dfx;
    Real residual = mp::abs(eval_tower(t, s, x) - target);
    if (residual > tolerance) {
      throw numerical("branch preimage residual " + to_decimal(residual, 6) + " exceeds 2^(-p/2) at level " +
                      std::to_string(s) + "; raise precision");
    }
  }
  std::sort(values.begin(), values.end());
  return values;
}

// ---------------------------------------------------------------------------
// Interval unions

bool IntervalUnion::contains(const Real& x) const {
  auto it = std::upper_bound(intervals.begin(), intervals.end(), x,
                             [](const Real& v, const std::pair<Real, Real>& iv) { return v < iv.first; });
  if (it == intervals.begin()) return false;
  --it;
  return x <= it->second;
}

bool IntervalUnion::subset_of(const IntervalUnion& outer) const {
  size_t j = 0;
  for (const auto& [l, r] : intervals) {
    while (j < outer.intervals.size() && outer.intervals[j].second < l) ++j;
    if (j == outer.intervals.size()) return false;
    if (l < outer.intervals[j].first || r > outer.intervals[j].second) return false;
  }
  return true;
}

Real IntervalUnion::distance(const Real& x) const {
  Real best = -1;
  for (const auto& [l, r] : intervals) {
    Real d = x < l ? Real(l - x) : (x > r ? Real(x - r) : Real(0));
    if (best < 0 || d < best) best = d;
  }
  return best;
}

Real IntervalUnion::min_length() const {
  Real m = intervals.front().second - intervals.front().first;
  for (const auto& [l, r] : intervals) m = mp::min(m, Real(r - l));
  return m;
}

Real IntervalUnion::max_length() const {
  Real m = 0;
  for (const auto& [l, r] : intervals) m = mp::max(m, Real(r - l));
  return m;
}

IntervalUnion level_set(const GammaTower& t, int s) {
  check_level(t, s);
  IntervalUnion u;
  u.precision = working_precision();
  if (s == 0) {
    u.intervals.emplace_back(Real(-1), Real(1));
    u.branches.push_back(1);
    return u;
  }
  auto ends = branch_preimages(t, s, Real(-1));
  auto plus = branch_preimages(t, s, Real(1));
  ends.insert(ends.end(), std::make_move_iterator(plus.begin()), std::make_move_iterator(plus.end()));
  std::sort(ends.begin(), ends.end());
  const Real touch = detail::precision_fraction(1, 2);
  for (size_t i = 0; i + 1 < ends.size(); i += 2) {
    if (!u.intervals.empty() && ends[i] - u.intervals.back().second <= touch) {
      u.intervals.back().second = ends[i + 1];
      ++u.branches.back();
    } else {
      u.intervals.emplace_back(ends[i], ends[i + 1]);
      u.branches.push_back(1);
    }
  }
  return u;
}

// ---------------------------------------------------------------------------
// Admissibility

namespace {

using Poly = std::vector<Real>;

void trim(Poly& p, const Real& tol) {
  while (p.size() > 1 && mp::abs(p.back()) <= tol) p.pop_back();
  if (p.size() == 1 && mp::abs(p[0]) <= tol) p[0] = 0;
}

bool is_zero(const Poly& p) { return p.size() == 1 && p[0] == 0; }

Poly derivative(const Poly& p) {
  Poly d;
  for (size_t i = 1; i < p.size(); ++i) d.push_back(p[i] * static_cast<long>(i));
  if (d.empty()) d.push_back(Real(0));
  return d;
}

Real max_abs(const Poly& p) {
  Real m = 0;
  for (const auto& c : p) m = mp::max(m, Real(mp::abs(c)));
  return m;
}

// Remainder of a / b.
Poly remainder(Poly a, const Poly& b, const Real& rel_tol) {
  const Real scale = max_abs(a);
  while (a.size() >= b.size() && !is_zero(a)) {
    Real q = a.back() / b.back();
    size_t shift = a.size() - b.size();
    for (size_t i = 0; i < b.size(); ++i) a[i + shift] -= q * b[i];
    a.pop_back();
    if (a.empty()) a.push_back(Real(0));
  }
  trim(a, rel_tol * (scale == 0 ? Real(1) : scale));
  return a;
}

int sign_changes(const std::vector<Poly>& chain, const Real& x) {
  int changes = 0;
  int last = 0;
  for (const auto& p : chain) {
    int sg = detail::sign(eval_poly(p, x));
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

int sign_changes_at_infinity(const std::vector<Poly>& chain, bool positive) {
  int changes = 0;
  int last = 0;
  for (const auto& p : chain) {
    int sg = detail::sign(p.back());
    if (!positive && (p.size() - 1) % 2 == 1) sg = -sg;
    if (sg == 0) continue;
    if (last != 0 && sg != last) ++changes;
    last = sg;
  }
  return changes;
}

}  // namespace

AdmissibilityReport check_admissible(const std::vector<Real>& ascending) {
  Poly p = ascending;
  while (p.size() > 1 && p.back() == 0) p.pop_back();
  const int degree = static_cast<int>(p.size()) - 1;
  if (degree < 2) throw invalid("check_admissible: degree must be at least 2");

  AdmissibilityReport rep;
  rep.degree = degree;
  const Real rel_tol = detail::precision_fraction(1, 2);

  std::vector<Poly> chain{p, derivative(p)};
  while (true) {
    Poly r = remainder(chain[chain.size() - 2], chain.back(), rel_tol);
    if (is_zero(r)) break;
    for (auto& c : r) c = -c;
    chain.push_back(std::move(r));
  }
  if (chain.back().size() > 1) {
    rep.reason = "zeros not simple (repeated zero)";
    return rep;
  }
  const int real_roots = sign_changes_at_infinity(chain, false) - sign_changes_at_infinity(chain, true);
  if (real_roots < degree) {
    rep.reason = "zeros not all real";
    return rep;
  }

  // Isolate each zero by Sturm bisection, then polish.
  const Real lead = mp::abs(p.back());
  Real bound = 0;
  for (int j = 0; j < degree; ++j) bound = mp::max(bound, Real(mp::abs(p[static_cast<size_t>(j)]) / lead));
  bound += 1;
  std::vector<std::pair<Real, Real>> pending{{-bound, bound}};
  std::vector<std::pair<Real, Real>> isolated;
  while (!pending.empty()) {
    auto [a, b] = pending.back();
    pending.pop_back();
    int count = sign_changes(chain, a) - sign_changes(chain, b);
    if (count == 0) continue;
    if (count == 1) {
      isolated.emplace_back(a, b);
      continue;
    }
    Real mid = (a + b) / 2;
    if (eval_poly(p, mid) == 0) mid += (b - a) / 1024;
    pending.emplace_back(a, mid);
    pending.emplace_back(mid, b);
  }
  auto f = [&p](const Real& x) { return eval_poly_with_derivative(p, x); };
  for (auto& [a, b] : isolated) rep.zeros.push_back(detail::solve_bracketed(f, a, b));
  std::sort(rep.zeros.begin(), rep.zeros.end());

  const Poly dp = derivative(p);
  auto fd = [&dp](const Real& x) { return eval_poly_with_derivative(dp, x); };
  for (size_t i = 0; i + 1 < rep.zeros.size(); ++i) {
    Real y = detail::solve_bracketed(fd, rep.zeros[i], rep.zeros[i + 1]);
    rep.critical_values.push_back(eval_poly(p, y));
    rep.critical_points.push_back(std::move(y));
  }

  rep.margin = mp::abs(rep.critical_values.front()) - 1;
  size_t worst = 0;
  for (size_t i = 0; i < rep.critical_values.size(); ++i) {
    Real m = mp::abs(rep.critical_values[i]) - 1;
    if (m < rep.margin) {
      rep.margin = m;
      worst = i;
    }
  }
  if (rep.margin >= 0) {
    rep.verdict = AdmissibilityVerdict::kAdmissible;
  } else if (rep.margin >= -detail::precision_fraction(1, 4)) {
    rep.verdict = AdmissibilityVerdict::kAdmissibleMarginal;
    rep.reason = "admissible (marginal): critical value " + to_decimal(rep.critical_values[worst], 12);
  } else {
    rep.verdict = AdmissibilityVerdict::kNotAdmissible;
    rep.reason = "critical value |T(y_" + std::to_string(worst + 1) +
                 ")| = " + to_decimal(mp::abs(rep.critical_values[worst]), 12) + " < 1";
  }
  return rep;
}

RegularityReport check_regular_sequence(const GammaTower& t) {
  RegularityReport rep;
  if (t.stages.empty()) {
    rep.verdict = "degenerate tower has no stages";
    return rep;
  }
  bool first = true;
  for (const Stage& st : t.stages) {
    const Real lead = mp::abs(st.leading());
    Real ratio = 0;
    for (int j = 0; j < st.degree; ++j) ratio = mp::max(ratio, Real(mp::abs(st.coeffs[static_cast<size_t>(j)]) / lead));
    Real growth = mp::log(lead) / st.degree;
    if (first) {
      rep.a1 = lead;
      rep.a2 = ratio;
      rep.a3 = growth;
      first = false;
    } else {
      rep.a1 = mp::min(rep.a1, lead);
      rep.a2 = mp::max(rep.a2, ratio);
      rep.a3 = mp::max(rep.a3, growth);
    }
  }
  if (t.has_gamma() && t.spec) {
    const Rational inf = t.spec->infimum();
    if (inf > 0) {
      rep.regular = true;
      rep.verdict = "regular (inf gamma = " + inf.str() + " > 0)";
    } else {
      rep.regular = false;
      rep.verdict = "not regular (inf gamma = 0)";
    }
  } else {
    rep.regular = true;
    rep.verdict = "regular over the available stages (finite tower)";
  }
  return rep;
}

}  // namespace cantorlab
