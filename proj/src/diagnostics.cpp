#include "cantorlab/diagnostics.hpp"

#include <algorithm>

namespace cantorlab {

namespace mp = boost::multiprecision;

namespace {

std::vector<Real> shift_profile(const std::vector<Real>& seq, size_t begin, size_t end, int k_max) {
  const size_t len = end - begin;
  const int top = std::min<int>(k_max, static_cast<int>(len) - 1);
  std::vector<Real> d(static_cast<size_t>(std::max(top, 0)) + 1, Real(0));
  for (int k = 1; k <= top; ++k) {
    Real m = 0;
    for (size_t n = begin; n + static_cast<size_t>(k) < end; ++n) {
      Real diff = mp::abs(seq[n + static_cast<size_t>(k)] - seq[n]);
      if (diff > m) m = diff;
    }
    d[static_cast<size_t>(k)] = m;
  }
  return d;
}

}  // namespace

std::vector<Real> default_eps_grid() { return {Real("1e-1"), Real("1e-2"), Real("1e-3"), Real("1e-4")}; }

APReport ap_profile(const std::vector<Real>& seq, int k_max, const std::vector<Real>& eps_grid) {
  if (seq.empty()) throw invalid("ap_profile: empty sequence");
  if (k_max < 0 || static_cast<size_t>(k_max) >= seq.size()) throw invalid("ap_profile: k_max must be below the sequence length");
  APReport r;
  r.window = static_cast<int>(seq.size());
  r.k_max = k_max;
  r.d = shift_profile(seq, 0, seq.size(), k_max);
  r.eps = eps_grid;
  for (const auto& e : eps_grid) {
    std::vector<int> ks;
    for (int k = 1; k <= k_max; ++k)
      if (r.d[static_cast<size_t>(k)] <= e) ks.push_back(k);
    r.almost_periods.push_back(std::move(ks));
  }
  const size_t half = seq.size() / 2;
  r.first_half = shift_profile(seq, 0, half, k_max);
  r.second_half = shift_profile(seq, half, seq.size(), k_max);
  if (half <= static_cast<size_t>(k_max)) r.notes.emplace_back("half-window profiles truncated at the half length");
  for (int j = 0; (1 << j) <= k_max; ++j) {
    r.dyadic.push_back({j, 1 << j, r.d[static_cast<size_t>(1 << j)]});
    if (j > 0 && r.dyadic[static_cast<size_t>(j)].d > r.dyadic[static_cast<size_t>(j - 1)].d) r.dyadic_nonincreasing = false;
  }
  if (!r.dyadic_nonincreasing) r.notes.emplace_back("dyadic trace D(2^j) increases somewhere");
  return r;
}

TailReport asymptotic_ap_gap(const std::vector<Real>& seq, const std::vector<int>& period_candidates, int points) {
  TailReport out;
  out.window = static_cast<int>(seq.size());
  if (period_candidates.empty()) return out;
  const int k_top = *std::max_element(period_candidates.begin(), period_candidates.end());
  if (static_cast<long>(seq.size()) < 4L * k_top) throw invalid("asymptotic_ap_gap: sequence shorter than 4 times the largest candidate");
  for (int k : period_candidates) {
    if (k < 1) throw invalid("asymptotic_ap_gap: candidate shifts must be positive");
    const size_t count = seq.size() - static_cast<size_t>(k);
    // suffix[n] = sup over n' >= n, 0-based.
    std::vector<Real> suffix(count + 1, Real(0));
    for (size_t n = count; n-- > 0;) suffix[n] = mp::max(suffix[n + 1], Real(mp::abs(seq[n + static_cast<size_t>(k)] - seq[n])));
    TailCurve c;
    c.k = k;
    const size_t stride = std::max<size_t>(1, count / static_cast<size_t>(std::max(points, 1)));
    for (size_t n = 0; n < count; n += stride) {
      c.n0.push_back(static_cast<int>(n) + 1);
      c.sup.push_back(suffix[n]);
    }
    out.curves.push_back(std::move(c));
  }
  return out;
}

Real candidate_h(const GammaTower& t, const Real& length) {
  if (!t.has_gamma() || t.s_max < 1) throw invalid("candidate_h: needs a gamma tower with at least one level");
  if (length <= 0) throw invalid("candidate_h: length must be positive");
  const Real log2 = mp::log(Real(2));
  const Real x = mp::log(length);
  // Segment j joins (log delta_j, -j log 2) and (log delta_{j+1}, -(j+1) log 2).
  int j = 0;
  while (j + 1 < t.s_max && x < mp::log(t.delta[static_cast<size_t>(j + 1)])) ++j;
  const Real x0 = mp::log(t.delta[static_cast<size_t>(j)]);
  const Real x1 = mp::log(t.delta[static_cast<size_t>(j + 1)]);
  const Real y = -(j + (x - x0) / (x1 - x0)) * log2;
  return mp::exp(y);
}

HReport h_compare(const GammaTower& t, int s_max) {
  if (t.variant != TowerVariant::kKGamma || !t.spec) throw invalid("h_compare: needs a K-gamma tower");
  if (s_max < 1 || s_max > t.s_max) throw invalid("h_compare: level outside built range");
  if (t.spec->supremum() >= Rational(1, 32)) throw invalid("h-comparison requires the gamma_k < 1/32 parameter regime");
  HReport r;
  r.summable = t.spec->summable();
  if (!r.summable) r.notes.emplace_back("sum of gamma_k diverges for this model; comparison is per level only");
  for (int s = 1; s <= s_max; ++s) {
    IntervalUnion k = level_set(t, s);
    HLevel lv;
    lv.s = s;
    lv.components = static_cast<long>(k.size());
    lv.min_length = k.min_length();
    lv.max_length = k.max_length();
    lv.delta = t.delta[static_cast<size_t>(s)];
    lv.mass = Rational(1, 1);
    for (int i = 0; i < s; ++i) lv.mass /= 2;
    lv.total_mass = lv.mass * lv.components;
    lv.h_delta = candidate_h(t, lv.delta);
    const Real mass = Real(lv.mass);
    lv.ratio_min = mass / candidate_h(t, lv.min_length);
    lv.ratio_max = mass / candidate_h(t, lv.max_length);
    lv.length_ratio = lv.max_length / lv.delta;
    if (lv.total_mass != 1) r.notes.push_back("level " + std::to_string(s) + ": masses do not sum to 1");
    for (const Real& q : {lv.ratio_min, lv.ratio_max}) r.c = mp::max(r.c, mp::max(q, Real(1 / q)));
    r.length_c = mp::max(r.length_c, lv.length_ratio);
    r.levels.push_back(std::move(lv));
  }
  return r;
}

}  // namespace cantorlab
