#include "cantorlab/ortho.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "numeric.hpp"

namespace cantorlab {

namespace mp = boost::multiprecision;

namespace {

Real dot(const std::vector<Real>& u, const std::vector<Real>& v) {
  Real s = 0;
  for (size_t i = 0; i < u.size(); ++i) s += u[i] * v[i];
  return s;
}

Real norm(const std::vector<Real>& v) { return mp::sqrt(dot(v, v)); }

void axpy(const Real& alpha, const std::vector<Real>& x, std::vector<Real>& y) {
  for (size_t i = 0; i < y.size(); ++i) y[i] -= alpha * x[i];
}

Real promote(const Real& x, unsigned digits10) {
  Real y = x;
  y.precision(digits10);
  return y;
}

JacobiData lanczos(const DiscreteMeasure& mu, int N, unsigned bits) {
  PrecisionGuard guard(bits);
  const unsigned digits = Real::default_precision();
  const size_t M = mu.size();
  std::vector<Real> x(M);
  std::vector<std::vector<Real>> q;
  q.reserve(static_cast<size_t>(N) + 1);
  q.emplace_back(M);
  Real scale = 0;
  for (size_t i = 0; i < M; ++i) {
    x[i] = promote(mu.nodes[i], digits);
    q[0][i] = mp::sqrt(promote(mu.weights[i], digits));
    scale = mp::max(scale, mp::abs(x[i]));
  }
  if (scale == 0) scale = 1;
  Real total = norm(q[0]);
  for (auto& v : q[0]) v /= total;

  JacobiData j;
  j.precision = bits;
  j.source = mu.provenance;
  j.trusted_n = std::min<int>(N, static_cast<int>(M / 2));
  if (j.trusted_n < N) j.notes.push_back("trusted range capped at half the node count");
  const Real floor_value = scale * pow2(-static_cast<long>(bits) / 2);

  for (int k = 0; k < N; ++k) {
    std::vector<Real> v(M);
    for (size_t i = 0; i < M; ++i) v[i] = x[i] * q[static_cast<size_t>(k)][i];
    Real bk = dot(q[static_cast<size_t>(k)], v);
    axpy(bk, q[static_cast<size_t>(k)], v);
    if (k > 0) axpy(j.a.back(), q[static_cast<size_t>(k - 1)], v);
    // Classical Gram-Schmidt against every previous vector, repeated once if
    // the pass removed most of the norm.
    for (int pass = 0; pass < 2; ++pass) {
      Real before = norm(v);
      for (int i = 0; i <= k; ++i) {
        Real c = dot(q[static_cast<size_t>(i)], v);
        axpy(c, q[static_cast<size_t>(i)], v);
        if (i == k) bk += c;
      }
      if (norm(v) > before * Real("0.7")) break;
    }
    j.b.push_back(bk);
    Real ak = norm(v);
    if (k + 1 == N) {
      if (ak > floor_value) j.a.push_back(ak);
      break;
    }
    if (ak <= floor_value) {
      j.trusted_n = std::min(j.trusted_n, k + 1);
      j.notes.push_back("norm underflow after n = " + std::to_string(k + 1));
      break;
    }
    for (auto& e : v) e /= ak;
    j.a.push_back(ak);
    q.push_back(std::move(v));
  }
  Real worst = 0;
  for (size_t r = 0; r < q.size(); ++r) {
    for (size_t c = 0; c < r; ++c) worst = mp::max(worst, mp::abs(dot(q[r], q[c])));
  }
  j.orthogonality = worst;
  j.trusted_n = std::min(j.trusted_n, static_cast<int>(j.b.size()));
  return j;
}

}  // namespace

JacobiData stieltjes(const DiscreteMeasure& mu, int N, const StieltjesOptions& options) {
  if (N < 1) throw invalid("stieltjes: N must be positive");
  if (static_cast<size_t>(N) > mu.size()) {
    throw invalid("stieltjes: N = " + std::to_string(N) + " exceeds the node budget (" +
                  std::to_string(mu.size()) + " nodes)");
  }
  const unsigned base = working_precision();
  const Real target = pow2(-static_cast<long>(base) / 2);
  unsigned bits = base;
  while (true) {
    JacobiData j = lanczos(mu, N, bits);
    if (j.orthogonality <= target) return j;
    if (!options.auto_precision || bits * 2 > options.max_bits) {
      j.notes.push_back("orthogonality residual " + to_decimal(j.orthogonality, 6) + " above 2^{-p/2} at " +
                        std::to_string(bits) + " bits");
      return j;
    }
    bits *= 2;
  }
}

CrossLevelResult stieltjes_cross_level(const GammaTower& t, int s, int N, int m, const Real& tol) {
  if (s + 1 > t.s_max) throw invalid("stieltjes_cross_level: needs level s + 1 in the tower");
  CrossLevelResult out;
  const int m0 = m > 0 ? m : default_quadrature_size(N, t, s);
  const int m1 = m > 0 ? m : default_quadrature_size(N, t, s + 1);
  out.coarse = stieltjes(pullback_quadrature(t, s, m0), N);
  out.fine = stieltjes(pullback_quadrature(t, s + 1, m1), N);
  const int limit = std::min(out.coarse.trusted_n, out.fine.trusted_n);
  int agreed = 0;
  for (int n = 1; n <= limit; ++n) {
    const size_t i = static_cast<size_t>(n - 1);
    Real diff = mp::abs(out.coarse.b[i] - out.fine.b[i]);
    if (i < out.coarse.a.size() && i < out.fine.a.size()) {
      diff = mp::max(diff, mp::abs(out.coarse.a[i] - out.fine.a[i]));
    }
    if (diff > tol) break;
    out.max_difference = mp::max(out.max_difference, diff);
    agreed = n;
  }
  if (agreed < out.fine.trusted_n) {
    out.fine.notes.push_back("cross-level agreement ends at n = " + std::to_string(agreed));
  }
  out.fine.trusted_n = agreed;
  return out;
}

std::pair<Real, Real> eval_monic_with_derivative(const JacobiData& j, int n, const Real& x) {
  if (n < 0 || n > j.size()) throw invalid("eval_monic: degree beyond the recurrence data");
  Real p_prev = 0, p = 1;
  Real d_prev = 0, dp = 0;
  for (int k = 0; k < n; ++k) {
    const Real& b = j.b[static_cast<size_t>(k)];
    Real a2 = k > 0 ? Real(j.a[static_cast<size_t>(k - 1)] * j.a[static_cast<size_t>(k - 1)]) : Real(0);
    Real p_next = (x - b) * p - a2 * p_prev;
    Real d_next = p + (x - b) * dp - a2 * d_prev;
    p_prev = std::move(p);
    p = std::move(p_next);
    d_prev = std::move(dp);
    dp = std::move(d_next);
  }
  return {p, dp};
}

Real eval_monic(const JacobiData& j, int n, const Real& x) { return eval_monic_with_derivative(j, n, x).first; }

namespace {

// Eigenvalues of the leading n x n Jacobi block below x.
template <class T>
int sturm_count(const std::vector<T>& b, const std::vector<T>& a2, int n, const T& x, const T& tiny) {
  int count = 0;
  T d = b[0] - x;
  for (int i = 0;; ++i) {
    if (d == 0) d = tiny;
    if (d < 0) ++count;
    if (i + 1 == n) break;
    d = b[static_cast<size_t>(i + 1)] - x - a2[static_cast<size_t>(i)] / d;
  }
  return count;
}

template <class T>
struct Bracket {
  T lo, hi;
  int clo, chi;
};

// Splits [lo, hi] until each piece holds one eigenvalue. Pieces narrower than
// `stop` that still hold several are returned in `clusters`.
template <class T>
void isolate(const std::vector<T>& b, const std::vector<T>& a2, int n, T lo, T hi, const T& tiny, const T& stop,
             std::vector<Bracket<T>>& isolated, std::vector<Bracket<T>>& clusters) {
  std::vector<Bracket<T>> stack{{lo, hi, sturm_count(b, a2, n, lo, tiny), sturm_count(b, a2, n, hi, tiny)}};
  while (!stack.empty()) {
    Bracket<T> br = std::move(stack.back());
    stack.pop_back();
    const int k = br.chi - br.clo;
    if (k <= 0) continue;
    if (k == 1) {
      isolated.push_back(std::move(br));
      continue;
    }
    if (br.hi - br.lo <= stop) {
      clusters.push_back(std::move(br));
      continue;
    }
    T mid = (br.lo + br.hi) / 2;
    int cm = sturm_count(b, a2, n, mid, tiny);
    stack.push_back({mid, br.hi, cm, br.chi});
    stack.push_back({br.lo, mid, br.clo, cm});
  }
}

std::pair<Real, Real> gershgorin(const JacobiData& j, int n) {
  Real lo = j.b[0], hi = j.b[0];
  for (int i = 0; i < n; ++i) {
    Real r = 0;
    if (i > 0) r += mp::abs(j.a[static_cast<size_t>(i - 1)]);
    if (i + 1 < n) r += mp::abs(j.a[static_cast<size_t>(i)]);
    lo = mp::min(lo, Real(j.b[static_cast<size_t>(i)] - r));
    hi = mp::max(hi, Real(j.b[static_cast<size_t>(i)] + r));
  }
  Real span = hi - lo;
  return {lo - span / 64, hi + span / 64};
}

Real polish(const JacobiData& j, int n, const Real& lo, const Real& hi) {
  auto f = [&](const Real& x) { return eval_monic_with_derivative(j, n, x); };
  Real z = detail::solve_bracketed(f, lo, hi);
  auto [p, dp] = f(z);
  const Real check = pow2(-static_cast<long>(working_precision()) / 2);
  if (dp != 0 && mp::abs(p / dp) > check * mp::max(Real(1), mp::abs(z))) {
    throw numerical("zeros: Newton residual too large at n = " + std::to_string(n));
  }
  return z;
}

void check_degree(const JacobiData& j, int n) {
  if (n < 1 || n > j.size() || (n > 1 && static_cast<int>(j.a.size()) < n - 1)) {
    throw invalid("zeros: degree beyond the recurrence data");
  }
}

}  // namespace

std::vector<Real> zeros(const JacobiData& j, int n) {
  check_degree(j, n);
  if (n == 1) return {j.b[0]};
  auto [lo, hi] = gershgorin(j, n);
  const Real scale = mp::max(mp::abs(lo), mp::abs(hi));
  const Real tiny = detail::epsilon() * detail::epsilon() * scale;
  const Real stop = detail::epsilon() * 16 * scale;

  std::vector<Real> b(j.b.begin(), j.b.begin() + n), a2;
  for (int i = 0; i + 1 < n; ++i) a2.push_back(j.a[static_cast<size_t>(i)] * j.a[static_cast<size_t>(i)]);

  // Isolate in long double, then confirm each bracket at full precision.
  std::vector<long double> bl, a2l;
  for (const auto& v : b) bl.push_back(v.convert_to<long double>());
  for (const auto& v : a2) a2l.push_back(v.convert_to<long double>());
  const long double scale_l = scale.convert_to<long double>();
  std::vector<Bracket<long double>> fast, fast_clusters;
  isolate(bl, a2l, n, lo.convert_to<long double>(), hi.convert_to<long double>(), scale_l * 1e-4000L,
          scale_l * 64 * std::numeric_limits<long double>::epsilon(), fast, fast_clusters);

  // Shrink each bracket to long double resolution so Newton starts close.
  const long double width = scale_l * 4 * std::numeric_limits<long double>::epsilon();
  for (auto& br : fast) {
    while (br.hi - br.lo > width) {
      long double mid = (br.lo + br.hi) / 2;
      if (mid <= br.lo || mid >= br.hi) break;
      int cm = sturm_count(bl, a2l, n, mid, scale_l * 1e-4000L);
      if (cm == br.clo) {
        br.lo = mid;
      } else {
        br.hi = mid;
      }
    }
    const long double pad = width;
    br.lo -= pad;
    br.hi += pad;
  }
  std::vector<Bracket<Real>> exact;
  int confirmed = 0;
  if (fast_clusters.empty()) {
    for (const auto& br : fast) {
      Real l(br.lo), h(br.hi);
      int cl = sturm_count(b, a2, n, l, tiny);
      int ch = sturm_count(b, a2, n, h, tiny);
      if (ch - cl != 1) break;
      exact.push_back({std::move(l), std::move(h), cl, ch});
      ++confirmed;
    }
  }
  std::vector<Bracket<Real>> clusters;
  if (confirmed != n) {
    exact.clear();
    isolate(b, a2, n, lo, hi, tiny, stop, exact, clusters);
  }
  std::vector<Real> out;
  for (const auto& br : clusters) {
    for (int i = 0; i < br.chi - br.clo; ++i) out.push_back((br.lo + br.hi) / 2);
  }
  for (const auto& br : exact) out.push_back(polish(j, n, br.lo, br.hi));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<Real>> zeros_up_to(const JacobiData& j, int n_max) {
  check_degree(j, n_max);
  std::vector<std::vector<Real>> all;
  for (int n = 1; n <= n_max; ++n) all.push_back(zeros(j, n));
  return all;
}

SpacingReport zero_spacing(std::vector<Real> zs, int n, const std::vector<Real>& delta,
                           const std::optional<Rational>& c) {
  if (n < 2) throw invalid("zero_spacing: n must be at least 2");
  if (static_cast<int>(zs.size()) != n) throw invalid("zero_spacing: zero count does not match n");
  SpacingReport r;
  r.n = n;
  r.zeros = std::move(zs);
  r.u_n = r.zeros[1] - r.zeros[0];
  for (size_t i = 2; i < r.zeros.size(); ++i) r.u_n = mp::min(r.u_n, Real(r.zeros[i] - r.zeros[i - 1]));
  int s = 0;
  while ((1L << s) <= n) ++s;
  r.s = s;
  r.c = c;
  const Real pi2_4 = pi() * pi() / 4;
  auto has = [&](int k) { return k >= 0 && static_cast<size_t>(k) < delta.size(); };
  if (has(s + 2)) {
    r.general_lower = delta[static_cast<size_t>(s + 2)];
    if (r.u_n < *r.general_lower) {
      r.ok = false;
      r.notes.push_back("U_n below delta_{s+2}");
    }
  } else {
    r.notes.push_back("lower general bound skipped (delta_{s+2} not built)");
  }
  if (s >= 3 && has(s - 2)) {
    r.general_upper = pi2_4 * delta[static_cast<size_t>(s - 2)];
    if (r.u_n > *r.general_upper) {
      r.ok = false;
      r.notes.push_back("U_n above pi^2/4 delta_{s-2}");
    }
  } else {
    r.notes.push_back("upper general bound skipped");
  }
  if (c) {
    if (*c <= 0) throw invalid("zero_spacing: c must be positive");
    if (has(s)) {
      Real cr = to_real(*c);
      r.c_lower = cr * cr * delta[static_cast<size_t>(s)];
      r.c_upper = pi2_4 / (cr * cr) * delta[static_cast<size_t>(s)];
      if (r.u_n < *r.c_lower) {
        r.ok = false;
        r.notes.push_back("U_n below c^2 delta_s");
      }
      if (r.u_n > *r.c_upper) {
        r.ok = false;
        r.notes.push_back("U_n above pi^2/(4c^2) delta_s");
      }
    } else {
      r.notes.push_back("c bounds skipped (delta_s not built)");
    }
  }
  r.verdict = r.ok ? "within bounds" : "violation";
  return r;
}

SpacingReport zero_spacing(const JacobiData& j, int n, const std::vector<Real>& delta,
                           const std::optional<Rational>& c) {
  if (n < 2) throw invalid("zero_spacing: n must be at least 2");
  return zero_spacing(zeros(j, n), n, delta, c);
}

WidomHilbertSeries widom_hilbert(const JacobiData& j, const Real& cap, bool equilibrium_source) {
  if (cap <= 0) throw invalid("widom_hilbert: capacity must be positive");
  WidomHilbertSeries w;
  w.cap = cap;
  w.equilibrium_source = equilibrium_source;
  const int n_max = std::min<int>(j.trusted_n, static_cast<int>(j.a.size()));
  const Real log_cap = mp::log(cap);
  Real log_norm = 0;
  for (int n = 1; n <= n_max; ++n) {
    log_norm += mp::log(j.a[static_cast<size_t>(n - 1)]);
    Real lw = log_norm - n * log_cap;
    w.w2.push_back(mp::exp(lw));
    w.root.push_back(mp::exp(lw / n));
  }
  if (w.w2.empty()) {
    w.notes.emplace_back("no trusted coefficients");
    return w;
  }
  w.inf_w2 = *std::min_element(w.w2.begin(), w.w2.end());
  w.inf_sqrt_w2 = mp::sqrt(w.inf_w2);
  const size_t start = w.w2.size() / 2;
  w.window_liminf = *std::min_element(w.w2.begin() + static_cast<long>(start), w.w2.end());
  w.window_limsup = *std::max_element(w.w2.begin() + static_cast<long>(start), w.w2.end());
  w.below_one = w.inf_w2 < 1;
  if (w.below_one && equilibrium_source) w.notes.emplace_back("W_n^2 < 1 for an equilibrium source");
  return w;
}

}  // namespace cantorlab
