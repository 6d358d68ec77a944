#include "cantorlab/extremal.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include "numeric.hpp"

namespace cantorlab {

namespace mp = boost::multiprecision;

namespace {

using MatR = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
using VecR = Eigen::Matrix<Real, Eigen::Dynamic, 1>;
using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VecL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Chebyshev polynomials of the interval [lo, hi] in the variable
// t = alpha x + beta.
struct Basis {
  Real alpha, beta;
  int n;

  Basis(const Real& lo, const Real& hi, int degree) : alpha(2 / (hi - lo)), beta(-(lo + hi) / (hi - lo)), n(degree) {}

  void values(const Real& x, std::vector<Real>& out) const {
    out.resize(static_cast<size_t>(n) + 1);
    Real t = alpha * x + beta;
    out[0] = 1;
    if (n >= 1) out[1] = t;
    for (int k = 1; k < n; ++k) out[static_cast<size_t>(k + 1)] = 2 * t * out[static_cast<size_t>(k)] - out[static_cast<size_t>(k - 1)];
  }

  // d/dx of each basis polynomial.
  void derivatives(const Real& x, std::vector<Real>& out) const {
    std::vector<Real> v;
    values(x, v);
    out.assign(static_cast<size_t>(n) + 1, Real(0));
    Real t = alpha * x + beta;
    if (n >= 1) out[1] = 1;
    for (int k = 1; k < n; ++k) {
      out[static_cast<size_t>(k + 1)] = 2 * v[static_cast<size_t>(k)] + 2 * t * out[static_cast<size_t>(k)] - out[static_cast<size_t>(k - 1)];
    }
    for (auto& d : out) d *= alpha;
  }

  /// Value, first and second x-derivatives of sum c_k T_k.
  std::array<Real, 3> eval(const VecR& c, const Real& x) const {
    Real t = alpha * x + beta;
    Real v0 = 1, v1 = t, d0 = 0, d1 = 1, s0 = 0, s1 = 0;
    Real v = c(0) * v0, dv = 0, sv = 0;
    if (n >= 1) {
      v += c(1) * v1;
      dv += c(1) * d1;
    }
    for (int k = 1; k < n; ++k) {
      Real v2 = 2 * t * v1 - v0;
      Real d2 = 2 * v1 + 2 * t * d1 - d0;
      Real s2 = 4 * d1 + 2 * t * s1 - s0;
      v += c(k + 1) * v2;
      dv += c(k + 1) * d2;
      sv += c(k + 1) * s2;
      v0 = std::move(v1);
      v1 = std::move(v2);
      d0 = std::move(d1);
      d1 = std::move(d2);
      s0 = std::move(s1);
      s1 = std::move(s2);
    }
    return {v, alpha * dv, alpha * alpha * sv};
  }

  std::vector<Real> to_monomial(const std::vector<Real>& c) const {
    std::vector<Real> result(static_cast<size_t>(n) + 1, Real(0));
    std::vector<Real> prev{Real(1)}, cur{beta, alpha};
    auto add = [&](const std::vector<Real>& poly, const Real& coef) {
      for (size_t i = 0; i < poly.size(); ++i) result[i] += coef * poly[i];
    };
    add(prev, c[0]);
    if (n >= 1) add(cur, c[1]);
    for (int k = 1; k < n; ++k) {
      std::vector<Real> next(cur.size() + 1, Real(0));
      for (size_t i = 0; i < cur.size(); ++i) {
        next[i] += 2 * beta * cur[i];
        next[i + 1] += 2 * alpha * cur[i];
      }
      for (size_t i = 0; i < prev.size(); ++i) next[i] -= prev[i];
      add(next, c[static_cast<size_t>(k + 1)]);
      prev = std::move(cur);
      cur = std::move(next);
    }
    return result;
  }
};

int sign_of(const Real& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

struct RemezRun {
  ExtremalReport report;
  bool converged = false;
};

// Single-point exchange on a sorted reference with known error signs.
template <class Pos>
void exchange(std::vector<Pos>& ref, const std::vector<int>& sigma, const Pos& x, int s_new) {
  const size_t m = ref.size();
  const size_t p = static_cast<size_t>(std::upper_bound(ref.begin(), ref.end(), x) - ref.begin());
  if (p == 0) {
    if (s_new == sigma[0]) {
      ref[0] = x;
    } else {
      ref.insert(ref.begin(), x);
      ref.pop_back();
    }
  } else if (p == m) {
    if (s_new == sigma[m - 1]) {
      ref[m - 1] = x;
    } else {
      ref.push_back(x);
      ref.erase(ref.begin());
    }
  } else if (s_new == sigma[p - 1]) {
    ref[p - 1] = x;
  } else {
    ref[p] = x;
  }
}

struct Levelled {
  VecR coef;
  Real h;
};

Levelled solve_reference(const std::vector<std::vector<Real>>& rows, const Real& lambda, int n) {
  const Eigen::Index m = n + 1;
  MatR sys(m, m);
  VecR rhs(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = rows[static_cast<size_t>(i)];
    for (Eigen::Index c = 0; c + 1 < m; ++c) sys(i, c) = row[static_cast<size_t>(c)];
    sys(i, m - 1) = (i % 2) ? Real(1) : Real(-1);
    rhs(i) = -lambda * row[static_cast<size_t>(n)];
  }
  VecR sol = sys.partialPivLu().solve(rhs);
  Levelled out{VecR(m), sol(m - 1)};
  for (Eigen::Index c = 0; c + 1 < m; ++c) out.coef(c) = sol(c);
  out.coef(n) = lambda;
  return out;
}

// Continuous exchange started from a converged grid reference: extrema are
// moved off the grid by Newton steps on e'.
bool continuous_phase(const IntervalUnion& k, const Basis& basis, const std::vector<Real>& grid, const MatR& values,
                      const Real& lambda, std::vector<Real> xs, ExtremalReport& rep, VecR& coef_out, int max_iter) {
  const int n = basis.n;
  const size_t m = xs.size();
  const Real tol("1e-14");
  auto component = [&](const Real& x) {
    for (const auto& iv : k.intervals)
      if (x >= iv.first && x <= iv.second) return iv;
    return k.intervals.front();
  };
  for (int it = 0; it < max_iter; ++it) {
    std::vector<std::vector<Real>> rows(m);
    for (size_t i = 0; i < m; ++i) basis.values(xs[i], rows[i]);
    Levelled lv = solve_reference(rows, lambda, n);
    if (lv.h == 0) return false;
    std::vector<int> sigma(m);
    for (size_t i = 0; i < m; ++i) sigma[i] = sign_of(basis.eval(lv.coef, xs[i])[0]);

    std::vector<Real> moved = xs;
    Real norm = 0;
    for (size_t i = 0; i < m; ++i) {
      const auto [l, r] = component(xs[i]);
      const auto j = std::lower_bound(grid.begin(), grid.end(), xs[i]) - grid.begin();
      Real a = grid[static_cast<size_t>(std::max<std::ptrdiff_t>(j - 2, 0))];
      Real b = grid[static_cast<size_t>(std::min<std::ptrdiff_t>(j + 1, static_cast<std::ptrdiff_t>(grid.size()) - 1))];
      a = mp::max(a, l);
      b = mp::min(b, r);
      if (i > 0) a = mp::max(a, Real((xs[i - 1] + xs[i]) / 2));
      if (i + 1 < m) b = mp::min(b, Real((xs[i] + xs[i + 1]) / 2));
      const int sg = sigma[i];
      auto value = [&](const Real& x) { return Real(sg * basis.eval(lv.coef, x)[0]); };
      Real best_x = xs[i], best = value(xs[i]);
      auto consider = [&](const Real& x) {
        Real v = value(x);
        if (v > best) {
          best = v;
          best_x = x;
        }
      };
      consider(a);
      consider(b);
      if (a < b && sg * basis.eval(lv.coef, a)[1] > 0 && sg * basis.eval(lv.coef, b)[1] < 0) {
        auto df = [&](const Real& x) {
          auto e = basis.eval(lv.coef, x);
          return std::pair<Real, Real>(e[1], e[2]);
        };
        consider(detail::solve_bracketed(df, a, b));
      }
      moved[i] = best_x;
      norm = mp::max(norm, best);
    }
    for (size_t i = 1; i < m; ++i)
      if (!(moved[i - 1] < moved[i])) return false;

    // A grid point may still beat every polished extremum.
    VecR err = values * lv.coef;
    Eigen::Index worst = 0;
    Real grid_max = 0;
    for (Eigen::Index g = 0; g < err.size(); ++g) {
      Real e = mp::abs(err(g));
      if (e > grid_max) {
        grid_max = e;
        worst = g;
      }
    }
    xs = std::move(moved);
    if (grid_max > norm * (1 + tol)) {
      std::vector<int> sig(m);
      for (size_t i = 0; i < m; ++i) sig[i] = sign_of(basis.eval(lv.coef, xs[i])[0]);
      exchange(xs, sig, grid[static_cast<size_t>(worst)], sign_of(err(worst)));
      norm = grid_max;
    }
    ++rep.iterations;
    if (norm <= mp::abs(lv.h) * (1 + tol)) {
      rep.norm = norm;
      rep.equioscillation.clear();
      for (size_t i = 0; i < m; ++i) {
        auto e = basis.eval(lv.coef, xs[i])[0];
        if (mp::abs(e) >= norm * (1 - Real("1e-8"))) rep.equioscillation.push_back({xs[i], sign_of(e)});
      }
      int alternation = rep.equioscillation.empty() ? 0 : 1;
      for (size_t i = 1; i < rep.equioscillation.size(); ++i)
        if (rep.equioscillation[i].sign == -rep.equioscillation[i - 1].sign) ++alternation;
      rep.alternation = alternation;
      coef_out = lv.coef;
      return true;
    }
  }
  return false;
}

// Chebyshev-distributed positions along the total length of K, snapped to
// distinct grid indices.
std::vector<size_t> initial_reference(const IntervalUnion& k, const std::vector<Real>& grid, int n) {
  const size_t G = grid.size();
  std::vector<Real> cumulative(G, Real(0));
  for (size_t g = 1; g < G; ++g) {
    cumulative[g] = cumulative[g - 1];
    if (k.contains((grid[g] + grid[g - 1]) / 2)) cumulative[g] += grid[g] - grid[g - 1];
  }
  const Real total = cumulative.back();
  std::vector<size_t> ref;
  for (int i = 0; i <= n; ++i) {
    Real target = total * (1 - mp::cos(pi() * i / n)) / 2;
    size_t g = static_cast<size_t>(std::lower_bound(cumulative.begin(), cumulative.end(), target) - cumulative.begin());
    g = std::min(g, G - 1);
    if (!ref.empty() && g <= ref.back()) g = ref.back() + 1;
    ref.push_back(g);
  }
  for (size_t i = ref.size(); i-- > 0;) {
    const size_t limit = G - (ref.size() - i);
    if (ref[i] > limit) ref[i] = limit;
    if (i + 1 < ref.size() && ref[i] >= ref[i + 1]) ref[i] = ref[i + 1] - 1;
  }

  return ref;
}

RemezRun remez_on_grid(const IntervalUnion& k, const std::vector<Real>& grid, int n, int max_iter, bool polish) {
  const Real lo = k.intervals.front().first;
  const Real hi = k.intervals.back().second;
  Basis basis(lo, hi, n);
  const size_t G = grid.size();
  const size_t m = static_cast<size_t>(n) + 1;
  MatR values(static_cast<Eigen::Index>(G), static_cast<Eigen::Index>(m));
  std::vector<Real> row;
  for (size_t g = 0; g < G; ++g) {
    basis.values(grid[g], row);
    for (size_t c = 0; c < m; ++c) values(static_cast<Eigen::Index>(g), static_cast<Eigen::Index>(c)) = row[c];
  }
  // Leading factor that makes lambda T_n monic in x.
  const Real lambda = mp::pow((hi - lo) / 2, n) * pow2(1 - n);

  std::vector<size_t> ref = initial_reference(k, grid, n);

  RemezRun run;
  ExtremalReport& rep = run.report;
  rep.degree = n;
  rep.grid_size = static_cast<int>(G);
  VecR coef(static_cast<Eigen::Index>(m));
  VecR err(static_cast<Eigen::Index>(G));
  Real h = 0;
  const Real tol("1e-14");
  int it = 0;
  for (; it < max_iter; ++it) {
    MatR sys(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    VecR rhs(static_cast<Eigen::Index>(m));
    for (size_t i = 0; i < m; ++i) {
      const auto gi = static_cast<Eigen::Index>(ref[i]);
      for (size_t c = 0; c + 1 < m; ++c) sys(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = values(gi, static_cast<Eigen::Index>(c));
      sys(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m - 1)) = (i % 2) ? Real(1) : Real(-1);
      rhs(static_cast<Eigen::Index>(i)) = -lambda * values(gi, static_cast<Eigen::Index>(n));
    }
    VecR sol = sys.partialPivLu().solve(rhs);
    h = sol(static_cast<Eigen::Index>(m - 1));
    for (size_t c = 0; c + 1 < m; ++c) coef(static_cast<Eigen::Index>(c)) = sol(static_cast<Eigen::Index>(c));
    coef(static_cast<Eigen::Index>(n)) = lambda;
    err = values * coef;
    Eigen::Index best = 0;
    Real norm = 0;
    for (Eigen::Index g = 0; g < static_cast<Eigen::Index>(G); ++g) {
      Real a = mp::abs(err(g));
      if (a > norm) {
        norm = a;
        best = g;
      }
    }
    rep.norm = norm;
    if (norm <= mp::abs(h) * (1 + tol)) {
      run.converged = true;
      break;
    }
    const size_t gs = static_cast<size_t>(best);
    const int s_new = sign_of(err(best));
    auto sigma = [&](size_t i) { return sign_of(err(static_cast<Eigen::Index>(ref[i]))); };
    const size_t p = static_cast<size_t>(std::upper_bound(ref.begin(), ref.end(), gs) - ref.begin());
    if (p == 0) {
      if (s_new == sigma(0)) {
        ref[0] = gs;
      } else {
        ref.insert(ref.begin(), gs);
        ref.pop_back();
      }
    } else if (p == m) {
      if (s_new == sigma(m - 1)) {
        ref[m - 1] = gs;
      } else {
        ref.push_back(gs);
        ref.erase(ref.begin());
      }
    } else if (s_new == sigma(p - 1)) {
      ref[p - 1] = gs;
    } else {
      ref[p] = gs;
    }
  }
  rep.iterations = it + (run.converged ? 1 : 0);
  if (!run.converged) rep.notes.push_back("exchange did not converge; best-so-far returned");

  // Alternation over the grid.
  const Real level = rep.norm * (1 - Real("1e-8"));
  int last_sign = 0;
  for (size_t g = 0; g < G; ++g) {
    const Real& e = err(static_cast<Eigen::Index>(g));
    if (mp::abs(e) < level) continue;
    const int s = sign_of(e);
    if (s != last_sign) {
      rep.equioscillation.push_back({grid[g], s});
      last_sign = s;
    }
  }
  rep.alternation = static_cast<int>(rep.equioscillation.size());
  if (polish && run.converged) {
    std::vector<Real> xs;
    for (size_t i : ref) xs.push_back(grid[i]);
    VecR polished;
    if (continuous_phase(k, basis, grid, values, lambda, xs, rep, polished, max_iter)) {
      coef = polished;
    } else {
      rep.notes.push_back("continuous exchange failed; grid optimum returned");
    }
  }
  rep.chebyshev.resize(m);
  for (size_t c = 0; c < m; ++c) rep.chebyshev[c] = coef(static_cast<Eigen::Index>(c));
  rep.monomial = basis.to_monomial(rep.chebyshev);
  return run;
}

}  // namespace

std::vector<Real> chebyshev_grid(const IntervalUnion& k, int density) {
  if (density < 2) throw invalid("grid density must be at least 2");
  std::vector<Real> grid;
  const Real p = pi();
  for (const auto& [l, r] : k.intervals) {
    for (int i = 0; i < density; ++i) {
      grid.push_back(l + (r - l) * (1 - mp::cos(p * i / (density - 1))) / 2);
    }
  }
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

ExtremalReport remez(const IntervalUnion& k, int n, int grid_density, const RemezOptions& options) {
  if (n < 1) throw invalid("remez: degree must be at least 1");
  if (n > 64) throw invalid("remez: degree above 64; use the closed form at dyadic degrees");
  if (k.size() == 0) throw invalid("remez: empty set");
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : 100 * (n + 1);
  auto grid = chebyshev_grid(k, grid_density);
  if (grid.size() < static_cast<size_t>(n) + 1) throw invalid("remez: grid has fewer than n + 1 points");
  RemezRun run = remez_on_grid(k, grid, n, max_iter, options.polish);
  ExtremalReport rep = std::move(run.report);
  rep.grid_density = grid_density;
  bool stable = true;
  if (options.refine) {
    RemezRun fine = remez_on_grid(k, chebyshev_grid(k, 2 * grid_density), n, max_iter, options.polish);
    rep.refinement_change = mp::abs(fine.report.norm - rep.norm) / rep.norm;
    stable = fine.converged && rep.refinement_change < Real("1e-8");
    if (!stable) rep.notes.push_back("norm moved by " + to_decimal(rep.refinement_change, 4) + " at doubled density");
  }
  rep.certified = run.converged && rep.alternation >= n + 1 && stable;
  if (rep.alternation < n + 1) rep.notes.push_back("alternation count below n + 1");
  return rep;
}

Real dyadic_chebyshev_norm(const GammaTower& t, int s) {
  if (s < 0 || s > t.s_max) throw invalid("dyadic_chebyshev_norm: level outside built range");
  return 1 / mp::abs(t.leading[static_cast<size_t>(s)]);
}

WidomSeries widom_factors(const IntervalUnion& k, const Real& cap, const std::vector<int>& n_list, int grid_density) {
  if (cap <= 0) throw invalid("widom_factors: capacity must be positive");
  std::vector<ExtremalReport> reports;
  for (int n : n_list) reports.push_back(remez(k, n, grid_density));
  return widom_series(reports, cap);
}

WidomSeries widom_series(const std::vector<ExtremalReport>& reports, const Real& cap) {
  if (cap <= 0) throw invalid("widom_factors: capacity must be positive");
  WidomSeries out;
  out.cap = cap;
  const Real log_cap = mp::log(cap);
  for (const auto& rep : reports) {
    const int n = rep.degree;
    WidomRow row;
    row.n = n;
    row.norm = rep.norm;
    row.w = mp::exp(mp::log(rep.norm) - n * log_cap);
    row.certified = rep.certified;
    if (!rep.certified) out.notes.push_back("W_" + std::to_string(n) + " uncertified");
    out.max_w = out.rows.empty() ? row.w : mp::max(out.max_w, row.w);
    if (row.w < 1) out.below_one = true;
    out.rows.push_back(std::move(row));
  }
  if (out.rows.size() >= 2) {
    Real mx = 0, my = 0;
    for (const auto& r : out.rows) {
      mx += r.n;
      my += r.w;
    }
    mx /= out.rows.size();
    my /= out.rows.size();
    Real sxy = 0, sxx = 0;
    for (const auto& r : out.rows) {
      sxy += (r.n - mx) * (r.w - my);
      sxx += (r.n - mx) * (r.n - mx);
    }
    if (sxx > 0) out.trend = sxy / sxx;
  }
  if (out.below_one) out.notes.emplace_back("some W_n below 1");
  return out;
}

// ---------------------------------------------------------------------------
// Markov factor

namespace {

// max c^T u subject to |A u| <= 1 by the dual simplex method. A basis is m
// rows with multipliers lambda = A_B^{-T} c; taking sigma = sign(lambda)
// keeps it dual feasible, so sum |lambda| is an upper bound at every step.
// The most violated row enters; the leaving row comes from a long-step
// ratio test. The basis is kept between calls.
class GridLp {
 public:
  GridLp(MatL a, std::vector<Eigen::Index> start) : a_(std::move(a)), m_(a_.cols()), g_(a_.rows()), basis_(std::move(start)) {
    refresh();
  }

  long pivots() const { return pivots_; }
  const std::vector<Eigen::Index>& basis() const { return basis_; }
  const std::vector<int>& signs() const { return sign_; }

  long double solve(const VecL& c) {
    const long double tol = 1e-12L;
    const long max_pivots = 20 * static_cast<long>(g_) + 1000;
    long double best = std::numeric_limits<long double>::infinity();
    int stalled = 0;
    std::vector<bool> in_basis(static_cast<size_t>(g_), false);
    for (auto b : basis_) in_basis[static_cast<size_t>(b)] = true;
    for (long it = 0;; ++it) {
      VecL lam = inv_.transpose() * c;
      VecL sig(m_);
      sign_.resize(static_cast<size_t>(m_));
      for (Eigen::Index i = 0; i < m_; ++i) {
        sign_[static_cast<size_t>(i)] = lam(i) >= 0 ? 1 : -1;
        sig(i) = sign_[static_cast<size_t>(i)];
      }
      VecL au = a_ * (inv_ * sig);
      Eigen::Index enter = -1;
      long double worst = 1 + tol;
      for (Eigen::Index k = 0; k < g_; ++k) {
        if (!in_basis[static_cast<size_t>(k)] && std::abs(au(k)) > worst) {
          worst = std::abs(au(k));
          enter = k;
        }
      }
      const long double value = lam.cwiseAbs().sum();
      if (enter < 0) return value;
      // Rounding-level violations can swap rows without progress.
      if (value < best * (1 - 1e-15L)) {
        best = value;
        stalled = 0;
      } else if (++stalled > 2 * m_) {
        return value;
      }
      if (it >= max_pivots) throw numerical("markov LP: pivot limit reached");
      const int s = au(enter) > 0 ? 1 : -1;
      VecL w = inv_.transpose() * a_.row(enter).transpose();
      std::vector<std::pair<long double, Eigen::Index>> breaks;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (sig(i) * s * w(i) > 0) breaks.emplace_back(std::abs(lam(i)) / std::abs(w(i)), i);
      }
      std::sort(breaks.begin(), breaks.end());
      long double slope = 1 - worst;
      Eigen::Index leave = -1;
      for (const auto& [t, i] : breaks) {
        slope += 2 * std::abs(w(i));
        if (slope >= 0) {
          leave = i;
          break;
        }
      }
      if (leave < 0) throw internal("markov LP infeasible on a nonempty grid");
      in_basis[static_cast<size_t>(basis_[static_cast<size_t>(leave)])] = false;
      basis_[static_cast<size_t>(leave)] = enter;
      in_basis[static_cast<size_t>(enter)] = true;
      refresh();
      ++pivots_;
    }
  }

 private:
  void refresh() {
    MatL ab(m_, m_);
    for (Eigen::Index i = 0; i < m_; ++i) ab.row(i) = a_.row(basis_[static_cast<size_t>(i)]);
    inv_ = ab.partialPivLu().inverse();
  }

  MatL a_;
  Eigen::Index m_, g_;
  std::vector<Eigen::Index> basis_;
  std::vector<int> sign_;
  MatL inv_;
  long pivots_ = 0;
};

}  // namespace

MarkovReport markov_factor(const IntervalUnion& k, int n, const MarkovOptions& options) {
  if (n < 1) throw invalid("markov_factor: degree must be at least 1");
  if (n > 64) throw invalid("markov_factor: degree above 64");
  if (k.size() == 0) throw invalid("markov_factor: empty set");
  const auto grid = chebyshev_grid(k, options.grid_density);
  const Eigen::Index G = static_cast<Eigen::Index>(grid.size());
  const Eigen::Index m = n + 1;
  if (G < m) throw invalid("markov_factor: grid has fewer than n + 1 points");
  // Lagrange basis at the extremal points of T_{n,K}; rows of the constraint
  // matrix stay bounded by the Lebesgue constant however small the gaps.
  ExtremalReport cheb = remez(k, n, options.grid_density, RemezOptions{false, 0, true});
  std::vector<Real> nodes;
  std::vector<Eigen::Index> start;
  if (cheb.equioscillation.size() == static_cast<size_t>(m)) {
    // Snapped to distinct grid points: node rows are unit vectors and make
    // the starting basis.
    std::vector<size_t> idx;
    for (const auto& e : cheb.equioscillation) {
      auto it = std::lower_bound(grid.begin(), grid.end(), e.x);
      size_t j = static_cast<size_t>(it - grid.begin());
      if (j == grid.size() || (j > 0 && e.x - grid[j - 1] < grid[j] - e.x)) --j;
      if (!idx.empty() && j <= idx.back()) j = idx.back() + 1;
      idx.push_back(j);
    }
    if (idx.back() < grid.size()) {
      for (size_t j : idx) {
        nodes.push_back(grid[j]);
        start.push_back(static_cast<Eigen::Index>(j));
      }
    }
  }
  if (nodes.empty()) {
    for (size_t j : initial_reference(k, grid, n)) {
      nodes.push_back(grid[j]);
      start.push_back(static_cast<Eigen::Index>(j));
    }
  }
  std::vector<Real> bary(static_cast<size_t>(m), Real(1));
  for (Eigen::Index j = 0; j < m; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      if (i != j) bary[static_cast<size_t>(j)] *= nodes[static_cast<size_t>(j)] - nodes[static_cast<size_t>(i)];

  MatR vals(G, m), ders(G, m);
  MatL vals_l(G, m), ders_l(G, m);
  for (Eigen::Index g = 0; g < G; ++g) {
    const Real& x = grid[static_cast<size_t>(g)];
    Eigen::Index hit = -1;
    for (Eigen::Index i = 0; i < m; ++i)
      if (x == nodes[static_cast<size_t>(i)]) hit = i;
    if (hit >= 0) {
      const Real& xi = nodes[static_cast<size_t>(hit)];
      Real own = 0;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (j == hit) continue;
        const Real& xj = nodes[static_cast<size_t>(j)];
        vals(g, j) = 0;
        ders(g, j) = bary[static_cast<size_t>(hit)] / (bary[static_cast<size_t>(j)] * (xi - xj));
        own += 1 / (xi - xj);
      }
      vals(g, hit) = 1;
      ders(g, hit) = own;
    } else {
      Real node_poly = 1, inv_sum = 0;
      for (Eigen::Index i = 0; i < m; ++i) {
        node_poly *= x - nodes[static_cast<size_t>(i)];
        inv_sum += 1 / (x - nodes[static_cast<size_t>(i)]);
      }
      for (Eigen::Index j = 0; j < m; ++j) {
        const Real d = x - nodes[static_cast<size_t>(j)];
        vals(g, j) = node_poly / (d * bary[static_cast<size_t>(j)]);
        ders(g, j) = vals(g, j) * (inv_sum - 1 / d);
      }
    }
    for (Eigen::Index c = 0; c < m; ++c) {
      vals_l(g, c) = vals(g, c).convert_to<long double>();
      ders_l(g, c) = ders(g, c).convert_to<long double>();
    }
  }

  MarkovReport rep;
  rep.n = n;
  rep.grid_size = static_cast<int>(G);
  GridLp lp(vals_l, start);
  long double best_value = -1;
  std::vector<Eigen::Index> best_basis;
  std::vector<int> best_signs;
  for (Eigen::Index y = 0; y < G; ++y) {
    VecL c = ders_l.row(y).transpose();
    long double value = lp.solve(c);
    // Dual multipliers on the final active set bound |p'(y)| for every
    // feasible p, optimal basis or not.
    MatR ab(m, m);
    for (Eigen::Index i = 0; i < m; ++i) ab.row(i) = vals.row(lp.basis()[static_cast<size_t>(i)]);
    VecR lam = ab.transpose().partialPivLu().solve(VecR(ders.row(y).transpose()));
    Real bound = 0;
    for (Eigen::Index i = 0; i < m; ++i) bound += mp::abs(lam(i));
    if (y == 0 || bound > rep.upper) {
      rep.upper = bound;
      rep.argmax = grid[static_cast<size_t>(y)];
    }
    if (value > best_value) {
      best_value = value;
      best_basis = lp.basis();
      best_signs = lp.signs();
    }
  }
  rep.pivots = lp.pivots();

  auto ratio_of = [&](const VecR& coef) {
    VecR p = vals * coef;
    VecR dp = ders * coef;
    Real pn = 0, dn = 0;
    for (Eigen::Index g = 0; g < G; ++g) {
      pn = mp::max(pn, Real(mp::abs(p(g))));
      dn = mp::max(dn, Real(mp::abs(dp(g))));
    }
    return pn > 0 ? Real(dn / pn) : Real(0);
  };
  auto consider = [&](const Real& r, const std::string& name) {
    if (r > rep.lower) {
      rep.lower = r;
      rep.best_candidate = name;
    }
  };

  {
    MatR ab(m, m);
    VecR s(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      ab.row(i) = vals.row(best_basis[static_cast<size_t>(i)]);
      s(i) = best_signs[static_cast<size_t>(i)];
    }
    consider(ratio_of(ab.partialPivLu().solve(s)), "lp optimizer");
  }
  if (options.chebyshev_candidate) {
    Basis basis(k.intervals.front().first, k.intervals.back().second, n);
    VecR coef(m);
    for (Eigen::Index c = 0; c < m; ++c) coef(c) = cheb.chebyshev[static_cast<size_t>(c)];
    Real pn = 0, dn = 0;
    for (const auto& x : grid) {
      auto e = basis.eval(coef, x);
      pn = mp::max(pn, Real(mp::abs(e[0])));
      dn = mp::max(dn, Real(mp::abs(e[1])));
    }
    if (pn > 0) consider(dn / pn, "chebyshev polynomial");
  }
  if (options.tower && options.level >= 0) {
    const GammaTower& t = *options.tower;
    for (int j = 1; j <= std::min(options.level, t.s_max) && t.branch_count(j) <= n; ++j) {
      Real pn = 0, dn = 0;
      for (const auto& x : grid) {
        auto [f, df] = eval_tower_with_derivative(t, j, x);
        pn = mp::max(pn, Real(mp::abs(f)));
        dn = mp::max(dn, Real(mp::abs(df)));
      }
      if (pn > 0) consider(dn / pn, "F_" + std::to_string(j));
    }
    if (t.has_gamma()) {
      int s = 0;
      while ((1L << s) < n) ++s;
      if ((1L << s) == n && s <= t.s_max) rep.ratio = rep.upper * t.delta[static_cast<size_t>(s)] / 2;
    }
  }
  if (rep.lower > rep.upper) rep.notes.emplace_back("lower bound exceeds upper bound by rounding");
  rep.notes.emplace_back("both bounds refer to the grid operator norm");
  return rep;
}

}  // namespace cantorlab
