#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cantorlab/extremal.hpp"
#include "cantorlab/potential.hpp"
#include "test_util.hpp"

using namespace cantorlab;
using testutil::d;

namespace {

namespace mp = boost::multiprecision;

IntervalUnion unit_interval() {
  IntervalUnion k;
  k.intervals = {{Real(-1), Real(1)}};
  k.branches = {1};
  return k;
}

IntervalUnion two_intervals(double a, double b, double c, double e) {
  IntervalUnion k;
  k.intervals = {{Real(a), Real(b)}, {Real(c), Real(e)}};
  k.branches = {1, 1};
  return k;
}

GammaTower tower(const Rational& g, int s_max) {
  return build_tower(GammaSpec::constant(g), TowerVariant::kKGamma, s_max, 256);
}

// Discrete minimax by enumeration: on n + 1 points the least deviation of a
// monic degree-n polynomial is 1 / sum |w_i| with w_i = 1 / prod (x_i - x_j),
// and the grid optimum is the largest such value over all subsets.
double subset_minimax(const std::vector<double>& grid, int n) {
  const size_t m = static_cast<size_t>(n) + 1;
  std::vector<size_t> idx(m);
  for (size_t i = 0; i < m; ++i) idx[i] = i;
  double best = 0;
  while (true) {
    double sum = 0;
    for (size_t i = 0; i < m; ++i) {
      double prod = 1;
      for (size_t j = 0; j < m; ++j)
        if (j != i) prod *= grid[idx[i]] - grid[idx[j]];
      sum += 1 / std::abs(prod);
    }
    best = std::max(best, 1 / sum);
    size_t i = m;
    while (i-- > 0 && idx[i] == grid.size() - m + i) {}
    if (i == static_cast<size_t>(-1)) break;
    ++idx[i];
    for (size_t j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
  }
  return best;
}

}  // namespace

TEST_CASE("chebyshev_grid: endpoints and count") {
  PrecisionGuard guard(256);
  auto g = chebyshev_grid(two_intervals(-1, -0.5, 0.5, 1), 9);
  CHECK(g.size() == 18);
  CHECK(g.front() == -1);
  CHECK(g.back() == 1);
  CHECK(std::is_sorted(g.begin(), g.end()));
  CHECK_THROWS_AS(chebyshev_grid(unit_interval(), 1), LabError);
}

TEST_CASE("remez: classical norms on [-1, 1]") {
  PrecisionGuard guard(256);
  auto r1 = remez(unit_interval(), 1, 64);
  CHECK(mp::abs(r1.norm - 1) < Real("1e-12"));
  CHECK(mp::abs(r1.monomial[0]) < Real("1e-12"));
  CHECK(r1.monomial[1] == 1);
  CHECK(r1.certified);
  for (int n = 2; n <= 8; ++n) {
    auto r = remez(unit_interval(), n, 64);
    CHECK(mp::abs(r.norm - pow2(1 - n)) < Real("1e-12"));
    CHECK(r.certified);
    CHECK(r.alternation >= n + 1);
    for (size_t i = 1; i < r.equioscillation.size(); ++i)
      CHECK(r.equioscillation[i].sign == -r.equioscillation[i - 1].sign);
  }
  auto r3 = remez(unit_interval(), 3, 64);
  CHECK(mp::abs(r3.norm - Real("0.25")) < Real("1e-12"));
  CHECK(mp::abs(r3.monomial[1] + Real("0.75")) < Real("1e-12"));
  CHECK_THROWS_AS(remez(unit_interval(), 65, 64), LabError);
  CHECK_THROWS_AS(remez(unit_interval(), 0, 64), LabError);
}

TEST_CASE("remez: level one of K(1/8) gives f_1 / 16") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 1);
  auto r = remez(level_set(t, 1), 2, 64);
  CHECK(mp::abs(r.norm - Real("0.0625")) < Real("1e-12"));
  const auto& f = t.stage(1).coeffs;
  for (size_t i = 0; i < 3; ++i) CHECK(mp::abs(r.monomial[i] - f[i] / 16) < Real("1e-12"));
  CHECK(r.certified);
}

TEST_CASE("remez: closed form F_s / A_s at dyadic degrees") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 4);
  auto ctx = make_potential_context(std::make_shared<const GammaTower>(t));
  for (int s = 1; s <= 4; ++s) {
    const int n = 1 << s;
    auto k = level_set(t, s);
    auto r = remez(k, n, 32);
    CHECK(r.certified);
    const Real norm = dyadic_chebyshev_norm(t, s);
    CHECK(mp::abs(r.norm / norm - 1) < Real("1e-8"));
    // Expand F_s exactly and compare coefficientwise.
    testutil::QPoly f{Rational(0), Rational(1)};
    for (int j = 1; j <= s; ++j) {
      testutil::QPoly stage;
      for (const auto& c : t.stage(j).exact_coeffs) stage.push_back(c);
      f = testutil::compose(stage, f);
    }
    Real scale = 0;
    for (const auto& c : f) scale = mp::max(scale, Real(mp::abs(Real(c) * norm)));
    for (size_t i = 0; i < f.size(); ++i)
      CHECK(mp::abs(r.monomial[i] - Real(f[i]) * norm) <= Real("1e-8") * scale);
    auto w = widom_factors(k, capacity(ctx, s), {n}, 32);
    CHECK(mp::abs(w.rows[0].w - 2) < Real("1e-8"));
  }
}

TEST_CASE("remez: grid refinement") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 3);
  auto k = level_set(t, 3);
  for (int n : {3, 5, 6}) {
    auto coarse = remez(k, n, 16, RemezOptions{false, 0, false});
    auto fine = remez(k, n, 32, RemezOptions{false, 0, false});
    CHECK(fine.norm >= coarse.norm * (1 - Real("1e-12")));
    auto certified = remez(k, n, 64);
    CHECK(certified.refinement_change < Real("1e-8"));
  }
}

TEST_CASE("remez: subset enumeration oracle") {
  PrecisionGuard guard(256);
  std::vector<IntervalUnion> sets{unit_interval(), two_intervals(-1, -0.3, 0.2, 1), two_intervals(-1, 0.1, 0.6, 1)};
  for (const auto& k : sets) {
    for (int n = 1; n <= 3; ++n) {
      const int density = 12;
      auto r = remez(k, n, density, RemezOptions{false, 0, false});
      std::vector<double> grid;
      for (const auto& x : chebyshev_grid(k, density)) grid.push_back(d(x));
      double oracle = subset_minimax(grid, n);
      CHECK(std::abs(d(r.norm) - oracle) <= 1e-6 * oracle);
    }
  }
}

TEST_CASE("widom_factors: interval and lower bound") {
  PrecisionGuard guard(256);
  auto w = widom_factors(unit_interval(), Real("0.5"), {1, 2, 3, 4, 5, 6}, 64);
  for (const auto& row : w.rows) {
    CHECK(mp::abs(row.w - 2) < Real("1e-10"));
    CHECK(row.certified);
  }
  CHECK_FALSE(w.below_one);
  CHECK(mp::abs(w.trend) < Real("1e-10"));
  CHECK_THROWS_AS(widom_factors(unit_interval(), Real(0), {1}, 64), LabError);

  auto t = std::make_shared<const GammaTower>(tower(Rational(1, 8), 3));
  auto ctx = make_potential_context(t);
  auto cantor = widom_factors(level_set(*t, 3), capacity(ctx, 3), {1, 2, 3, 5, 7}, 32);
  CHECK_FALSE(cantor.below_one);
  CHECK(cantor.max_w >= 1);
}

TEST_CASE("markov_factor: classical values") {
  PrecisionGuard guard(256);
  auto m1 = markov_factor(unit_interval(), 1, MarkovOptions{256});
  CHECK(mp::abs(m1.upper - 1) < Real("1e-6"));
  CHECK(mp::abs(m1.lower - 1) < Real("1e-6"));
  auto m2 = markov_factor(unit_interval(), 2, MarkovOptions{256});
  CHECK(mp::abs(m2.upper / 4 - 1) < Real("0.01"));
  CHECK(mp::abs(m2.lower / 4 - 1) < Real("0.01"));
  for (int n = 3; n <= 8; ++n) {
    auto m = markov_factor(unit_interval(), n, MarkovOptions{64 * n});
    CHECK(m.lower <= m.upper * (1 + Real("1e-20")));
    CHECK(mp::abs(m.upper / (n * n) - 1) < Real("0.01"));
    CHECK(mp::abs(m.lower / (n * n) - 1) < Real("0.01"));
  }
}

TEST_CASE("markov_factor: Cantor levels and the dyadic ratio") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 32), 3);
  for (int s = 1; s <= 3; ++s) {
    MarkovOptions opt;
    opt.grid_density = 32;
    opt.tower = &t;
    opt.level = s;
    auto m = markov_factor(level_set(t, s), 1 << s, opt);
    CHECK(m.lower > 0);
    CHECK(m.lower <= m.upper * (1 + Real("1e-20")));
    REQUIRE(m.ratio.has_value());
    CHECK(*m.ratio > 0);
  }
}
