#include <doctest.h>

#include "cantorlab/measures.hpp"
#include "cantorlab/potential.hpp"
#include "test_util.hpp"

using namespace cantorlab;
using testutil::d;

namespace {

namespace mp = boost::multiprecision;

GammaTower eighth(int s_max) { return build_tower(GammaSpec::constant(Rational(1, 8)), TowerVariant::kKGamma, s_max, 256); }

// int t^k d(arcsine) = binom(k, k/2) / 2^k for even k.
Real arcsine_moment(int k) {
  if (k % 2) return Real(0);
  Integer b = 1;
  for (int i = 1; i <= k / 2; ++i) b = b * (k / 2 + i) / i;
  return to_real(Rational(b)) / pow2(k);
}

}  // namespace

TEST_CASE("pullback_quadrature: first level") {
  PrecisionGuard guard(256);
  auto t = eighth(3);
  auto mu = pullback_quadrature(t, 1, 2);
  REQUIRE(mu.size() == 4);
  for (const auto& w : mu.weights) CHECK(w == Real("0.25"));
  CHECK(mu.total_mass() == 1);
  const Real r = mp::sqrt(Real(2)) / 2;
  for (const auto& x : mu.nodes) {
    Real f = eval_tower(t, 1, x);
    CHECK(mp::abs(mp::abs(f) - r) < pow2(-200));
  }
  CHECK(mp::abs(moment(mu, 1) - Real("0.5")) < pow2(-200));
  // Closed form of the second moment of mu_{K_1}: (1 - gamma) / 2.
  CHECK(mp::abs(moment(mu, 2) - Real(7) / 16) < pow2(-200));
  CHECK(quadrature_cdf(mu, Real("0.5")) == Real("0.5"));
}

TEST_CASE("pullback_quadrature: exactness and symmetry") {
  PrecisionGuard guard(256);
  auto t = eighth(4);
  for (int s = 0; s <= 4; ++s) {
    const int m = 5;
    auto mu = pullback_quadrature(t, s, m);
    CHECK(static_cast<long>(mu.size()) == m * t.branch_count(s));
    CHECK(mp::abs(mu.total_mass() - 1) <= pow2(-248));
    if (s > 0) CHECK(mp::abs(moment(mu, 1) - Real("0.5")) < pow2(-190));
    for (int k = 0; k < 2 * m; ++k) {
      Real sum = 0;
      for (size_t i = 0; i < mu.size(); ++i) sum += mu.weights[i] * mp::pow(eval_tower(t, s, mu.nodes[i]), k);
      CHECK(mp::abs(sum - arcsine_moment(k)) <= pow2(-248));
    }
  }
}

TEST_CASE("pullback_quadrature: interval moments") {
  PrecisionGuard guard(256);
  auto t = interval_tower(256);
  auto mu = pullback_quadrature(t, 0, 16);
  for (int k = 0; k < 32; ++k) CHECK(mp::abs(moment(mu, k) - arcsine_moment(k)) <= pow2(-240));
}

TEST_CASE("pullback_quadrature: CDF matches branch counting at gaps") {
  PrecisionGuard guard(256);
  auto tower = std::make_shared<const GammaTower>(eighth(6));
  auto ctx = make_potential_context(tower);
  auto mu = pullback_quadrature(*tower, 6, 3);
  for (int s = 1; s <= 6; ++s) {
    auto set = level_set(*tower, s);
    for (size_t i = 0; i + 1 < set.size(); ++i) {
      Real gap = (set.intervals[i].second + set.intervals[i + 1].first) / 2;
      CHECK(mp::abs(quadrature_cdf(mu, gap) - equilibrium_cdf(ctx, gap).value) <= pow2(-240));
    }
  }
}

TEST_CASE("apply_weight and szego_integral") {
  PrecisionGuard guard(256);
  auto t = eighth(3);
  auto mu = pullback_quadrature(t, 3, 4);

  auto one = apply_weight(mu, WeightSpec::constant(Real(1)));
  auto seven = apply_weight(mu, WeightSpec::constant(Real(7)));
  for (size_t i = 0; i < mu.size(); ++i) {
    CHECK(one.weights[i] == mu.weights[i]);
    CHECK(mp::abs(seven.weights[i] - mu.weights[i]) <= pow2(-250));
  }
  CHECK(szego_integral(one, mu).value == 0);
  CHECK(mp::abs(szego_integral(apply_weight(mu, WeightSpec::constant(Real(2))), mu).value - mp::log(Real(2))) <=
        pow2(-240));

  auto left = apply_weight(mu, WeightSpec::parse("indicator:-1,0.5"));
  for (size_t i = 0; i < mu.size(); ++i) {
    if (mu.nodes[i] < Real("0.5")) {
      CHECK(mp::abs(left.weights[i] - 2 * mu.weights[i]) <= pow2(-240));
    } else {
      CHECK(left.weights[i] == 0);
    }
  }
  CHECK(mp::abs(left.total_mass() - 1) <= pow2(-240));
  CHECK(szego_integral(left, mu).minus_infinity);

  CHECK_THROWS_WITH_AS(apply_weight(mu, WeightSpec::constant(Real(0))), doctest::Contains("degenerate weight"),
                       LabError);
  CHECK_THROWS_AS(szego_integral(mu, mu), LabError);
  CHECK_THROWS_AS(WeightSpec::parse("bogus:1"), LabError);
}

TEST_CASE("add_atoms") {
  PrecisionGuard guard(256);
  auto t = eighth(2);
  auto mu = pullback_quadrature(t, 2, 2);
  auto with = add_atoms(mu, {{Real(2), Real("0.25")}});
  CHECK(with.size() == mu.size() + 1);
  CHECK(with.nodes.back() == 2);
  CHECK(with.weights.back() == Real("0.25"));
  CHECK(mp::abs(with.total_mass() - 1) <= pow2(-250));
  CHECK(std::is_sorted(with.nodes.begin(), with.nodes.end()));
  CHECK_THROWS_AS(add_atoms(mu, {{Real(2), Real(1)}}), LabError);
}

TEST_CASE("default_quadrature_size covers the requested recurrence depth") {
  auto t = eighth(5);
  CHECK(default_quadrature_size(50, interval_tower(256), 0) == 102);
  CHECK(default_quadrature_size(8, t, 5) == 2);
  CHECK(default_quadrature_size(64, t, 5) == 6);
}
