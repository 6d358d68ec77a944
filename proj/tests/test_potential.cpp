#include <doctest.h>

#include <cmath>
#include <memory>

#include "cantorlab/potential.hpp"
#include "test_util.hpp"

using namespace cantorlab;
using testutil::d;

namespace {

namespace mp = boost::multiprecision;

PotentialContext k_context(const GammaSpec& spec, int s_max, TowerVariant v = TowerVariant::kKGamma) {
  return make_potential_context(std::make_shared<const GammaTower>(build_tower(spec, v, s_max, 256)));
}

Real acosh_oracle(const Real& x) { return mp::log(x + mp::sqrt(x * x - 1)); }

}  // namespace

TEST_CASE("capacity: first level and limit") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 30);
  CHECK(testutil::close(capacity(ctx, 1), mp::sqrt(Real(1) / 32), Real("1e-70")));
  CHECK(testutil::close(capacity(ctx, 0), Real("0.5"), Real("1e-70")));
  CHECK(testutil::close(capacity_limit(ctx), Real("0.125"), Real("1e-70")));
  CHECK_FALSE(ctx.polar);
  for (int s = 1; s <= 30; ++s) CHECK(capacity(ctx, s) <= capacity(ctx, s - 1));
  CHECK(mp::abs(capacity(ctx, 30) - Real("0.125")) < Real("1e-9"));

  auto interval = make_potential_context(std::make_shared<const GammaTower>(interval_tower(256)));
  CHECK(capacity_limit(interval) == Real("0.5"));
  CHECK(interval.limit_is_finite_level);
}

TEST_CASE("capacity: pullback agrees with product form") {
  PrecisionGuard guard(256);
  const Real slack = pow2(-128);
  std::vector<GammaSpec> specs{GammaSpec::constant(Rational(1, 8)),
                               GammaSpec::periodic({Rational(1, 5), Rational(1, 40), Rational(3, 16)}),
                               GammaSpec::formula(GammaFamily::kReciprocal, Rational(1, 5), Rational(1))};
  for (const auto& spec : specs) {
    for (auto v : {TowerVariant::kKGamma, TowerVariant::kK1Gamma}) {
      auto ctx = k_context(spec, 24, v);
      for (int s = 0; s <= 24; ++s) {
        CHECK(mp::abs(capacity(ctx, s) - capacity_product_form(*ctx.tower, s)) <= slack);
      }
    }
  }
}

TEST_CASE("capacity: K1 limit and polar flag") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 40, TowerVariant::kK1Gamma);
  CHECK(testutil::close(capacity_limit(ctx), Real("0.25"), Real("1e-70")));
  CHECK(mp::abs(capacity(ctx, 40) - Real("0.25")) < Real("1e-10"));

  auto polar = k_context(GammaSpec::formula(GammaFamily::kDoubleExponential, Rational(1, 5), Rational(1, 2)), 4);
  CHECK(polar.polar);
  CHECK(capacity_limit(polar) == 0);
}

TEST_CASE("green: closed forms") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 1);
  CHECK(testutil::close(green_level(ctx, 1, Complex(Real("0.5"))), acosh_oracle(Real(3)) / 2, Real("1e-70")));
  CHECK(d(green_level(ctx, 1, Complex(Real("0.5")))) == doctest::Approx(0.88137359).epsilon(1e-8));

  auto interval = make_potential_context(std::make_shared<const GammaTower>(interval_tower(256)));
  auto g2 = green(interval, Complex(Real(2)));
  CHECK(g2.converged);
  CHECK(std::abs(d(g2.value) - 1.31695790) <= 1e-8);
  CHECK(testutil::close(green(interval, Complex(Real("1.02"))).value, acosh_oracle(Real("1.02")), Real("1e-70")));
  CHECK(green(interval, Complex(Real("0.3"))).value == 0);

  // Off-axis: g(iy) = asinh(y) on [-1, 1].
  Real y("0.25");
  CHECK(testutil::close(green(interval, Complex(Real(0), y)).value, mp::log(y + mp::sqrt(y * y + 1)), Real("1e-70")));
}

TEST_CASE("green: matches exact composition at rational points") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::periodic({Rational(1, 8), Rational(1, 6)}), 4);
  testutil::QPoly F{Rational(0), Rational(1)};
  for (int s = 1; s <= 4; ++s) {
    const Stage& st = ctx.tower->stage(s);
    F = testutil::compose(st.exact_coeffs, F);
    for (Rational x : {Rational(11, 10), Rational(-1, 20), Rational(1, 2), Rational(3, 7)}) {
      Rational v = testutil::eval(F, x);
      Real w = mp::abs(to_real(v));
      if (w <= 1) continue;
      Real expected = acosh_oracle(w) / Real(1 << s);
      CHECK(testutil::close(green_level(ctx, s, Complex(to_real(x))), expected, pow2(-200)));
    }
  }
}

TEST_CASE("green: monotone in level, vanishes on the set, survives overflow") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 40);
  const Real slack = pow2(-128);
  for (int i = 0; i < 25; ++i) {
    Complex z(Real(-1) + Real(i) / 10, Real(i % 3) / 50);
    Real prev = green_level(ctx, 0, z);
    for (int s = 1; s <= 40; ++s) {
      Real g = green_level(ctx, s, z);
      CHECK(g >= prev - slack);
      prev = g;
    }
  }
  CHECK(green(ctx, Complex(Real(0))).value == 0);
  CHECK(green(ctx, Complex(Real(1))).value == 0);
  auto far = green(ctx, Complex(Real(1000), Real(5)));
  CHECK(far.converged);
  CHECK(mp::isfinite(far.value));
  // Far away, g = log|z| - log Cap + o(1).
  CHECK(std::abs(d(far.value) - std::log(std::hypot(1000.0, 5.0)) - std::log(8.0)) < 1e-3);
}

TEST_CASE("green_modulus: interval exponents") {
  PrecisionGuard guard(256);
  auto interval = make_potential_context(std::make_shared<const GammaTower>(interval_tower(256)));
  ModulusOptions opt;
  for (int j = 4; j <= 12; ++j) opt.deltas.push_back(pow2(-j));
  opt.placement = ShellPlacement::kRealAxis;
  auto endpoint = green_modulus(interval, opt);
  CHECK(d(endpoint.alpha_fit) == doctest::Approx(0.5).epsilon(0.1));
  opt.placement = ShellPlacement::kOffAxis;
  auto interior = green_modulus(interval, opt);
  CHECK(d(interior.alpha_min_fit) == doctest::Approx(1.0).epsilon(0.05));
  for (const auto& row : endpoint.rows) CHECK(row.omega_max >= row.omega_min);
}

TEST_CASE("green_modulus: Cantor set rows are monotone and resolution is enforced") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 40);
  ModulusOptions opt;
  for (int j = 4; j <= 12; ++j) opt.deltas.push_back(pow2(-j));
  auto report = green_modulus(ctx, opt);
  CHECK(report.geometry_level == 10);
  for (size_t i = 1; i < report.rows.size(); ++i) {
    CHECK(report.rows[i].omega_max <= report.rows[i - 1].omega_max);
    CHECK(report.rows[i].omega_min > 0);
  }
  CHECK(report.c1_fit > 0);
  CHECK(report.c2_fit >= report.c1_fit);

  opt.geometry_level = 1;
  auto coarse = green_modulus(ctx, opt);
  CHECK_FALSE(coarse.warnings.empty());
  CHECK(coarse.rows.back().skipped);

  opt.deltas = {Real("0.1"), Real("0.2")};
  CHECK_THROWS_AS(green_modulus(ctx, opt), LabError);
}

TEST_CASE("equilibrium_cdf: gap values") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 12);
  auto half = equilibrium_cdf(ctx, Real("0.5"));
  CHECK(half.mass == Rational(1, 2));
  CHECK(half.level == 1);
  CHECK(equilibrium_cdf(ctx, Real("-0.3")).mass == 0);
  CHECK(equilibrium_cdf(ctx, Real("-2")).mass == 0);
  CHECK(equilibrium_cdf(ctx, Real("1.5")).mass == 1);

  auto k2 = level_set(*ctx.tower, 2);
  REQUIRE(k2.size() == 4);
  Real gap = (k2.intervals[0].second + k2.intervals[1].first) / 2;
  auto quarter = equilibrium_cdf(ctx, gap);
  CHECK(quarter.mass == Rational(1, 4));
  CHECK(quarter.level == 2);
  Real gap3 = (k2.intervals[2].second + k2.intervals[3].first) / 2;
  CHECK(equilibrium_cdf(ctx, gap3).mass == Rational(3, 4));

  CHECK_THROWS_WITH_AS(equilibrium_cdf(ctx, Real(0)), doctest::Contains("not separated"), LabError);
}

TEST_CASE("equilibrium_cdf: counts components left of every gap") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::periodic({Rational(1, 7), Rational(1, 5)}), 8);
  for (auto v : {TowerVariant::kKGamma, TowerVariant::kK1Gamma}) {
    auto c = k_context(GammaSpec::periodic({Rational(1, 7), Rational(1, 5)}), 8, v);
    for (int s = 1; s <= 6; ++s) {
      auto set = level_set(*c.tower, s);
      for (size_t i = 0; i + 1 < set.size(); ++i) {
        Real gap = (set.intervals[i].second + set.intervals[i + 1].first) / 2;
        auto value = equilibrium_cdf(c, gap);
        CHECK(value.level <= s);
        CHECK(value.mass == Rational(static_cast<long>(i + 1), static_cast<long>(set.size())));
      }
    }
  }
}

TEST_CASE("pw_sum: first level and monotonicity") {
  PrecisionGuard guard(256);
  auto ctx = k_context(GammaSpec::constant(Rational(1, 8)), 8);
  auto report = pw_sum(ctx, 6);
  REQUIRE(report.levels.size() == 6);
  CHECK(report.levels[0].critical_points == 1);
  CHECK(d(report.levels[0].partial_sum) == doctest::Approx(0.88137359).epsilon(1e-8));
  for (size_t k = 1; k < report.levels.size(); ++k) {
    CHECK(report.levels[k].critical_points == (2 << k) - 1);
    CHECK(report.levels[k].partial_sum >= report.levels[k - 1].partial_sum);
  }

  auto interval = make_potential_context(std::make_shared<const GammaTower>(interval_tower(256)));
  CHECK(pw_sum(interval, 0).sum == 0);
}
