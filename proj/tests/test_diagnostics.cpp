#include <doctest.h>

#include <algorithm>

#include "cantorlab/diagnostics.hpp"
#include "cantorlab/ortho.hpp"
#include "test_util.hpp"

using namespace cantorlab;

namespace {

namespace mp = boost::multiprecision;

std::vector<Real> periodic(int n) {
  std::vector<Real> s;
  for (int i = 0; i < n; ++i) s.push_back(i % 2 ? Real("0.5") : Real("0.25"));
  return s;
}

}  // namespace

TEST_CASE("ap_profile: constant and 2-periodic sequences") {
  PrecisionGuard guard(256);
  std::vector<Real> c(40, Real("0.3"));
  auto r = ap_profile(c, 10);
  for (const auto& v : r.d) CHECK(v == 0);
  for (const auto& ks : r.almost_periods) CHECK(ks.size() == 10);

  auto p = ap_profile(periodic(40), 12);
  CHECK(p.d[0] == 0);
  for (int k = 1; k <= 12; ++k) CHECK(p.d[static_cast<size_t>(k)] == (k % 2 ? Real("0.25") : Real(0)));
  CHECK(p.almost_periods[0] == std::vector<int>{2, 4, 6, 8, 10, 12});
  REQUIRE(p.dyadic.size() == 4);
  CHECK(p.dyadic[0].d == Real("0.25"));
  CHECK(p.dyadic[3].d == 0);
  CHECK(p.dyadic_nonincreasing);

  CHECK_THROWS_AS(ap_profile({}, 0), LabError);
  CHECK_THROWS_AS(ap_profile(c, 40), LabError);
}

TEST_CASE("ap_profile: triangle inequality and monotone E on a quasiperiodic input") {
  PrecisionGuard guard(128);
  const Real theta = (mp::sqrt(Real(5)) - 1) / 2;
  std::vector<Real> s;
  for (int n = 1; n <= 400; ++n) s.push_back(mp::cos(2 * pi() * theta * n));
  auto r = ap_profile(s, 60);
  for (int k = 1; k <= 60; ++k)
    for (int j = 1; j < k; ++j)
      CHECK(r.d[static_cast<size_t>(k)] <= r.d[static_cast<size_t>(j)] + r.d[static_cast<size_t>(k - j)] + pow2(-100));
  for (size_t i = 1; i < r.eps.size(); ++i) {
    // eps grid is decreasing, so the sets shrink.
    for (int k : r.almost_periods[i])
      CHECK(std::find(r.almost_periods[i - 1].begin(), r.almost_periods[i - 1].end(), k) != r.almost_periods[i - 1].end());
  }
  // Almost periodic input: both halves see the same near-periods.
  for (int k = 1; k <= 60; ++k)
    CHECK(mp::abs(r.first_half[static_cast<size_t>(k)] - r.second_half[static_cast<size_t>(k)]) < Real("0.02"));
}

TEST_CASE("asymptotic_ap_gap: tails") {
  PrecisionGuard guard(256);
  std::vector<Real> s;
  for (int n = 1; n <= 400; ++n) s.push_back(Real("0.5") + Real(1) / n);
  auto r = asymptotic_ap_gap(s, {1, 3, 7});
  for (const auto& c : r.curves) {
    for (size_t i = 1; i < c.sup.size(); ++i) CHECK(c.sup[i] <= c.sup[i - 1]);
    CHECK(c.sup.back() < Real("1e-3"));
    CHECK(c.sup.front() == mp::abs(s[static_cast<size_t>(c.k)] - s[0]));
  }
  auto p = asymptotic_ap_gap(periodic(40), {2});
  for (const auto& v : p.curves[0].sup) CHECK(v == 0);
  CHECK_THROWS_AS(asymptotic_ap_gap(periodic(40), {11}), LabError);
}

TEST_CASE("ap_profile: tower coefficients give a dyadic trace") {
  PrecisionGuard guard(256);
  auto t = build_tower(GammaSpec::constant(Rational(1, 8)), TowerVariant::kKGamma, 7, 256);
  auto j = stieltjes(pullback_quadrature(t, 7, 2), 64);
  std::vector<Real> a(j.a.begin(), j.a.begin() + j.trusted_n - 1);
  auto r = ap_profile(a, 32);
  CHECK(r.dyadic.size() == 6);
  for (const auto& p : r.dyadic) CHECK(p.d >= 0);
}

TEST_CASE("h_compare: masses and candidate h") {
  PrecisionGuard guard(256);
  auto t = build_tower(GammaSpec::constant(Rational(1, 50)), TowerVariant::kKGamma, 6, 256);
  for (int s = 1; s <= 6; ++s) CHECK(mp::abs(candidate_h(t, t.delta[static_cast<size_t>(s)]) - pow2(-s)) < pow2(-200));
  auto r = h_compare(t, 6);
  REQUIRE(r.levels.size() == 6);
  for (const auto& lv : r.levels) {
    CHECK(lv.components == (1L << lv.s));
    CHECK(lv.total_mass == 1);
    CHECK(lv.ratio_min > 0);
    CHECK(lv.ratio_max > 0);
    CHECK(lv.min_length >= lv.delta);
    CHECK(mp::abs(lv.h_delta - pow2(-lv.s)) < pow2(-200));
  }
  CHECK(r.c >= 1);
  CHECK(r.length_c >= 1);
  CHECK(r.length_c < 2);
  CHECK_FALSE(r.summable);
  CHECK(r.label == "candidate-h");

  auto summable = build_tower(GammaSpec::formula(GammaFamily::kPower, Rational(1, 50), Rational(1, 2)), TowerVariant::kKGamma, 4, 256);
  CHECK(h_compare(summable, 4).summable);

  auto big = build_tower(GammaSpec::constant(Rational(1, 8)), TowerVariant::kKGamma, 3, 256);
  try {
    h_compare(big, 3);
    FAIL("expected an error");
  } catch (const LabError& e) {
    CHECK(std::string(e.what()).find("h-comparison requires") != std::string::npos);
  }
}
