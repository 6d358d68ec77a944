#include <doctest.h>

#include "cantorlab/ortho.hpp"
#include "cantorlab/potential.hpp"
#include "oracle_chebyshev.hpp"
#include "test_util.hpp"

using namespace cantorlab;
using testutil::d;
using testutil::modified_chebyshev;

namespace {

namespace mp = boost::multiprecision;

GammaTower tower(const Rational& g, int s_max, TowerVariant v = TowerVariant::kKGamma) {
  return build_tower(GammaSpec::constant(g), v, s_max, 256);
}

}  // namespace

TEST_CASE("stieltjes: arcsine recurrence") {
  PrecisionGuard guard(256);
  auto mu = pullback_quadrature(interval_tower(256), 0, 64);
  auto j = stieltjes(mu, 50);
  CHECK(j.trusted_n == 32);
  REQUIRE(j.a.size() >= 32);
  CHECK(mp::abs(j.a[0] - mp::sqrt(Real(2)) / 2) < pow2(-200));
  for (int n = 2; n <= 50; ++n) CHECK(mp::abs(j.a[static_cast<size_t>(n - 1)] - Real("0.5")) < pow2(-200));
  for (int n = 1; n <= 50; ++n) CHECK(mp::abs(j.b[static_cast<size_t>(n - 1)]) < pow2(-200));
  CHECK(j.orthogonality < pow2(-128));

  auto w = widom_hilbert(j, Real("0.5"));
  for (const auto& v : w.w2) CHECK(mp::abs(v - mp::sqrt(Real(2))) < pow2(-190));
  CHECK_FALSE(w.below_one);
}

TEST_CASE("stieltjes: two-point measure and node budget") {
  PrecisionGuard guard(256);
  DiscreteMeasure mu;
  mu.nodes = {Real(-1), Real(1)};
  mu.weights = {Real("0.5"), Real("0.5")};
  auto j = stieltjes(mu, 1);
  CHECK(mp::abs(j.b[0]) < pow2(-250));
  REQUIRE(j.a.size() == 1);
  CHECK(mp::abs(j.a[0] - 1) < pow2(-250));
  CHECK_THROWS_AS(stieltjes(mu, 3), LabError);
}

TEST_CASE("stieltjes: symmetry of gamma towers") {
  PrecisionGuard guard(256);
  auto k = tower(Rational(1, 8), 5);
  auto jk = stieltjes(pullback_quadrature(k, 5, 2), 32);
  for (int n = 1; n <= jk.trusted_n; ++n) CHECK(mp::abs(jk.b[static_cast<size_t>(n - 1)] - Real("0.5")) < pow2(-128));
  auto k1 = tower(Rational(1, 8), 5, TowerVariant::kK1Gamma);
  auto j1 = stieltjes(pullback_quadrature(k1, 5, 2), 32);
  for (int n = 1; n <= j1.trusted_n; ++n) CHECK(mp::abs(j1.b[static_cast<size_t>(n - 1)]) < pow2(-128));
}

TEST_CASE("stieltjes: norm identity and orthogonality by direct quadrature") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 4);
  auto mu = pullback_quadrature(t, 4, 2);
  auto j = stieltjes(mu, 12);
  std::vector<std::vector<Real>> values(13);
  for (int n = 0; n <= 12; ++n)
    for (const auto& x : mu.nodes) values[static_cast<size_t>(n)].push_back(eval_monic(j, n, x));
  auto inner = [&](int p, int q) {
    Real s = 0;
    for (size_t i = 0; i < mu.size(); ++i) s += mu.weights[i] * values[static_cast<size_t>(p)][i] * values[static_cast<size_t>(q)][i];
    return s;
  };
  Real prod = 1;
  for (int n = 1; n <= 12; ++n) {
    prod *= j.a[static_cast<size_t>(n - 1)];
    Real norm = mp::sqrt(inner(n, n));
    CHECK(mp::abs(norm / prod - 1) < pow2(-128));
    for (int m = 0; m < n; ++m) CHECK(mp::abs(inner(n, m)) / (norm * mp::sqrt(inner(m, m))) < pow2(-128));
  }
}

TEST_CASE("stieltjes: agrees with the modified Chebyshev oracle") {
  PrecisionGuard guard(512);
  auto t = build_tower(GammaSpec::constant(Rational(1, 8)), TowerVariant::kKGamma, 4, 512);
  auto mu = pullback_quadrature(t, 4, 2);
  auto j = stieltjes(mu, 8);
  auto oracle = modified_chebyshev(mu, 8);
  const Real tol("1e-20");
  for (int n = 1; n <= 8; ++n) CHECK(mp::abs(j.b[static_cast<size_t>(n - 1)] - oracle.b[static_cast<size_t>(n - 1)]) < tol);
  for (int n = 1; n < 8; ++n) {
    const Real& a = j.a[static_cast<size_t>(n - 1)];
    CHECK(mp::abs(a * a - oracle.a2[static_cast<size_t>(n - 1)]) < tol);
  }
}

TEST_CASE("stieltjes_cross_level: trusted range") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 6);
  auto r = stieltjes_cross_level(t, 5, 16);
  CHECK(r.fine.trusted_n >= 8);
  CHECK(r.max_difference <= Real("1e-8"));
}

TEST_CASE("eval_monic and zeros: closed forms") {
  PrecisionGuard guard(256);
  auto j = stieltjes(pullback_quadrature(interval_tower(256), 0, 16), 8);
  CHECK(eval_monic(j, 0, Real("0.3")) == 1);
  CHECK(mp::abs(eval_monic(j, 1, Real("0.3")) - (Real("0.3") - j.b[0])) < pow2(-250));
  CHECK(mp::abs(eval_monic(j, 2, Real(0)) + Real("0.5")) < pow2(-200));
  auto z2 = zeros(j, 2);
  REQUIRE(z2.size() == 2);
  CHECK(mp::abs(z2[1] - mp::sqrt(Real(2)) / 2) < pow2(-200));
  CHECK(mp::abs(z2[0] + mp::sqrt(Real(2)) / 2) < pow2(-200));
  CHECK(zeros(j, 1)[0] == j.b[0]);
  // Chebyshev zeros cos((2k - 1) pi / 2n).
  auto z7 = zeros(j, 7);
  for (int k = 1; k <= 7; ++k) {
    Real expected = mp::cos((2 * k - 1) * pi() / 14);
    CHECK(mp::abs(z7[static_cast<size_t>(7 - k)] - expected) < pow2(-200));
  }
  auto sp = zero_spacing(j, 2, {});
  CHECK(mp::abs(sp.u_n - mp::sqrt(Real(2))) < pow2(-200));
  CHECK_FALSE(sp.general_upper.has_value());
}

TEST_CASE("zeros: interlacing and hull on a Cantor measure") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 6);
  auto mu = pullback_quadrature(t, 6, 2);
  auto j = stieltjes(mu, 40);
  std::vector<Real> prev = zeros(j, 1);
  for (int n = 2; n <= j.trusted_n; ++n) {
    auto cur = zeros(j, n);
    REQUIRE(cur.size() == static_cast<size_t>(n));
    CHECK(cur.front() >= mu.nodes.front());
    CHECK(cur.back() <= mu.nodes.back());
    for (int i = 0; i + 1 < n; ++i) {
      CHECK(cur[static_cast<size_t>(i)] < prev[static_cast<size_t>(i)]);
      CHECK(prev[static_cast<size_t>(i)] < cur[static_cast<size_t>(i + 1)]);
    }
    prev = std::move(cur);
  }
}

TEST_CASE("zero_spacing: sandwich for gamma = 1/8") {
  PrecisionGuard guard(256);
  auto t = tower(Rational(1, 8), 8);
  auto j = stieltjes(pullback_quadrature(t, 8, 2), 16);
  auto r = zero_spacing(j, 8, t.delta, Rational(12, 100));
  CHECK(r.s == 4);
  REQUIRE(r.c_lower.has_value());
  CHECK(mp::abs(*r.c_lower - Real("0.0144") * t.delta[4]) < pow2(-200));
  CHECK(r.ok);
  CHECK(r.u_n > 0);
  auto small = zero_spacing(j, 3, t.delta);
  CHECK(small.s == 2);
  CHECK_FALSE(small.general_upper.has_value());
}

TEST_CASE("widom_hilbert: bound for the level-set equilibrium measure") {
  PrecisionGuard guard(256);
  auto t = std::make_shared<const GammaTower>(tower(Rational(1, 8), 5));
  auto ctx = make_potential_context(t);
  auto j = stieltjes(pullback_quadrature(*t, 5, 2), 32);
  auto w = widom_hilbert(j, capacity(ctx, 5));
  REQUIRE_FALSE(w.w2.empty());
  CHECK(w.inf_w2 >= 1 - Real("1e-8"));
  CHECK(w.window_limsup >= w.window_liminf);
  CHECK_THROWS_AS(widom_hilbert(j, Real(0)), LabError);
}
