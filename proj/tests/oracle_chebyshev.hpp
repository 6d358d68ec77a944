#pragma once

#include <vector>

#include "cantorlab/measures.hpp"

namespace testutil {

using namespace cantorlab;

struct Recurrence {
  std::vector<Real> a2;  // a_n^2, n = 1..
  std::vector<Real> b;   // b_n, n = 1..
};

// Modified Chebyshev algorithm with the monic Chebyshev polynomials of the
// enclosing interval [lo, hi] as the auxiliary basis.
inline Recurrence modified_chebyshev(const DiscreteMeasure& mu, int N) {
  const Real lo = mu.nodes.front();
  const Real hi = mu.nodes.back();
  const Real c = (lo + hi) / 2;
  const Real h = (hi - lo) / 2;
  const int K = 2 * N;
  std::vector<Real> alpha(static_cast<size_t>(K), c);
  std::vector<Real> beta(static_cast<size_t>(K), h * h / 4);
  beta[0] = 0;
  if (K > 1) beta[1] = h * h / 2;

  std::vector<Real> nu(static_cast<size_t>(K), Real(0));
  for (size_t i = 0; i < mu.size(); ++i) {
    Real p_prev = 0, p = 1;
    for (int k = 0; k < K; ++k) {
      nu[static_cast<size_t>(k)] += mu.weights[i] * p;
      Real next = (mu.nodes[i] - alpha[static_cast<size_t>(k)]) * p - beta[static_cast<size_t>(k)] * p_prev;
      p_prev = p;
      p = next;
    }
  }

  std::vector<std::vector<Real>> sigma(static_cast<size_t>(N) + 1, std::vector<Real>(static_cast<size_t>(K) + 1, Real(0)));
  // sigma[k + 1][l] holds sigma_{k,l}; sigma[0] is sigma_{-1,*} = 0.
  for (int l = 0; l < K; ++l) sigma[1][static_cast<size_t>(l)] = nu[static_cast<size_t>(l)];
  std::vector<Real> ra(static_cast<size_t>(N)), rb(static_cast<size_t>(N));
  ra[0] = alpha[0] + nu[1] / nu[0];
  rb[0] = nu[0];
  for (int k = 1; k < N; ++k) {
    auto& cur = sigma[static_cast<size_t>(k + 1)];
    const auto& prev = sigma[static_cast<size_t>(k)];
    const auto& prev2 = sigma[static_cast<size_t>(k - 1)];
    for (int l = k; l < K - k; ++l) {
      const size_t L = static_cast<size_t>(l);
      cur[L] = prev[L + 1] - (ra[static_cast<size_t>(k - 1)] - alpha[L]) * prev[L] -
               rb[static_cast<size_t>(k - 1)] * prev2[L] + beta[L] * prev[L - 1];
    }
    const size_t K1 = static_cast<size_t>(k);
    ra[K1] = alpha[K1] + cur[K1 + 1] / cur[K1] - prev[K1] / prev[K1 - 1];
    rb[K1] = cur[K1] / prev[K1 - 1];
  }
  Recurrence r;
  for (int k = 0; k < N; ++k) r.b.push_back(ra[static_cast<size_t>(k)]);
  for (int k = 1; k < N; ++k) r.a2.push_back(rb[static_cast<size_t>(k)]);
  return r;
}

}  // namespace testutil
