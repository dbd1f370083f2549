// Copyright 2026 The mtk Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "mtk/inv/cma.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mtk::inv {

namespace {

/// Strategy constants derived from (n, lambda) alone.
struct CmaParams {
  int mu;
  Vec weights;  // mu recombination weights, sum 1
  double mu_eff;
  double c_sigma, d_sigma, c_c, c_1, c_mu, chi_n;
};

CmaParams cma_params(int n, int lambda) {
  CmaParams p;
  p.mu = lambda / 2;
  p.weights.resize(p.mu);
  for (int i = 0; i < p.mu; ++i)
    p.weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
  p.weights /= p.weights.sum();
  p.mu_eff = 1.0 / p.weights.squaredNorm();
  const double nn = n;
  p.c_sigma = (p.mu_eff + 2.0) / (nn + p.mu_eff + 5.0);
  p.d_sigma =
      1.0 + 2.0 * std::max(0.0, std::sqrt((p.mu_eff - 1.0) / (nn + 1.0)) - 1.0) + p.c_sigma;
  p.c_c = (4.0 + p.mu_eff / nn) / (nn + 4.0 + 2.0 * p.mu_eff / nn);
  p.c_1 = 2.0 / ((nn + 1.3) * (nn + 1.3) + p.mu_eff);
  p.c_mu = std::min(1.0 - p.c_1, 2.0 * (p.mu_eff - 2.0 + 1.0 / p.mu_eff) /
                                     ((nn + 2.0) * (nn + 2.0) + p.mu_eff));
  p.chi_n = std::sqrt(nn) * (1.0 - 1.0 / (4.0 * nn) + 1.0 / (21.0 * nn * nn));
  return p;
}

struct CovFactors {
  Mat B;
  Vec sqrt_eig;
};

CovFactors factorize(const Mat& C, long generation) {
  Eigen::SelfAdjointEigenSolver<Mat> solver(C);
  if (solver.info() != Eigen::Success || solver.eigenvalues().minCoeff() <= 0.0)
    throw NumericalError("covariance lost positive definiteness at generation " +
                         std::to_string(generation));
  return {solver.eigenvectors(), solver.eigenvalues().cwiseSqrt()};
}

}  // namespace

int cma_population_size(int n) {
  int lambda = 4 + static_cast<int>(std::floor(3.0 * std::log(static_cast<double>(n))));
  if (lambda % 2 != 0) lambda++;  // mirrored pairs need an even population
  return lambda;
}

CmaState cma_init(const Vec& m0, double sigma0) {
  if (m0.size() < 1) throw ConfigError("cma_init: empty start point");
  if (!(sigma0 > 0.0) || !std::isfinite(sigma0))
    throw ConfigError("cma_init: sigma0 must be positive");
  if (!m0.allFinite()) throw ConfigError("cma_init: non-finite start point");
  CmaState st;
  st.n = static_cast<int>(m0.size());
  st.lambda = cma_population_size(st.n);
  st.m = m0;
  st.sigma = sigma0;
  st.C = Mat::Identity(st.n, st.n);
  st.p_sigma = Vec::Zero(st.n);
  st.p_c = Vec::Zero(st.n);
  return st;
}

Mat cma_sample(CmaState& state, Rng& rng) {
  if (state.has_pending)
    throw std::invalid_argument("cma_sample: pending generation awaits cma_step");
  const CovFactors cf = factorize(state.C, state.generation);
  state.pending.resize(state.n, state.lambda);
  for (int k = 0; k < state.lambda; k += 2) {
    Vec z(state.n);
    for (int i = 0; i < state.n; ++i) z(i) = rng.normal();
    const Vec y = cf.B * cf.sqrt_eig.cwiseProduct(z).matrix();
    state.pending.col(k) = y;
    state.pending.col(k + 1) = -y;
  }
  state.has_pending = true;
  return (state.sigma * state.pending).colwise() + state.m;
}

void cma_step(CmaState& state, const std::vector<double>& fitness) {
  if (!state.has_pending)
    throw std::invalid_argument("cma_step: no pending sample (call cma_sample first)");
  if (static_cast<int>(fitness.size()) != state.lambda)
    throw std::invalid_argument("cma_step: fitness count does not match the population");
  for (int k = 0; k < state.lambda; ++k)
    if (!std::isfinite(fitness[k]))
      throw NumericalError("cma_step: non-finite fitness for sample " + std::to_string(k) +
                           " at generation " + std::to_string(state.generation));

  const CmaParams prm = cma_params(state.n, state.lambda);

  std::vector<int> order(static_cast<size_t>(state.lambda));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    return fitness[a] != fitness[b] ? fitness[a] < fitness[b] : a < b;
  });

  // Per-sample recombination weight by ascending rank; exact ties share the
  // mean weight of their rank range so a constant fitness recombines the
  // mirrored population symmetrically.
  Vec shared = Vec::Zero(state.lambda);
  for (int lo = 0; lo < state.lambda;) {
    int hi = lo;
    while (hi + 1 < state.lambda && fitness[order[hi + 1]] == fitness[order[lo]]) hi++;
    double total = 0.0;
    for (int r = lo; r <= hi; ++r)
      if (r < prm.mu) total += prm.weights(r);
    const double w = total / (hi - lo + 1);
    for (int r = lo; r <= hi; ++r) shared(order[r]) = w;
    lo = hi + 1;
  }

  const Vec y_w = state.pending * shared;
  state.m += state.sigma * y_w;

  const CovFactors cf = factorize(state.C, state.generation);
  const Vec inv_sqrt_y =
      cf.B * (cf.B.transpose() * y_w).cwiseQuotient(cf.sqrt_eig).matrix();
  state.p_sigma = (1.0 - prm.c_sigma) * state.p_sigma +
                  std::sqrt(prm.c_sigma * (2.0 - prm.c_sigma) * prm.mu_eff) * inv_sqrt_y;

  const double decay = 1.0 - std::pow(1.0 - prm.c_sigma, 2.0 * (state.generation + 1));
  const bool h_sigma = state.p_sigma.norm() / std::sqrt(decay) <
                       (1.4 + 2.0 / (state.n + 1.0)) * prm.chi_n;
  state.p_c = (1.0 - prm.c_c) * state.p_c +
              (h_sigma ? std::sqrt(prm.c_c * (2.0 - prm.c_c) * prm.mu_eff) : 0.0) * y_w;

  Mat rank_mu = Mat::Zero(state.n, state.n);
  for (int k = 0; k < state.lambda; ++k)
    if (shared(k) != 0.0)
      rank_mu.noalias() += shared(k) * state.pending.col(k) * state.pending.col(k).transpose();
  state.C = (1.0 - prm.c_1 - prm.c_mu) * state.C +
            prm.c_1 * (state.p_c * state.p_c.transpose() +
                       (h_sigma ? 0.0 : prm.c_c * (2.0 - prm.c_c)) * state.C) +
            prm.c_mu * rank_mu;
  state.C = 0.5 * (state.C + state.C.transpose()).eval();

  state.sigma *= std::exp(prm.c_sigma / prm.d_sigma *
                          (state.p_sigma.norm() / prm.chi_n - 1.0));
  if (!(state.sigma > 0.0) || !std::isfinite(state.sigma))
    throw NumericalError("cma_step: step size degenerated at generation " +
                         std::to_string(state.generation));

  // Positive definiteness is the state invariant; fail loudly when adaptation
  // breaks it rather than sampling garbage next generation.
  if (Eigen::LLT<Mat>(state.C).info() != Eigen::Success)
    throw NumericalError("covariance lost positive definiteness at generation " +
                         std::to_string(state.generation));

  state.generation++;
  state.has_pending = false;
}

}  // namespace mtk::inv
