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

#pragma once

#include <vector>

#include "mtk/common.hpp"
#include "mtk/rng.hpp"

namespace mtk::inv {

/// Evolution-strategy state over an n-dimensional search space. One
/// generation is cma_sample (draw candidates) followed by cma_step (consume
/// their fitness). Candidates are drawn as mirrored pairs, so the population
/// size is even.
struct CmaState {
  int n = 0;
  int lambda = 0;
  long generation = 0;
  Vec m;
  double sigma = 0.0;
  Mat C;
  Vec p_sigma;
  Vec p_c;
  Mat pending;  // n x lambda step vectors y_k of the open generation
  bool has_pending = false;
};

/// 4 + floor(3 ln n), rounded up to even for mirrored pairs.
int cma_population_size(int n);

CmaState cma_init(const Vec& m0, double sigma0);

/// Draws the generation's candidates, columns m + sigma * y_k with
/// y_{2i+1} = -y_{2i}. The factorization of C must succeed (positive
/// definite) or a NumericalError is thrown.
Mat cma_sample(CmaState& state, Rng& rng);

/// Rank-mu + rank-1 update with cumulative step-size adaptation over the
/// pending sample. Fitness is minimized; ascending ranks get logarithmic
/// recombination weights (zero beyond the best half), and exactly tied
/// fitness values share the mean weight of their rank range, so a constant
/// fitness function cannot move the mean. Non-finite fitness throws a
/// NumericalError naming the sample.
void cma_step(CmaState& state, const std::vector<double>& fitness);

}  // namespace mtk::inv
