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

#include "mtk/ad/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace mtk::ad {

void adam_step(const AdamConfig& cfg, AdamState& state, Mat& param, const Mat& grad,
               double lr_scale) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols())
    throw std::invalid_argument("adam_step: parameter/gradient shape mismatch");
  if (!grad.allFinite()) throw NumericalError("adam_step: non-finite gradient");
  if (state.t == 0) {
    state.m = Mat::Zero(param.rows(), param.cols());
    state.v = Mat::Zero(param.rows(), param.cols());
  }
  state.t += 1;
  state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
  state.v.array() = cfg.beta2 * state.v.array() + (1.0 - cfg.beta2) * grad.array().square();
  const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));
  param.array() -= (cfg.lr * lr_scale) * (state.m.array() / c1) /
                   ((state.v.array() / c2).sqrt() + cfg.eps);
}

}  // namespace mtk::ad
