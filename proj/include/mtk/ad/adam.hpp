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

#include "mtk/common.hpp"

namespace mtk::ad {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// First/second moment buffers for one parameter. Shaped lazily on the first
/// update so callers need not know parameter shapes up front.
struct AdamState {
  Mat m;
  Mat v;
  long t = 0;
};

/// One bias-corrected Adam step on `param` in place. `lr_scale` multiplies
/// the configured learning rate (used for per-group rates, e.g. a faster
/// rate on lookup tables than on dense layers).
void adam_step(const AdamConfig& cfg, AdamState& state, Mat& param, const Mat& grad,
               double lr_scale = 1.0);

}  // namespace mtk::ad
