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

#include <functional>
#include <vector>

#include "mtk/ad/tape.hpp"

namespace mtk::ad {

/// Builds a scalar-valued graph on `tape` from already-registered input node
/// ids and returns the output node id.
using TapeFn = std::function<int(Tape&, const std::vector<int>&)>;

/// Compares reverse-mode gradients against central finite differences,
/// coordinate by coordinate over every input buffer. Returns
/// max |g_ad - g_fd| / max(1, |g_fd|). Throws NumericalError if any value or
/// gradient involved is non-finite, naming the offending coordinate.
double grad_check(const TapeFn& fn, const std::vector<Mat>& inputs, double h = 1e-4);

}  // namespace mtk::ad
