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

#include "mtk/ad/grad_check.hpp"

#include <cmath>
#include <string>

namespace mtk::ad {

namespace {

double eval(const TapeFn& fn, const std::vector<Mat>& inputs) {
  Tape tape;
  std::vector<int> ids;
  ids.reserve(inputs.size());
  for (const Mat& m : inputs) ids.push_back(tape.input(m));
  const int out = fn(tape, ids);
  const Mat& v = tape.value(out);
  if (v.rows() != 1 || v.cols() != 1)
    throw std::invalid_argument("grad_check: function output must be scalar");
  return v(0, 0);
}

}  // namespace

double grad_check(const TapeFn& fn, const std::vector<Mat>& inputs, double h) {
  Tape tape;
  std::vector<int> ids;
  ids.reserve(inputs.size());
  for (const Mat& m : inputs) ids.push_back(tape.input(m));
  const int out = fn(tape, ids);
  if (!tape.value(out).allFinite()) throw NumericalError("grad_check: non-finite output");
  tape.backward(out);

  double worst = 0.0;
  for (size_t k = 0; k < inputs.size(); ++k) {
    const Mat& grad = tape.adjoint(ids[k]);
    std::vector<Mat> probe = inputs;
    for (Index i = 0; i < inputs[k].rows(); ++i) {
      for (Index j = 0; j < inputs[k].cols(); ++j) {
        const double x0 = inputs[k](i, j);
        probe[k](i, j) = x0 + h;
        const double fp = eval(fn, probe);
        probe[k](i, j) = x0 - h;
        const double fm = eval(fn, probe);
        probe[k](i, j) = x0;
        const double fd = (fp - fm) / (2.0 * h);
        const double ad = grad(i, j);
        if (!std::isfinite(fd) || !std::isfinite(ad))
          throw NumericalError("grad_check: non-finite gradient at input " +
                               std::to_string(k) + " (" + std::to_string(i) + "," +
                               std::to_string(j) + ")");
        const double rel = std::abs(ad - fd) / std::max(1.0, std::abs(fd));
        worst = std::max(worst, rel);
      }
    }
  }
  return worst;
}

}  // namespace mtk::ad
