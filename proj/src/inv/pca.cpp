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

#include "mtk/inv/pca.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <string>

namespace mtk::inv {

EmbeddingSubspace pca_fit(const Mat& rows, int d) {
  const long v = rows.rows();
  const long dim = rows.cols();
  if (d < 1) throw ConfigError("pca_fit: d must be >= 1");
  if (d >= v)
    throw ConfigError("pca_fit: d = " + std::to_string(d) + " needs more than " +
                      std::to_string(v) + " samples");
  if (d > dim)
    throw ConfigError("pca_fit: d = " + std::to_string(d) + " exceeds the data width " +
                      std::to_string(dim));
  if (!rows.allFinite()) throw ConfigError("pca_fit: non-finite input");

  EmbeddingSubspace sub;
  sub.mean = rows.colwise().mean().transpose();
  const Mat centered = rows.rowwise() - sub.mean.transpose();
  const Mat cov = centered.transpose() * centered / static_cast<double>(v - 1);

  Eigen::SelfAdjointEigenSolver<Mat> solver(cov);
  if (solver.info() != Eigen::Success)
    throw NumericalError("pca_fit: eigendecomposition failed");

  // The solver orders eigenvalues ascending; take the top d descending.
  sub.basis.resize(dim, d);
  sub.eigenvalues.resize(d);
  for (int i = 0; i < d; ++i) {
    const long src = dim - 1 - i;
    sub.eigenvalues(i) = std::max(solver.eigenvalues()(src), 0.0);
    Vec col = solver.eigenvectors().col(src);
    Index peak = 0;
    col.cwiseAbs().maxCoeff(&peak);  // lowest index wins exact ties
    if (col(peak) < 0.0) col = -col;
    sub.basis.col(i) = col;
  }
  return sub;
}

}  // namespace mtk::inv
