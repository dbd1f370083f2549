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

namespace mtk::inv {

/// Principal subspace of a row-per-sample data matrix.
struct EmbeddingSubspace {
  Vec mean;         // column mean of the rows
  Mat basis;        // D x d, orthonormal; columns ordered by eigenvalue
  Vec eigenvalues;  // non-negative, non-increasing
};

/// Top-d eigenvectors of the sample covariance of the mean-centered rows
/// (V x D input). Each basis column is canonicalized so its largest-magnitude
/// entry is positive, lowest index winning ties. Requires V > d >= 1 and
/// d <= D.
EmbeddingSubspace pca_fit(const Mat& rows, int d);

}  // namespace mtk::inv
