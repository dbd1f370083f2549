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

#include "mtk/flexi/mesh.hpp"
#include "mtk/geo/target.hpp"
#include "mtk/rng.hpp"

namespace mtk::geo {

/// Area-weighted uniform samples on the triangles, 3 x n.
Mat sample_mesh_surface(const flexi::TriMesh& mesh, int n, Rng& rng);

struct ChamferResult {
  double chamfer_l1 = 0.0;    // mean of the two directed mean NN distances
  double hausdorff95 = 0.0;   // 95th percentile over both directions
};

/// Bidirectional nearest-neighbor distances between two point sets (3 x n each).
ChamferResult chamfer_points(const Mat& a, const Mat& b);

/// Chamfer between mesh-surface samples and target-surface samples,
/// n_samples each, deterministic per seed.
ChamferResult chamfer(const flexi::TriMesh& mesh, const TargetShape& target,
                      int n_samples, uint64_t seed);

}  // namespace mtk::geo
