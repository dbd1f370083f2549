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

#include <optional>

#include "mtk/flexi/grid.hpp"
#include "mtk/flexi/mesh.hpp"

namespace mtk::flexi {

/// Crossing point on an edge with endpoint values of opposite sign:
///   u = (alpha_a |s_b| xa + alpha_b |s_a| xb) / (alpha_a |s_b| + alpha_b |s_a|).
/// Strictly interior; reduces to linear interpolation of the zero level when
/// alpha_a == alpha_b. Throws std::invalid_argument on same-sign values or
/// non-positive weights.
Vec3 edge_crossing(double s_a, double s_b, const Vec3& xa, const Vec3& xb, double alpha_a,
                   double alpha_b);

/// Beta-weighted mean of the cube's edge crossings, or nullopt when all
/// corner signs agree. Corner/edge numbering per kCubeEdges.
std::optional<Vec3> dual_vertex(const std::array<double, 8>& s,
                                const std::array<Vec3, 8>& xhat,
                                const std::array<double, 8>& alpha,
                                const std::array<double, 12>& beta);

/// Everything extract_backward needs to replay the chain rule at fixed
/// topology. Tied to the exact grid that produced it.
struct Extraction {
  TriMesh mesh;

  struct Crossing {
    long vert_a, vert_b;  // grid vertex ids
    int slot_a, slot_b;   // cube-local corners (alpha slots)
    int beta_slot;        // cube-local edge (beta slot)
    Vec3 u;
  };
  struct Dual {
    long cube;
    int mesh_vertex;
    int first_crossing;
    int n_crossings;
  };
  struct Quad {
    long edge;           // 3 * base vertex id + axis
    long owner_cube;     // gamma source: lowest cell id of the 4 around the edge
    std::array<int, 4> v;  // mesh vertex ids of the duals, winding order
    int mid;             // mesh vertex id of the midpoint
  };

  std::vector<Crossing> crossings;
  std::vector<Dual> duals;
  std::vector<Quad> quads;
  int r = 0;  // grid resolution this extraction belongs to
};

/// Dual-marching extraction with weighted crossings, weighted dual vertices
/// and gamma-split quads (4-triangle fans around the split point, so the
/// surface varies continuously with gamma). Triangles wind so normals point
/// toward positive sdf. Values with |s| < 1e-8 are nudged to +1e-8 before
/// sign extraction. Deterministic; vertices follow (cell id, edge id) order.
Extraction extract_mesh(const FlexiGrid& grid);

/// Gradients of the grid quantities given dL/d(vertex positions) at fixed
/// topology. d_vertices must be 3 x V over the extraction's mesh.
struct GridGrads {
  Vec ds;
  Mat ddelta;  // 3 x (r+1)^3
  std::unordered_map<long, CubeWeights> dcubes;
};
GridGrads extract_backward(const FlexiGrid& grid, const Extraction& ex,
                           const Mat& d_vertices);

}  // namespace mtk::flexi
