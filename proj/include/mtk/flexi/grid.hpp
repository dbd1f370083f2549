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

#include <array>
#include <unordered_map>

#include "mtk/common.hpp"

namespace mtk::flexi {

/// Per-cube extraction weights. alpha weighs the 8 corners in the crossing
/// interpolation, beta weighs the 12 edges in the dual-vertex mean, gamma
/// picks the quad split point.
struct CubeWeights {
  std::array<double, 8> alpha{1, 1, 1, 1, 1, 1, 1, 1};
  std::array<double, 12> beta{1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1, 1};
  double gamma = 0.5;
};

/// Cubical extraction grid: r cells per axis, (r+1)^3 vertices. Vertex
/// (i, j, k) has linear id i + (r+1)(j + (r+1)k); cube (i, j, k) has linear
/// id i + r(j + r k). Cube weights are stored sparsely; cubes without an
/// entry use CubeWeights defaults (which reduce extraction to plain dual
/// marching cubes).
struct FlexiGrid {
  int r = 0;
  BoundingBox box;
  Vec s;                                         // (r+1)^3 signed distances
  Mat delta;                                     // 3 x (r+1)^3 offsets, or empty for zero
  std::unordered_map<long, CubeWeights> cubes;   // sparse per-cube weights

  explicit FlexiGrid(int resolution = 0, const BoundingBox& domain = BoundingBox{})
      : r(resolution), box(domain) {
    if (resolution > 0) s = Vec::Zero(n_vertices());
  }

  long n_vertices() const { return static_cast<long>(r + 1) * (r + 1) * (r + 1); }
  long n_cubes() const { return static_cast<long>(r) * r * r; }
  long vertex_id(int i, int j, int k) const {
    return i + static_cast<long>(r + 1) * (j + static_cast<long>(r + 1) * k);
  }
  long cube_id(int i, int j, int k) const {
    return i + static_cast<long>(r) * (j + static_cast<long>(r) * k);
  }
  double cell_edge() const { return box.cell_edge(r); }

  Vec3 vertex_pos(int i, int j, int k) const {
    const double h = cell_edge();
    return box.lo + h * Vec3(i, j, k);
  }

  /// Deformed position x + delta of a grid vertex.
  Vec3 deformed_pos(int i, int j, int k) const {
    Vec3 p = vertex_pos(i, j, k);
    if (delta.size() > 0) p += delta.col(vertex_id(i, j, k));
    return p;
  }

  const CubeWeights& weights(long cube) const {
    static const CubeWeights kDefault{};
    const auto it = cubes.find(cube);
    return it == cubes.end() ? kDefault : it->second;
  }
};

/// Cube corner c sits at offsets ((c & 1), (c >> 1 & 1), (c >> 2 & 1)).
/// Edge slots 0..3 run along x, 4..7 along y, 8..11 along z.
inline constexpr int kCubeEdges[12][3] = {
    {0, 1, 0}, {2, 3, 0}, {4, 5, 0}, {6, 7, 0}, {0, 2, 1}, {1, 3, 1},
    {4, 6, 1}, {5, 7, 1}, {0, 4, 2}, {1, 5, 2}, {2, 6, 2}, {3, 7, 2},
};

}  // namespace mtk::flexi
