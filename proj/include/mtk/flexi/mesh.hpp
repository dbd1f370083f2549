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
#include <string>
#include <vector>

#include "mtk/common.hpp"

namespace mtk::flexi {

/// Triangle surface. Vertices are dual (cell) vertices first, ordered by
/// cell linear index, then quad midpoints ordered by crossing-edge id.
/// vertex_cell holds the source cell id for dual vertices and -1 for
/// midpoints; vertex_edge the reverse.
struct TriMesh {
  Mat vertices;  // 3 x V
  std::vector<std::array<int, 3>> triangles;
  std::vector<long> vertex_cell;
  std::vector<long> vertex_edge;

  long n_vertices() const { return vertices.cols(); }
  long n_triangles() const { return static_cast<long>(triangles.size()); }
  bool empty() const { return triangles.empty(); }
};

struct MeshReport {
  bool empty = true;
  bool watertight = true;  // vacuously true for an empty mesh
  long euler = 0;          // V - E + F over undirected edges
  long boundary_edges = 0;
  long nonmanifold_edges = 0;
  long degenerate_triangles = 0;  // a triangle using a vertex twice
  long duplicate_triangles = 0;   // two triangles over the same vertex set
  double min_quality = 1.0;       // min of 4*sqrt(3)*area / (sum of squared edges)
};

MeshReport mesh_validate(const TriMesh& mesh);

/// Area-weighted per-vertex normals; zero-area fans fall back to zero.
Mat vertex_normals(const TriMesh& mesh);

/// "v x y z" with 17 significant digits, "f a b c" 1-based, LF endings.
/// Normals, when given (3 x V), are emitted as "vn" lines after the
/// vertices and referenced as "f a//a b//b c//c".
void write_obj(const std::string& path, const TriMesh& mesh, const Mat* normals = nullptr);

/// Reads "v" and "f" records; slash-suffixed face indices keep the vertex
/// part, other record types are skipped. Faces must be triangles with
/// in-range 1-based indices. Cell/edge provenance is absent in the file and
/// filled with -1.
TriMesh read_obj(const std::string& path);

}  // namespace mtk::flexi
