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

#include "mtk/flexi/mesh.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mtk::flexi {

namespace {

/// Undirected edge key; vertex indices stay below 2^32.
uint64_t edge_key(int a, int b) {
  const uint64_t lo = static_cast<uint64_t>(std::min(a, b));
  const uint64_t hi = static_cast<uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

}  // namespace

MeshReport mesh_validate(const TriMesh& mesh) {
  MeshReport rep;
  rep.empty = mesh.triangles.empty();
  if (rep.empty) {
    rep.watertight = true;  // vacuously closed
    return rep;
  }

  std::unordered_map<uint64_t, int> edge_count;
  edge_count.reserve(mesh.triangles.size() * 3);
  std::set<std::array<int, 3>> seen;
  std::unordered_set<int> used;
  for (const auto& t : mesh.triangles) {
    for (int v : t) {
      if (v < 0 || v >= mesh.n_vertices())
        throw std::invalid_argument("mesh_validate: triangle references missing vertex");
      used.insert(v);
    }
    std::array<int, 3> key = t;
    std::sort(key.begin(), key.end());
    if (key[0] == key[1] || key[1] == key[2]) {
      ++rep.degenerate_triangles;
    } else {
      if (!seen.insert(key).second) ++rep.duplicate_triangles;
      edge_count[edge_key(t[0], t[1])]++;
      edge_count[edge_key(t[1], t[2])]++;
      edge_count[edge_key(t[2], t[0])]++;
    }

    const Vec3 e0 = mesh.vertices.col(t[1]) - mesh.vertices.col(t[0]);
    const Vec3 e1 = mesh.vertices.col(t[2]) - mesh.vertices.col(t[1]);
    const Vec3 e2 = mesh.vertices.col(t[0]) - mesh.vertices.col(t[2]);
    const double area = 0.5 * e0.cross(e1).norm();
    const double denom = e0.squaredNorm() + e1.squaredNorm() + e2.squaredNorm();
    const double quality = denom > 0.0 ? 4.0 * std::sqrt(3.0) * area / denom : 0.0;
    rep.min_quality = std::min(rep.min_quality, quality);
  }

  for (const auto& [key, count] : edge_count) {
    if (count == 1) ++rep.boundary_edges;
    if (count > 2) ++rep.nonmanifold_edges;
  }
  rep.watertight = rep.boundary_edges == 0 && rep.nonmanifold_edges == 0 &&
                   rep.degenerate_triangles == 0;

  // Euler characteristic over referenced vertices; unreferenced vertices do
  // not belong to the surface complex.
  const long v = static_cast<long>(used.size());
  const long e = static_cast<long>(edge_count.size());
  const long f = static_cast<long>(mesh.triangles.size()) - rep.degenerate_triangles -
                 rep.duplicate_triangles;
  rep.euler = v - e + f;
  return rep;
}

Mat vertex_normals(const TriMesh& mesh) {
  Mat normals = Mat::Zero(3, mesh.n_vertices());
  for (const auto& t : mesh.triangles) {
    const Vec3 e0 = mesh.vertices.col(t[1]) - mesh.vertices.col(t[0]);
    const Vec3 e1 = mesh.vertices.col(t[2]) - mesh.vertices.col(t[0]);
    const Vec3 weighted = 0.5 * e0.cross(e1);  // area-weighted face normal
    normals.col(t[0]) += weighted;
    normals.col(t[1]) += weighted;
    normals.col(t[2]) += weighted;
  }
  for (Index v = 0; v < normals.cols(); ++v) {
    const double len = normals.col(v).norm();
    if (len > 0.0) normals.col(v) /= len;
  }
  return normals;
}

void write_obj(const std::string& path, const TriMesh& mesh, const Mat* normals) {
  if (normals && (normals->rows() != 3 || normals->cols() != mesh.n_vertices()))
    throw std::invalid_argument("write_obj: normals must be 3 x mesh vertices");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_obj: cannot open " + path);
  char buf[256];
  for (Index v = 0; v < mesh.n_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "v %.17g %.17g %.17g\n", mesh.vertices(0, v),
                  mesh.vertices(1, v), mesh.vertices(2, v));
    out << buf;
  }
  if (normals) {
    for (Index v = 0; v < normals->cols(); ++v) {
      std::snprintf(buf, sizeof(buf), "vn %.17g %.17g %.17g\n", (*normals)(0, v),
                    (*normals)(1, v), (*normals)(2, v));
      out << buf;
    }
  }
  for (const auto& t : mesh.triangles) {
    if (normals)
      std::snprintf(buf, sizeof(buf), "f %d//%d %d//%d %d//%d\n", t[0] + 1, t[0] + 1,
                    t[1] + 1, t[1] + 1, t[2] + 1, t[2] + 1);
    else
      std::snprintf(buf, sizeof(buf), "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
    out << buf;
  }
  if (!out) throw std::runtime_error("write_obj: write failed for " + path);
}

TriMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open mesh file '" + path + "'");
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::string line;
  long line_no = 0;
  const auto fail = [&](const std::string& why) -> ConfigError {
    return ConfigError("'" + path + "' line " + std::to_string(line_no) + ": " + why);
  };
  while (std::getline(in, line)) {
    line_no++;
    std::istringstream row(line);
    std::string tag;
    if (!(row >> tag) || tag[0] == '#') continue;
    if (tag == "v") {
      Vec3 p;
      if (!(row >> p.x() >> p.y() >> p.z())) throw fail("malformed vertex");
      if (!p.allFinite()) throw fail("non-finite vertex");
      vertices.push_back(p);
    } else if (tag == "f") {
      std::array<int, 3> tri;
      std::string corner;
      for (int k = 0; k < 3; ++k) {
        if (!(row >> corner)) throw fail("face needs three corners");
        // keep the vertex index, drop any /texture/normal suffix
        const std::string head = corner.substr(0, corner.find('/'));
        long idx = 0;
        try {
          idx = std::stol(head);
        } catch (const std::exception&) {
          throw fail("malformed face index '" + corner + "'");
        }
        if (idx < 1 || idx > static_cast<long>(vertices.size()))
          throw fail("face index " + std::to_string(idx) + " out of range");
        tri[static_cast<size_t>(k)] = static_cast<int>(idx - 1);
      }
      std::string extra;
      if (row >> extra) throw fail("only triangle faces are supported");
      triangles.push_back(tri);
    }
    // vn, vt, o, g, s, usemtl ... are irrelevant to the geometry
  }
  TriMesh mesh;
  mesh.vertices.resize(3, static_cast<long>(vertices.size()));
  for (size_t v = 0; v < vertices.size(); ++v)
    mesh.vertices.col(static_cast<long>(v)) = vertices[v];
  mesh.triangles = std::move(triangles);
  mesh.vertex_cell.assign(vertices.size(), -1);
  mesh.vertex_edge.assign(vertices.size(), -1);
  return mesh;
}

}  // namespace mtk::flexi
