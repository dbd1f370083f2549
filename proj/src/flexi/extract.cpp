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

#include "mtk/flexi/extract.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mtk::flexi {

namespace {

constexpr double kSEps = 1e-8;

double nudged(double s) { return std::abs(s) < kSEps ? kSEps : s; }

/// d(nudged |s|)/ds: zero inside the nudge band, sign(s) elsewhere.
double abs_slope(double s) {
  if (std::abs(s) < kSEps) return 0.0;
  return s > 0.0 ? 1.0 : -1.0;
}

CubeWeights zero_weights() {
  CubeWeights w;
  w.alpha.fill(0.0);
  w.beta.fill(0.0);
  w.gamma = 0.0;
  return w;
}

/// Perpendicular axis pair (u, v) completing a right-handed cycle with the
/// edge axis, and the cyclic cube offsets around the edge in that plane.
/// Walking the offsets in order goes counterclockwise around the +axis
/// direction, so the emitted winding faces +axis.
constexpr int kPerp[3][2] = {{1, 2}, {2, 0}, {0, 1}};
constexpr int kRing[4][2] = {{0, 0}, {-1, 0}, {-1, -1}, {0, -1}};

void validate_grid(const FlexiGrid& grid) {
  if (grid.r < 1) throw std::invalid_argument("extract: grid resolution must be >= 1");
  grid.box.validate();
  if (grid.s.size() != grid.n_vertices())
    throw std::invalid_argument("extract: sdf array size mismatch");
  if (grid.delta.size() > 0 &&
      (grid.delta.rows() != 3 || grid.delta.cols() != grid.n_vertices()))
    throw std::invalid_argument("extract: offset array size mismatch");
  for (long v = 0; v < grid.s.size(); ++v)
    if (!std::isfinite(grid.s(v)))
      throw std::invalid_argument("extract: non-finite sdf at vertex " + std::to_string(v));
  if (grid.delta.size() > 0) {
    const double bound = 0.5 * grid.cell_edge();
    for (long v = 0; v < grid.delta.cols(); ++v) {
      if (!grid.delta.col(v).allFinite())
        throw std::invalid_argument("extract: non-finite offset at vertex " +
                                    std::to_string(v));
      if (grid.delta.col(v).cwiseAbs().maxCoeff() >= bound)
        throw std::invalid_argument("extract: offset exceeds half a cell at vertex " +
                                    std::to_string(v));
    }
  }
  for (const auto& [cube, w] : grid.cubes) {
    bool ok = w.gamma > 0.0 && w.gamma < 1.0;
    for (double a : w.alpha) ok = ok && a > 0.0 && std::isfinite(a);
    for (double b : w.beta) ok = ok && b > 0.0 && std::isfinite(b);
    if (!ok)
      throw std::invalid_argument("extract: invalid weights at cube " + std::to_string(cube));
  }
}

}  // namespace

Vec3 edge_crossing(double s_a, double s_b, const Vec3& xa, const Vec3& xb, double alpha_a,
                   double alpha_b) {
  if (!(s_a * s_b < 0.0))
    throw std::invalid_argument("edge_crossing: endpoint values must have opposite signs");
  if (!(alpha_a > 0.0 && alpha_b > 0.0))
    throw std::invalid_argument("edge_crossing: weights must be positive");
  const double a = alpha_a * std::abs(s_b);
  const double b = alpha_b * std::abs(s_a);
  return (a * xa + b * xb) / (a + b);
}

std::optional<Vec3> dual_vertex(const std::array<double, 8>& s,
                                const std::array<Vec3, 8>& xhat,
                                const std::array<double, 8>& alpha,
                                const std::array<double, 12>& beta) {
  std::array<double, 8> st;
  for (size_t c = 0; c < 8; ++c) st[c] = nudged(s[c]);
  bool any_neg = false, any_pos = false;
  for (double v : st) (v < 0.0 ? any_neg : any_pos) = true;
  if (!any_neg || !any_pos) return std::nullopt;
  Vec3 num = Vec3::Zero();
  double den = 0.0;
  int crossings = 0;
  for (int e = 0; e < 12; ++e) {
    const int a = kCubeEdges[e][0], b = kCubeEdges[e][1];
    if (st[static_cast<size_t>(a)] * st[static_cast<size_t>(b)] >= 0.0) continue;
    const Vec3 u = edge_crossing(st[static_cast<size_t>(a)], st[static_cast<size_t>(b)],
                                 xhat[static_cast<size_t>(a)], xhat[static_cast<size_t>(b)],
                                 alpha[static_cast<size_t>(a)], alpha[static_cast<size_t>(b)]);
    num += beta[e] * u;
    den += beta[e];
    ++crossings;
  }
  assert(crossings >= 3);  // sign-change parity on a cube
  return Vec3(num / den);
}

Extraction extract_mesh(const FlexiGrid& grid) {
  validate_grid(grid);
  const int r = grid.r;
  const long nv = grid.n_vertices();

  Vec st(nv);
  for (long v = 0; v < nv; ++v) st(v) = nudged(grid.s(v));

  Extraction ex;
  ex.r = r;
  std::vector<int> dual_of(static_cast<size_t>(grid.n_cubes()), -1);
  std::vector<Vec3> verts;
  TriMesh& mesh = ex.mesh;

  // Pass 1: one dual vertex per sign-mixed cube, in cube id order.
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        long corner_id[8];
        bool any_neg = false, any_pos = false;
        for (int c = 0; c < 8; ++c) {
          corner_id[c] = grid.vertex_id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));
          (st(corner_id[c]) < 0.0 ? any_neg : any_pos) = true;
        }
        if (!any_neg || !any_pos) continue;

        const long ci = grid.cube_id(i, j, k);
        const CubeWeights& w = grid.weights(ci);
        Vec3 xhat[8];
        for (int c = 0; c < 8; ++c)
          xhat[c] = grid.deformed_pos(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1));

        const int first = static_cast<int>(ex.crossings.size());
        Vec3 num = Vec3::Zero();
        double den = 0.0;
        for (int e = 0; e < 12; ++e) {
          const int a = kCubeEdges[e][0], b = kCubeEdges[e][1];
          if (st(corner_id[a]) * st(corner_id[b]) >= 0.0) continue;
          const Vec3 u = edge_crossing(st(corner_id[a]), st(corner_id[b]), xhat[a], xhat[b],
                                       w.alpha[static_cast<size_t>(a)],
                                       w.alpha[static_cast<size_t>(b)]);
          num += w.beta[static_cast<size_t>(e)] * u;
          den += w.beta[static_cast<size_t>(e)];
          ex.crossings.push_back({corner_id[a], corner_id[b], a, b, e, u});
        }
        const int n_cross = static_cast<int>(ex.crossings.size()) - first;
        assert(n_cross >= 3);

        const int vid = static_cast<int>(verts.size());
        verts.emplace_back(num / den);
        mesh.vertex_cell.push_back(ci);
        mesh.vertex_edge.push_back(-1);
        dual_of[static_cast<size_t>(ci)] = vid;
        ex.duals.push_back({ci, vid, first, n_cross});
      }
    }
  }

  // Pass 2: quads around interior sign-change edges, in (vertex id, axis)
  // order. Midpoint vertices append after all duals.
  std::vector<std::array<int, 3>>& tris = mesh.triangles;
  for (int k = 0; k <= r; ++k) {
    for (int j = 0; j <= r; ++j) {
      for (int i = 0; i <= r; ++i) {
        const int base[3] = {i, j, k};
        const long vb = grid.vertex_id(i, j, k);
        for (int axis = 0; axis < 3; ++axis) {
          if (base[axis] >= r) continue;
          const int ua = kPerp[axis][0], va = kPerp[axis][1];
          if (base[ua] < 1 || base[ua] > r - 1 || base[va] < 1 || base[va] > r - 1)
            continue;  // needs all 4 adjacent cells
          int end[3] = {i, j, k};
          end[axis] += 1;
          const long ve = grid.vertex_id(end[0], end[1], end[2]);
          if (st(vb) * st(ve) >= 0.0) continue;

          long ring_cube[4];
          int ring_dual[4];
          int owner_pos = 0;
          for (int q = 0; q < 4; ++q) {
            int cc[3] = {i, j, k};
            cc[ua] += kRing[q][0];
            cc[va] += kRing[q][1];
            ring_cube[q] = grid.cube_id(cc[0], cc[1], cc[2]);
            ring_dual[q] = dual_of[static_cast<size_t>(ring_cube[q])];
            assert(ring_dual[q] >= 0);
            if (ring_cube[q] < ring_cube[owner_pos]) owner_pos = q;
          }

          // Start the ring at the gamma owner; walk forward when the base
          // end is inside (normals face +axis = positive side), else
          // backward.
          const bool forward = st(vb) < 0.0;
          std::array<int, 4> vq;
          for (int q = 0; q < 4; ++q) {
            const int at = forward ? (owner_pos + q) % 4 : (owner_pos + 4 - q) % 4;
            vq[static_cast<size_t>(q)] = ring_dual[at];
          }

          const double gamma = grid.weights(ring_cube[owner_pos]).gamma;
          const Vec3 m = 0.5 * (gamma * (verts[static_cast<size_t>(vq[0])] +
                                         verts[static_cast<size_t>(vq[2])]) +
                                (1.0 - gamma) * (verts[static_cast<size_t>(vq[1])] +
                                                 verts[static_cast<size_t>(vq[3])]));
          const int mid = static_cast<int>(verts.size());
          verts.push_back(m);
          mesh.vertex_cell.push_back(-1);
          mesh.vertex_edge.push_back(3 * vb + axis);

          ex.quads.push_back({3 * vb + axis, ring_cube[owner_pos], vq, mid});
          tris.push_back({vq[0], vq[1], mid});
          tris.push_back({vq[1], vq[2], mid});
          tris.push_back({vq[2], vq[3], mid});
          tris.push_back({vq[3], vq[0], mid});
        }
      }
    }
  }

  mesh.vertices.resize(3, static_cast<Index>(verts.size()));
  for (size_t v = 0; v < verts.size(); ++v)
    mesh.vertices.col(static_cast<Index>(v)) = verts[v];
  return ex;
}

GridGrads extract_backward(const FlexiGrid& grid, const Extraction& ex,
                           const Mat& d_vertices) {
  if (ex.r != grid.r)
    throw std::invalid_argument("extract_backward: extraction belongs to another grid");
  if (d_vertices.rows() != 3 || d_vertices.cols() != ex.mesh.n_vertices())
    throw std::invalid_argument("extract_backward: gradient must be 3 x mesh vertices");

  const long nv = grid.n_vertices();
  GridGrads out;
  out.ds = Vec::Zero(nv);
  out.ddelta = Mat::Zero(3, nv);
  auto grad_cube = [&out](long cube) -> CubeWeights& {
    auto [it, inserted] = out.dcubes.try_emplace(cube, zero_weights());
    return it->second;
  };

  Mat g = d_vertices;

  // Quad midpoints first: they feed the four dual vertices and gamma.
  for (const Extraction::Quad& q : ex.quads) {
    const Vec3 gm = g.col(q.mid);
    const double gamma = grid.weights(q.owner_cube).gamma;
    g.col(q.v[0]) += (0.5 * gamma) * gm;
    g.col(q.v[2]) += (0.5 * gamma) * gm;
    g.col(q.v[1]) += (0.5 * (1.0 - gamma)) * gm;
    g.col(q.v[3]) += (0.5 * (1.0 - gamma)) * gm;
    const Vec3 diag = ex.mesh.vertices.col(q.v[0]) + ex.mesh.vertices.col(q.v[2]) -
                      ex.mesh.vertices.col(q.v[1]) - ex.mesh.vertices.col(q.v[3]);
    grad_cube(q.owner_cube).gamma += 0.5 * gm.dot(diag);
  }

  const int r1 = grid.r + 1;
  const auto vertex_coords = [r1](long vid, int& i, int& j, int& k) {
    i = static_cast<int>(vid % r1);
    j = static_cast<int>((vid / r1) % r1);
    k = static_cast<int>(vid / (static_cast<long>(r1) * r1));
  };

  for (const Extraction::Dual& d : ex.duals) {
    const Vec3 gv = g.col(d.mesh_vertex);
    const CubeWeights& w = grid.weights(d.cube);
    CubeWeights& gw = grad_cube(d.cube);
    const Vec3 vd = ex.mesh.vertices.col(d.mesh_vertex);

    double bsum = 0.0;
    for (int c = 0; c < d.n_crossings; ++c)
      bsum += w.beta[static_cast<size_t>(
          ex.crossings[static_cast<size_t>(d.first_crossing + c)].beta_slot)];

    for (int c = 0; c < d.n_crossings; ++c) {
      const Extraction::Crossing& cr =
          ex.crossings[static_cast<size_t>(d.first_crossing + c)];
      const double beta_e = w.beta[static_cast<size_t>(cr.beta_slot)];
      gw.beta[static_cast<size_t>(cr.beta_slot)] += gv.dot(cr.u - vd) / bsum;
      const Vec3 gu = (beta_e / bsum) * gv;

      const double sa = nudged(grid.s(cr.vert_a));
      const double sb = nudged(grid.s(cr.vert_b));
      const double alpha_a = w.alpha[static_cast<size_t>(cr.slot_a)];
      const double alpha_b = w.alpha[static_cast<size_t>(cr.slot_b)];
      const double a = alpha_a * std::abs(sb);
      const double b = alpha_b * std::abs(sa);
      const double sum = a + b;

      int ia, ja, ka, ib, jb, kb;
      vertex_coords(cr.vert_a, ia, ja, ka);
      vertex_coords(cr.vert_b, ib, jb, kb);
      const Vec3 xa = grid.deformed_pos(ia, ja, ka);
      const Vec3 xb = grid.deformed_pos(ib, jb, kb);

      const double da = gu.dot(xa - cr.u) / sum;
      const double db = gu.dot(xb - cr.u) / sum;
      gw.alpha[static_cast<size_t>(cr.slot_a)] += da * std::abs(sb);
      gw.alpha[static_cast<size_t>(cr.slot_b)] += db * std::abs(sa);
      out.ds(cr.vert_b) += da * alpha_a * abs_slope(grid.s(cr.vert_b));
      out.ds(cr.vert_a) += db * alpha_b * abs_slope(grid.s(cr.vert_a));
      out.ddelta.col(cr.vert_a) += (a / sum) * gu;
      out.ddelta.col(cr.vert_b) += (b / sum) * gu;
    }
  }
  return out;
}

}  // namespace mtk::flexi
