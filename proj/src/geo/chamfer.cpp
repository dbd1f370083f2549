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

#include "mtk/geo/chamfer.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace mtk::geo {

namespace {

/// Uniform-cell index over a point set for nearest-neighbor queries.
/// Queries expand Chebyshev rings of cells around the query (clamped into
/// the occupied box) until the best distance proves itself against the next
/// ring's lower bound; the ring count is capped by the occupied box span, so
/// far-away queries degrade to a scan of the point set, never to a hang.
class PointCells {
 public:
  explicit PointCells(const Mat& pts) : pts_(&pts) {
    lo_ = pts.rowwise().minCoeff();
    const Vec3 hi = pts.rowwise().maxCoeff();
    const double diag = (hi - lo_).norm();
    cell_ = std::max(diag / std::cbrt(static_cast<double>(pts.cols())), 1e-9);
    cells_.reserve(static_cast<size_t>(pts.cols()));
    for (Index i = 0; i < pts.cols(); ++i) {
      const std::array<long, 3> c = coord(pts.col(i));
      for (int a = 0; a < 3; ++a) max_cell_[a] = std::max(max_cell_[a], c[a]);
      cells_[key(c)].push_back(static_cast<int>(i));
    }
    span_ = std::max({max_cell_[0], max_cell_[1], max_cell_[2]}) + 1;
  }

  double nearest_dist(const Vec3& q) const {
    const std::array<long, 3> qc = coord(q);
    std::array<long, 3> c;
    long off = 0;  // Chebyshev cell distance from q to the occupied box
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(qc[a], 0L, max_cell_[a]);
      off = std::max(off, std::abs(qc[a] - c[a]));
    }
    double best_sq = std::numeric_limits<double>::infinity();
    for (long ring = 0; ring <= span_; ++ring) {
      if (std::isfinite(best_sq)) {
        const double bound = static_cast<double>(ring - off - 1) * cell_;
        if (bound > 0.0 && bound * bound >= best_sq) break;
      }
      visit_ring(c, ring, [&](const std::array<long, 3>& cc) {
        const auto it = cells_.find(key(cc));
        if (it == cells_.end()) return;
        for (int i : it->second)
          best_sq = std::min(best_sq, (pts_->col(i) - q).squaredNorm());
      });
    }
    return std::sqrt(best_sq);
  }

 private:
  std::array<long, 3> coord(const Vec3& p) const {
    return {static_cast<long>(std::floor((p.x() - lo_.x()) / cell_)),
            static_cast<long>(std::floor((p.y() - lo_.y()) / cell_)),
            static_cast<long>(std::floor((p.z() - lo_.z()) / cell_))};
  }
  static uint64_t key(const std::array<long, 3>& c) {
    const auto u = [](long v) { return static_cast<uint64_t>(v + (1L << 20)) & 0x1fffff; };
    return (u(c[0]) << 42) | (u(c[1]) << 21) | u(c[2]);
  }
  template <typename F>
  static void visit_ring(const std::array<long, 3>& c, long ring, F&& f) {
    if (ring == 0) {
      f(c);
      return;
    }
    for (long dx = -ring; dx <= ring; ++dx) {
      for (long dy = -ring; dy <= ring; ++dy) {
        for (long dz = -ring; dz <= ring; ++dz) {
          if (std::max({std::abs(dx), std::abs(dy), std::abs(dz)}) != ring) continue;
          f(std::array<long, 3>{c[0] + dx, c[1] + dy, c[2] + dz});
        }
      }
    }
  }

  const Mat* pts_;
  Vec3 lo_;
  double cell_ = 1.0;
  std::array<long, 3> max_cell_{0, 0, 0};
  long span_ = 1;
  std::unordered_map<uint64_t, std::vector<int>> cells_;
};

void directed_distances(const Mat& from, const PointCells& to, std::vector<double>& out) {
  for (Index i = 0; i < from.cols(); ++i) out.push_back(to.nearest_dist(from.col(i)));
}

}  // namespace

Mat sample_mesh_surface(const flexi::TriMesh& mesh, int n, Rng& rng) {
  if (mesh.empty()) throw std::invalid_argument("sample_mesh_surface: mesh is empty");
  if (n < 1) throw std::invalid_argument("sample_mesh_surface: need n >= 1");

  std::vector<double> cum_area;
  cum_area.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 e0 = mesh.vertices.col(t[1]) - mesh.vertices.col(t[0]);
    const Vec3 e1 = mesh.vertices.col(t[2]) - mesh.vertices.col(t[0]);
    total += 0.5 * e0.cross(e1).norm();
    cum_area.push_back(total);
  }
  if (!(total > 0.0)) throw std::invalid_argument("sample_mesh_surface: zero surface area");

  Mat out(3, n);
  for (int i = 0; i < n; ++i) {
    const double pick = rng.uniform(0.0, total);
    const size_t ti = static_cast<size_t>(
        std::lower_bound(cum_area.begin(), cum_area.end(), pick) - cum_area.begin());
    const auto& t = mesh.triangles[std::min(ti, mesh.triangles.size() - 1)];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const double u = 1.0 - r1, v = r2 * r1;
    out.col(i) = u * mesh.vertices.col(t[0]) + v * mesh.vertices.col(t[1]) +
                 (1.0 - u - v) * mesh.vertices.col(t[2]);
  }
  return out;
}

ChamferResult chamfer_points(const Mat& a, const Mat& b) {
  if (a.rows() != 3 || b.rows() != 3 || a.cols() < 1 || b.cols() < 1)
    throw std::invalid_argument("chamfer_points: point sets must be 3 x n, n >= 1");
  const PointCells cells_a(a);
  const PointCells cells_b(b);
  std::vector<double> dists;
  dists.reserve(static_cast<size_t>(a.cols() + b.cols()));
  directed_distances(a, cells_b, dists);
  const double mean_ab =
      std::accumulate(dists.begin(), dists.end(), 0.0) / static_cast<double>(a.cols());
  const size_t split = dists.size();
  directed_distances(b, cells_a, dists);
  const double mean_ba = std::accumulate(dists.begin() + static_cast<long>(split),
                                         dists.end(), 0.0) /
                         static_cast<double>(b.cols());

  ChamferResult res;
  res.chamfer_l1 = 0.5 * (mean_ab + mean_ba);
  const size_t rank = static_cast<size_t>(
      std::ceil(0.95 * static_cast<double>(dists.size()))) - 1;
  std::nth_element(dists.begin(), dists.begin() + static_cast<long>(rank), dists.end());
  res.hausdorff95 = dists[rank];
  return res;
}

ChamferResult chamfer(const flexi::TriMesh& mesh, const TargetShape& target, int n_samples,
                      uint64_t seed) {
  if (mesh.empty()) throw std::invalid_argument("chamfer: mesh is empty");
  if (n_samples < 1) throw std::invalid_argument("chamfer: need n_samples >= 1");
  Rng mesh_rng(Rng::derive(seed, "mesh-samples"));
  Rng target_rng(Rng::derive(seed, "target-samples"));
  const Mat a = sample_mesh_surface(mesh, n_samples, mesh_rng);
  Mat b(3, n_samples);
  for (int i = 0; i < n_samples; ++i) b.col(i) = target.sample_surface(target_rng);
  return chamfer_points(a, b);
}

}  // namespace mtk::geo
