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

#include "mtk/raster/render.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

namespace mtk::raster {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double cross2(double ux, double uy, double vx, double vy) {
  return ux * vy - uy * vx;
}

}  // namespace

RenderTarget render(const flexi::TriMesh& mesh, const Camera& camera,
                    const field::TextureField* tex) {
  camera.validate();
  const int w = camera.width;
  const int h = camera.height;
  const long n_pixels = static_cast<long>(w) * h;
  RenderTarget target;
  target.width = w;
  target.height = h;
  target.mask = Mat::Zero(h, w);
  target.depth = Mat::Constant(h, w, kInf);
  target.normal = Mat::Zero(3, n_pixels);
  if (tex != nullptr) target.rgb = Mat::Zero(3, n_pixels);
  if (mesh.empty()) return target;

  const Eigen::Matrix3d basis = camera.basis();
  const bool pinhole = camera.mode == CameraMode::kPinhole;
  const double aspect = static_cast<double>(w) / h;
  const double tan_half =
      std::tan(0.5 * camera.vfov_deg * std::numbers::pi / 180.0);

  const long nv = mesh.n_vertices();
  const Mat cam = basis * (mesh.vertices.colwise() - camera.position);
  const Mat normals = flexi::vertex_normals(mesh);

  std::vector<double> sx(static_cast<size_t>(nv)), sy(sx.size()), vdepth(sx.size());
  for (long v = 0; v < nv; ++v) {
    const double d = -cam(2, v);  // distance along the view axis
    vdepth[static_cast<size_t>(v)] = d;
    double nx, ny;
    if (pinhole) {
      nx = d > 0.0 ? cam(0, v) / (d * tan_half * aspect) : 0.0;
      ny = d > 0.0 ? cam(1, v) / (d * tan_half) : 0.0;
    } else {
      nx = cam(0, v) / (camera.half_extent * aspect);
      ny = cam(1, v) / camera.half_extent;
    }
    sx[static_cast<size_t>(v)] = (nx + 1.0) * 0.5 * w;
    sy[static_cast<size_t>(v)] = (1.0 - ny) * 0.5 * h;
  }

  struct Hit {
    long tri = -1;
    double wa = 0.0, wb = 0.0, wc = 0.0;  // attribute weights at the pixel
  };
  std::vector<Hit> hits(static_cast<size_t>(n_pixels));

  for (long t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[static_cast<size_t>(t)];
    const size_t a = static_cast<size_t>(tri[0]);
    const size_t b = static_cast<size_t>(tri[1]);
    const size_t c = static_cast<size_t>(tri[2]);
    // Triangles touching the eye plane are dropped rather than clipped;
    // evaluation cameras are expected to stand clear of the surface.
    if (pinhole && (vdepth[a] <= 1e-9 || vdepth[b] <= 1e-9 || vdepth[c] <= 1e-9))
      continue;
    const double area =
        cross2(sx[b] - sx[a], sy[b] - sy[a], sx[c] - sx[a], sy[c] - sy[a]);
    if (std::abs(area) < 1e-18) continue;

    const double min_x = std::min({sx[a], sx[b], sx[c]});
    const double max_x = std::max({sx[a], sx[b], sx[c]});
    const double min_y = std::min({sy[a], sy[b], sy[c]});
    const double max_y = std::max({sy[a], sy[b], sy[c]});
    const int x0 = std::max(0, static_cast<int>(std::floor(min_x - 0.5)));
    const int x1 = std::min(w - 1, static_cast<int>(std::ceil(max_x - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::floor(min_y - 0.5)));
    const int y1 = std::min(h - 1, static_cast<int>(std::ceil(max_y - 0.5)));

    for (int r = y0; r <= y1; ++r) {
      const double py = r + 0.5;
      for (int col = x0; col <= x1; ++col) {
        const double px = col + 0.5;
        const double ea = cross2(sx[c] - sx[b], sy[c] - sy[b], px - sx[b], py - sy[b]);
        const double eb = cross2(sx[a] - sx[c], sy[a] - sy[c], px - sx[c], py - sy[c]);
        const double ec = cross2(sx[b] - sx[a], sy[b] - sy[a], px - sx[a], py - sy[a]);
        const bool inside = (ea >= 0.0 && eb >= 0.0 && ec >= 0.0) ||
                            (ea <= 0.0 && eb <= 0.0 && ec <= 0.0);
        if (!inside) continue;
        const double wa = ea / area;
        const double wb = eb / area;
        const double wc = ec / area;
        double depth, ka, kb, kc;
        if (pinhole) {
          const double inv =
              wa / vdepth[a] + wb / vdepth[b] + wc / vdepth[c];
          depth = 1.0 / inv;
          ka = wa / vdepth[a] * depth;
          kb = wb / vdepth[b] * depth;
          kc = wc / vdepth[c] * depth;
        } else {
          depth = wa * vdepth[a] + wb * vdepth[b] + wc * vdepth[c];
          ka = wa;
          kb = wb;
          kc = wc;
        }
        // strict test: equal depth keeps the earlier (lower-index) triangle
        if (!(depth < target.depth(r, col))) continue;
        target.depth(r, col) = depth;
        target.mask(r, col) = 1.0;
        Hit& hit = hits[static_cast<size_t>(r) * w + col];
        hit.tri = t;
        hit.wa = ka;
        hit.wb = kb;
        hit.wc = kc;
      }
    }
  }

  std::vector<long> covered;
  for (long p = 0; p < n_pixels; ++p)
    if (hits[static_cast<size_t>(p)].tri >= 0) covered.push_back(p);

  Mat pts, nrm, views;
  if (tex != nullptr) {
    pts.resize(3, static_cast<long>(covered.size()));
    nrm.resize(3, static_cast<long>(covered.size()));
    views.resize(3, static_cast<long>(covered.size()));
  }
  for (size_t i = 0; i < covered.size(); ++i) {
    const long p = covered[i];
    const Hit& hit = hits[static_cast<size_t>(p)];
    const auto& tri = mesh.triangles[static_cast<size_t>(hit.tri)];
    Vec3 nw = hit.wa * normals.col(tri[0]) + hit.wb * normals.col(tri[1]) +
              hit.wc * normals.col(tri[2]);
    if (nw.norm() < 1e-12) {  // degenerate fan: fall back to the face normal
      const Vec3 e0 = mesh.vertices.col(tri[1]) - mesh.vertices.col(tri[0]);
      const Vec3 e1 = mesh.vertices.col(tri[2]) - mesh.vertices.col(tri[0]);
      nw = e0.cross(e1);
    }
    const double norm = nw.norm();
    if (norm > 0.0) nw /= norm;
    target.normal.col(p) = basis * nw;
    if (tex != nullptr) {
      const Vec3 pw = hit.wa * mesh.vertices.col(tri[0]) +
                      hit.wb * mesh.vertices.col(tri[1]) +
                      hit.wc * mesh.vertices.col(tri[2]);
      pts.col(static_cast<long>(i)) = pw;
      nrm.col(static_cast<long>(i)) = nw;
      views.col(static_cast<long>(i)) =
          pinhole ? Vec3((camera.position - pw).normalized())
                  : Vec3(basis.row(2).transpose());
    }
  }
  if (tex != nullptr && !covered.empty()) {
    const Mat rgb = tex->eval(pts, nrm, views);
    for (size_t i = 0; i < covered.size(); ++i)
      target.rgb.col(covered[i]) =
          rgb.col(static_cast<long>(i)).cwiseMax(0.0).cwiseMin(1.0);
  }
  return target;
}

double psnr(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ConfigError("psnr needs same-shape images, got " +
                      std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                      " vs " + std::to_string(b.rows()) + "x" +
                      std::to_string(b.cols()));
  if (a.size() == 0) throw ConfigError("psnr of empty images");
  const double mse = (a - b).array().square().mean();
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, -10.0 * std::log10(mse));
}

Mat depth_to_unit(const Mat& depth) {
  double lo = kInf;
  double hi = -kInf;
  for (long c = 0; c < depth.cols(); ++c)
    for (long r = 0; r < depth.rows(); ++r)
      if (std::isfinite(depth(r, c))) {
        lo = std::min(lo, depth(r, c));
        hi = std::max(hi, depth(r, c));
      }
  Mat out = Mat::Ones(depth.rows(), depth.cols());
  if (!(lo <= hi)) return out;  // no finite entries
  const double span = hi - lo;
  for (long c = 0; c < depth.cols(); ++c)
    for (long r = 0; r < depth.rows(); ++r)
      if (std::isfinite(depth(r, c)))
        out(r, c) = span > 0.0 ? (depth(r, c) - lo) / span : 0.0;
  return out;
}

}  // namespace mtk::raster
