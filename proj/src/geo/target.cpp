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

#include "mtk/geo/target.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <utility>

#include "mtk/field/fit_sdf.hpp"

namespace mtk::geo {

namespace {

Vec3 unit_direction(Rng& rng) {
  while (true) {
    const Vec3 v(rng.normal(), rng.normal(), rng.normal());
    const double n = v.norm();
    if (n > 1e-12) return v / n;
  }
}

/// Orthonormal basis (u, v) perpendicular to a unit axis.
void perpendicular_frame(const Vec3& axis, Vec3& u, Vec3& v) {
  const Vec3 pick = std::abs(axis.x()) < 0.9 ? Vec3(1, 0, 0) : Vec3(0, 1, 0);
  u = axis.cross(pick).normalized();
  v = axis.cross(u);
}

}  // namespace

TargetShape make_sphere(double radius) {
  if (!(radius > 0.0)) throw ConfigError("sphere radius must be positive");
  TargetShape s;
  s.name = "sphere";
  s.sdf = [radius](const Vec3& p) { return p.norm() - radius; };
  s.sample_surface = [radius](Rng& rng) { return Vec3(radius * unit_direction(rng)); };
  return s;
}

TargetShape make_ellipsoid(const Vec3& semi_axes) {
  if (!(semi_axes.array() > 0.0).all())
    throw ConfigError("ellipsoid semi-axes must be positive");
  TargetShape s;
  s.name = "ellipsoid";
  const Vec3 r = semi_axes;
  s.sdf = [r](const Vec3& p) { return field::ellipsoid_sdf(p, r); };
  // Area-uniform: direction u on the unit sphere accepted with probability
  // proportional to the local area stretch |(bc u_x, ac u_y, ab u_z)|.
  const double g_max =
      std::max({r.y() * r.z(), r.x() * r.z(), r.x() * r.y()});
  s.sample_surface = [r, g_max](Rng& rng) {
    while (true) {
      const Vec3 u = unit_direction(rng);
      const Vec3 g(r.y() * r.z() * u.x(), r.x() * r.z() * u.y(), r.x() * r.y() * u.z());
      if (rng.uniform() * g_max <= g.norm()) return Vec3(r.cwiseProduct(u));
    }
  };
  return s;
}

TargetShape make_torus(double major, double minor) {
  if (!(major > 0.0 && minor > 0.0 && minor < major))
    throw ConfigError("torus requires 0 < minor < major");
  TargetShape s;
  s.name = "torus";
  s.sdf = [major, minor](const Vec3& p) {
    const double ring = std::hypot(p.x(), p.y()) - major;
    return std::hypot(ring, p.z()) - minor;
  };
  // Area element is proportional to major + minor cos(v); rejection on v
  // makes the sampling exactly area-uniform.
  s.sample_surface = [major, minor](Rng& rng) {
    while (true) {
      const double u = rng.uniform(0.0, 2.0 * M_PI);
      const double v = rng.uniform(0.0, 2.0 * M_PI);
      const double w = (major + minor * std::cos(v)) / (major + minor);
      if (rng.uniform() > w) continue;
      const double ring = major + minor * std::cos(v);
      return Vec3(ring * std::cos(u), ring * std::sin(u), minor * std::sin(v));
    }
  };
  return s;
}

TargetShape make_box(const Vec3& half_extent) {
  if (!(half_extent.array() > 0.0).all())
    throw ConfigError("box half extents must be positive");
  TargetShape s;
  s.name = "box";
  const Vec3 h = half_extent;
  s.sdf = [h](const Vec3& p) {
    const Vec3 q = p.cwiseAbs() - h;
    const double outside = q.cwiseMax(0.0).norm();
    const double inside = std::min(q.maxCoeff(), 0.0);
    return outside + inside;
  };
  s.sample_surface = [h](Rng& rng) {
    const double areas[3] = {h.y() * h.z(), h.x() * h.z(), h.x() * h.y()};
    const double total = areas[0] + areas[1] + areas[2];
    double pick = rng.uniform(0.0, total);
    int axis = 0;
    while (axis < 2 && pick >= areas[axis]) pick -= areas[axis], ++axis;
    Vec3 p(rng.uniform(-h.x(), h.x()), rng.uniform(-h.y(), h.y()),
           rng.uniform(-h.z(), h.z()));
    p(axis) = rng.uniform() < 0.5 ? -h(axis) : h(axis);
    return p;
  };
  return s;
}

TargetShape make_capsule(const Vec3& a, const Vec3& b, double radius) {
  if (!(radius > 0.0)) throw ConfigError("capsule radius must be positive");
  if ((b - a).norm() < 1e-12) throw ConfigError("capsule endpoints must differ");
  TargetShape s;
  s.name = "capsule";
  s.sdf = [a, b, radius](const Vec3& p) {
    const Vec3 pa = p - a, ba = b - a;
    const double t = std::clamp(pa.dot(ba) / ba.squaredNorm(), 0.0, 1.0);
    return (pa - t * ba).norm() - radius;
  };
  s.sample_surface = [a, b, radius](Rng& rng) {
    const Vec3 ba = b - a;
    const double len = ba.norm();
    const Vec3 axis = ba / len;
    const double side_area = 2.0 * M_PI * radius * len;
    const double cap_area = 4.0 * M_PI * radius * radius;  // both hemispheres
    if (rng.uniform(0.0, side_area + cap_area) < side_area) {
      Vec3 u, v;
      perpendicular_frame(axis, u, v);
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const double t = rng.uniform();
      return Vec3(a + t * ba + radius * (std::cos(phi) * u + std::sin(phi) * v));
    }
    Vec3 dir = unit_direction(rng);
    const double along = dir.dot(axis);
    // Flip into the outward hemisphere of a randomly chosen end.
    if (rng.uniform() < 0.5) {
      if (along > 0.0) dir -= 2.0 * along * axis;
      return Vec3(a + radius * dir);
    }
    if (along < 0.0) dir -= 2.0 * along * axis;
    return Vec3(b + radius * dir);
  };
  return s;
}

namespace {

TargetShape make_composite(const std::string& tag, TargetShape a, TargetShape b,
                           std::function<double(double, double)> combine) {
  TargetShape s;
  s.name = tag + "(" + a.name + "," + b.name + ")";
  const auto sdf_a = a.sdf, sdf_b = b.sdf;
  s.sdf = [sdf_a, sdf_b, combine](const Vec3& p) { return combine(sdf_a(p), sdf_b(p)); };
  const auto sample_a = a.sample_surface, sample_b = b.sample_surface;
  const auto composite_sdf = s.sdf;
  s.sample_surface = [sample_a, sample_b, composite_sdf](Rng& rng) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const Vec3 p = rng.uniform() < 0.5 ? sample_a(rng) : sample_b(rng);
      if (std::abs(composite_sdf(p)) < 1e-9) return p;
    }
    throw NumericalError("composite target has no reachable surface");
  };
  return s;
}

}  // namespace

TargetShape shape_union(TargetShape a, TargetShape b) {
  return make_composite("union", std::move(a), std::move(b),
                        [](double x, double y) { return std::min(x, y); });
}

TargetShape shape_intersection(TargetShape a, TargetShape b) {
  return make_composite("intersection", std::move(a), std::move(b),
                        [](double x, double y) { return std::max(x, y); });
}

TargetShape shape_difference(TargetShape a, TargetShape b) {
  return make_composite("difference", std::move(a), std::move(b),
                        [](double x, double y) { return std::max(x, -y); });
}

std::function<Vec3(const Vec3&)> constant_color(const Vec3& rgb) {
  const Vec3 c = rgb.cwiseMax(0.0).cwiseMin(1.0);
  return [c](const Vec3&) { return c; };
}

std::function<Vec3(const Vec3&)> axis_gradient_color(const BoundingBox& box) {
  const Vec3 lo = box.lo;
  const Vec3 inv_extent = box.extent().cwiseInverse();
  return [lo, inv_extent](const Vec3& p) {
    return Vec3(((p - lo).cwiseProduct(inv_extent)).cwiseMax(0.0).cwiseMin(1.0));
  };
}

void check_inside_box(const TargetShape& shape, const BoundingBox& box, uint64_t seed,
                      int n_probes) {
  box.validate();
  const Vec3 center = 0.5 * (box.lo + box.hi);
  const Vec3 limit = 0.45 * box.extent();  // 90% of the half extent
  Rng rng(Rng::derive(seed, "inside-box-probe"));
  for (int i = 0; i < n_probes; ++i) {
    const Vec3 p = shape.sample_surface(rng) - center;
    if (!(p.cwiseAbs().array() < limit.array()).all())
      throw ConfigError("target surface leaves the inner 90% of the domain box: " +
                        shape.name);
  }
}

}  // namespace mtk::geo
