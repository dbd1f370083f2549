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

#include <functional>
#include <string>

#include "mtk/common.hpp"
#include "mtk/rng.hpp"

namespace mtk::geo {

/// Analytic supervision target: exact signed distance (negative inside),
/// an exact surface point sampler, and an optional surface color.
/// Primitive distances are exact (1-Lipschitz); min/max composites are
/// conservative inside overlaps, exact on the visible surface.
struct TargetShape {
  std::string name;
  std::function<double(const Vec3&)> sdf;
  std::function<Vec3(Rng&)> sample_surface;  // area-uniform for primitives
  std::function<Vec3(const Vec3&)> color;    // empty when untextured
};

TargetShape make_sphere(double radius);
TargetShape make_ellipsoid(const Vec3& semi_axes);
/// Torus around the z axis.
TargetShape make_torus(double major, double minor);
TargetShape make_box(const Vec3& half_extent);
TargetShape make_capsule(const Vec3& a, const Vec3& b, double radius);

/// Composites via min/max; surface samples come from the children filtered
/// to the composite boundary.
TargetShape shape_union(TargetShape a, TargetShape b);
TargetShape shape_intersection(TargetShape a, TargetShape b);
TargetShape shape_difference(TargetShape a, TargetShape b);

/// Color helpers for texture supervision.
std::function<Vec3(const Vec3&)> constant_color(const Vec3& rgb);
/// Position mapped affinely to RGB in [0, 1] over the box.
std::function<Vec3(const Vec3&)> axis_gradient_color(const BoundingBox& box);

/// Probes surface samples; throws ConfigError unless the zero level set
/// stays strictly inside 90% of the box on every axis.
void check_inside_box(const TargetShape& shape, const BoundingBox& box,
                      uint64_t seed = 0, int n_probes = 2048);

}  // namespace mtk::geo
