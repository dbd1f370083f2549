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

#include "mtk/raster/camera.hpp"

#include <Eigen/Geometry>

namespace mtk::raster {

void Camera::validate() const {
  if (width < 1 || height < 1)
    throw ConfigError("camera image dimensions must be positive, got " +
                      std::to_string(width) + "x" + std::to_string(height));
  if (!position.allFinite() || !look_at.allFinite() || !up.allFinite())
    throw ConfigError("camera placement contains non-finite values");
  const Vec3 view = look_at - position;
  if (view.norm() == 0.0)
    throw ConfigError("camera position and look-at point coincide");
  if (view.normalized().cross(up).norm() < 1e-12)
    throw ConfigError("camera up vector is parallel to the view direction");
  if (mode == CameraMode::kPinhole) {
    if (!(vfov_deg > 0.0 && vfov_deg < 180.0))
      throw ConfigError("pinhole field of view must lie in (0, 180) degrees");
  } else {
    if (!(half_extent > 0.0))
      throw ConfigError("orthographic half-extent must be positive");
  }
}

Eigen::Matrix3d Camera::basis() const {
  const Vec3 forward = (look_at - position).normalized();
  const Vec3 right = forward.cross(up).normalized();
  const Vec3 true_up = right.cross(forward);
  Eigen::Matrix3d b;
  b.row(0) = right;
  b.row(1) = true_up;
  b.row(2) = -forward;
  return b;
}

}  // namespace mtk::raster
