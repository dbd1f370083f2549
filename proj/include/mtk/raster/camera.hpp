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

#include "mtk/common.hpp"

namespace mtk::raster {

enum class CameraMode { kOrthographic, kPinhole };

/// Viewpoint for the evaluation renderer. The camera looks from position
/// toward look_at. half_extent is the vertical half-height of the
/// orthographic view volume; vfov_deg the vertical field of view of the
/// pinhole model. Horizontal extents scale with the aspect ratio w/h.
struct Camera {
  CameraMode mode = CameraMode::kOrthographic;
  Vec3 position{0.0, 0.0, 2.5};
  Vec3 look_at{0.0, 0.0, 0.0};
  Vec3 up{0.0, 1.0, 0.0};
  int width = 256;
  int height = 256;
  double half_extent = 1.0;
  double vfov_deg = 45.0;

  void validate() const;

  /// Orthonormal rows: right, true up, toward the viewer. Camera space is
  /// x right, y up, z out of the screen; visible points have z < 0.
  Eigen::Matrix3d basis() const;
};

}  // namespace mtk::raster
