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

#include <Eigen/Core>
#include <stdexcept>
#include <string>

namespace mtk {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Vec3 = Eigen::Vector3d;
using Index = Eigen::Index;

/// Malformed run configuration or unreadable input. CLI maps this to exit 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite values or divergence during optimization. CLI maps this to exit 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Axis-aligned cubical domain box. All fields/grids in this project live in one.
struct BoundingBox {
  Vec3 lo{-1.0, -1.0, -1.0};
  Vec3 hi{1.0, 1.0, 1.0};

  Vec3 extent() const { return hi - lo; }

  /// Edge length of one cell at grid resolution r (cubical boxes only).
  double cell_edge(int r) const { return (hi.x() - lo.x()) / static_cast<double>(r); }

  bool cubical(double tol = 1e-12) const {
    const Vec3 e = extent();
    return std::abs(e.x() - e.y()) <= tol && std::abs(e.x() - e.z()) <= tol;
  }

  void validate() const {
    if (!(lo.array() < hi.array()).all())
      throw ConfigError("bounding box must have lo < hi on every axis");
    if (!cubical()) throw ConfigError("bounding box must be cubical");
  }
};

}  // namespace mtk
