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

#include <cstdint>
#include <vector>

#include "mtk/ad/tape.hpp"
#include "mtk/common.hpp"

namespace mtk::field {

struct HashGridConfig {
  int levels = 8;
  int base_resolution = 16;   // N_0
  double growth = 1.3819;     // N_l = floor(N_0 * growth^l)
  int table_size = 1 << 14;   // max entries per level
  int features = 2;           // channels per entry

  void validate() const;
};

/// Multi-resolution feature grid over the unit cube. Coarse levels whose
/// lattice fits in the table ((N_l+1)^3 <= table_size, counting the closed
/// upper boundary) are stored densely and collision-free; finer levels hash
/// lattice coordinates into table_size slots.
///
/// The encoding of a point is the concatenation, coarse to fine, of the
/// trilinear interpolation of the 8 corner features of the cell containing
/// the point at each level. It is linear in the table entries.
class HashGrid {
 public:
  HashGrid(const HashGridConfig& cfg, uint64_t seed);

  const HashGridConfig& config() const { return cfg_; }
  int feature_dim() const { return cfg_.levels * cfg_.features; }
  int level_resolution(int level) const { return resolution_[static_cast<size_t>(level)]; }
  bool level_dense(int level) const { return dense_[static_cast<size_t>(level)]; }

  /// Table slot of lattice corner (i, j, k) at a level; i, j, k in [0, N_l].
  int slot(int level, int i, int j, int k) const;

  std::vector<Mat>& tables() { return tables_; }
  const std::vector<Mat>& tables() const { return tables_; }

  /// Per-level gather indices (8 x N) and trilinear weights for a batch of
  /// unit-cube points (3 x N). Coordinates are clamped to [0, 1]; at a cell
  /// corner the weights collapse to a one-hot.
  struct GatherPlan {
    std::vector<Eigen::MatrixXi> idx;
    std::vector<Mat> w;
  };
  GatherPlan plan(const Mat& unit_pts) const;

  /// Emits the encoding subgraph; table_ids are tape nodes holding the
  /// per-level tables. Returns the (levels*features) x N feature node.
  int encode_on_tape(ad::Tape& tape, const std::vector<int>& table_ids,
                     const GatherPlan& plan) const;

  /// Value-only path, bit-identical to the tape path.
  Mat encode(const Mat& unit_pts) const;

 private:
  HashGridConfig cfg_;
  std::vector<int> resolution_;
  std::vector<bool> dense_;
  std::vector<Mat> tables_;  // rows = slots, cols = features
};

}  // namespace mtk::field
