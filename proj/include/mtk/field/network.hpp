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

#include <vector>

#include "mtk/ad/tape.hpp"
#include "mtk/common.hpp"
#include "mtk/field/hash_grid.hpp"
#include "mtk/rng.hpp"

namespace mtk::field {

struct Linear {
  Mat w;
  Mat b;
};

/// One trainable buffer plus its optimizer grouping. Lookup tables train at a
/// faster rate than dense layers.
struct ParamRef {
  Mat* value;
  bool table;
};

struct SdfNetworkConfig {
  HashGridConfig grid;
  int hidden = 64;
  double offset_bound = 0.45;  // per-axis offset cap, in cell edges; must stay < 0.5
  BoundingBox domain;
  int resolution = 64;  // grid resolution the offsets are scaled for

  void validate() const;
};

/// Hash-grid-encoded field over the domain box with two heads sharing the
/// encoding:
///  - vertex head (skip MLP): point -> (sdf s, offset delta in R^3). The
///    offset is tanh-bounded per axis to offset_bound * cell_edge so that a
///    deformed grid vertex can never cross a neighboring one.
///  - cube head (same trunk shape): cube center -> 21 raw values activated to
///    alpha in R^8_+ (softplus + 1e-3), beta in R^12_+ (softplus + 1e-3),
///    gamma in (0,1) (sigmoid).
class SdfNetwork {
 public:
  SdfNetwork(const SdfNetworkConfig& cfg, uint64_t seed);

  const SdfNetworkConfig& config() const { return cfg_; }
  const HashGrid& grid() const { return grid_; }
  HashGrid& grid() { return grid_; }

  int resolution() const { return cfg_.resolution; }
  void set_resolution(int r);
  /// Edge length of one grid cell at the current resolution.
  double cell_edge() const { return cfg_.domain.cell_edge(cfg_.resolution); }
  /// Maximum per-axis offset magnitude (offset_bound * cell_edge).
  double offset_scale() const { return cfg_.offset_bound * cell_edge(); }

  /// Trainable buffers in a stable order (grid tables, then vertex head
  /// layers, then cube head layers). Checkpoints serialize this order.
  std::vector<ParamRef> params();

  /// Registers every parameter as a tape input; ids align with params().
  std::vector<int> stage(ad::Tape& tape) const;

  struct VertexNodes {
    int s;           // 1 x N
    int delta;       // 3 x N, activation-bounded and scaled to domain units
    int delta_unit;  // 3 x N, tanh(raw) in (-1, 1)
  };
  VertexNodes build_vertex(ad::Tape& tape, const std::vector<int>& param_ids,
                           const Mat& domain_pts) const;

  struct CubeNodes {
    int alpha;  // 8 x N, > 0
    int beta;   // 12 x N, > 0
    int gamma;  // 1 x N, in (0, 1)
  };
  CubeNodes build_cube(ad::Tape& tape, const std::vector<int>& param_ids,
                       const Mat& domain_pts) const;

  /// Value-only evaluation, bit-identical to the tape path.
  /// Rows: s, delta_x, delta_y, delta_z (delta in domain units).
  Mat eval_vertex(const Mat& domain_pts) const;
  /// Rows: alpha (8), beta (12), gamma (1), activations applied.
  Mat eval_cube(const Mat& domain_pts) const;

  /// Single-point convenience wrapper around eval_vertex.
  void sdf_eval(const Vec3& p, double& s, Vec3& delta) const;

 private:
  Mat to_unit(const Mat& domain_pts) const;

  SdfNetworkConfig cfg_;
  HashGrid grid_;
  Linear v1_, v2_, v3_;  // vertex head: enc -> h -> [h ; enc] -> h -> 4
  Linear c1_, c2_, c3_;  // cube head: same trunk shape -> 21
};

struct TextureFieldConfig {
  HashGridConfig grid;
  int hidden = 256;
  BoundingBox domain;

  void validate() const;
};

/// Surface color field: encoded position concatenated with the surface
/// normal and view direction, through a three-layer MLP, sigmoid-bounded RGB.
class TextureField {
 public:
  TextureField(const TextureFieldConfig& cfg, uint64_t seed);

  const TextureFieldConfig& config() const { return cfg_; }
  const HashGrid& grid() const { return grid_; }

  std::vector<ParamRef> params();
  std::vector<int> stage(ad::Tape& tape) const;

  /// RGB node (3 x N). Normals and view directions must be unit length.
  int build(ad::Tape& tape, const std::vector<int>& param_ids, const Mat& domain_pts,
            const Mat& normals, const Mat& view_dirs) const;

  /// Value-only path; componentwise in [0, 1].
  Mat eval(const Mat& domain_pts, const Mat& normals, const Mat& view_dirs) const;

 private:
  TextureFieldConfig cfg_;
  HashGrid grid_;
  Linear l1_, l2_, l3_;
};

/// Deterministic uniform Xavier-style layer init; bias zero.
Linear make_linear(int out_dim, int in_dim, Rng& rng);

}  // namespace mtk::field
