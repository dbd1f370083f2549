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

#include <string>
#include <vector>

#include "mtk/field/fit_sdf.hpp"
#include "mtk/flexi/extract.hpp"
#include "mtk/geo/chamfer.hpp"
#include "mtk/geo/target.hpp"

namespace mtk::geo {

struct FitStage {
  int resolution = 64;
  int iters = 5000;
  double w_sdf = 1.0;
  double w_eik = 0.1;
};

/// Coarse-to-fine plan. Stage resolutions must be non-decreasing and no
/// stage may exceed the network's configured resolution.
struct FitSchedule {
  std::vector<FitStage> stages{{64, 5000, 1.0, 0.1}, {128, 5000, 1.0, 0.1}};
  int batch = 4096;
  double lr_mlp = 1e-3;
  double lr_table = 1e-2;
  int chamfer_every = 250;  // loss-log chamfer cadence; <= 0 disables
  int chamfer_samples = 4096;

  void validate() const;
};

struct LossRow {
  long iter = 0;
  int stage = 0;
  double total = 0.0;
  double sdf = 0.0;
  double eik = 0.0;
  double chamfer = -1.0;  // < 0 renders as an empty CSV field
};

struct FitReport {
  std::vector<LossRow> log;
  std::vector<double> stage_chamfer;  // end-of-stage chamfer-L1
  double final_chamfer = -1.0;
  double final_hausdorff95 = -1.0;
};

/// "iter,stage,loss_total,loss_sdf,loss_eik,chamfer" rows; negative chamfer
/// becomes an empty field.
void write_loss_csv(const std::string& path, const std::vector<LossRow>& rows);

/// Full-grid field evaluation: s and offsets at every lattice vertex, cube
/// weights at the centers of sign-mixed cells. The network's offset scale is
/// pinned to `resolution` for the call.
flexi::FlexiGrid field_to_grid(field::SdfNetwork& net, int resolution);

/// Same grid for fields whose zero set is confined to a band resolvable at
/// quarter resolution (margin 1.5x the coarse cell diagonal): the network is
/// evaluated inside the band only, vertices outside take coarse-interpolated
/// values and zero offsets. Falls back to the full evaluation for small
/// grids.
flexi::FlexiGrid field_to_grid_banded(field::SdfNetwork& net, int resolution);

/// Coarse-to-fine fit of the field against the target's signed distance:
/// per stage, minimizes w_sdf * mean|s - sdf*| + w_eik * (eikonal residual)
/// over seeded sample batches. The loss log carries a chamfer probe every
/// chamfer_every iterations.
FitReport fit_geometry(field::SdfNetwork& net, const TargetShape& target,
                       const FitSchedule& schedule, uint64_t seed);

/// Fits by extracting a mesh each iteration and minimizing mean |sdf*(v)|
/// over its vertices, with gradients chained through the extraction into the
/// network. Requires a warm start whose extraction is non-empty; aborts if
/// extraction ever becomes empty.
FitReport fit_surface_mode(field::SdfNetwork& net, const TargetShape& target,
                           const FitSchedule& schedule, uint64_t seed);

/// Fits the color field to a target surface color over barycentric mesh
/// samples (view direction = outward normal). Log rows carry the MSE in the
/// total column.
FitReport fit_texture(field::TextureField& tex, const flexi::TriMesh& mesh,
                      const std::function<Vec3(const Vec3&)>& target_color, int iters,
                      uint64_t seed, double lr_mlp = 1e-3, double lr_table = 1e-2);

struct AblationResult {
  int encoded_iters = -1;   // iterations until chamfer < threshold; -1 = never
  int baseline_iters = -1;
  double threshold = 0.0;   // 2 * cell edge
};

/// Sphere-fit race between the hash-encoded network and directly trainable
/// grid arrays (values, offsets, cube weights as raw parameters) under the
/// same sample stream shape, loss, and Adam settings. Chamfer is probed
/// every probe_every iterations.
AblationResult ablation_sphere(double radius, int resolution, int max_iters,
                               int probe_every, uint64_t seed);

}  // namespace mtk::geo
