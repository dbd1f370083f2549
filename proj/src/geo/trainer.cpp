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

#include "mtk/geo/trainer.hpp"

#include <Eigen/Geometry>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mtk/ad/adam.hpp"

namespace mtk::geo {

namespace {

double nudged(double s) { return std::abs(s) < 1e-8 ? 1e-8 : s; }

struct ResolutionGuard {
  field::SdfNetwork& net;
  int saved;
  ResolutionGuard(field::SdfNetwork& n, int r) : net(n), saved(n.resolution()) {
    net.set_resolution(r);
  }
  ~ResolutionGuard() { net.set_resolution(saved); }
};

void cube_coords(const flexi::FlexiGrid& grid, long cube, int& i, int& j, int& k) {
  i = static_cast<int>(cube % grid.r);
  j = static_cast<int>((cube / grid.r) % grid.r);
  k = static_cast<int>(cube / (static_cast<long>(grid.r) * grid.r));
}

void vertex_coords(const flexi::FlexiGrid& grid, long vid, int& i, int& j, int& k) {
  const long r1 = grid.r + 1;
  i = static_cast<int>(vid % r1);
  j = static_cast<int>((vid / r1) % r1);
  k = static_cast<int>(vid / (r1 * r1));
}

Vec3 cube_center(const flexi::FlexiGrid& grid, long cube) {
  int i, j, k;
  cube_coords(grid, cube, i, j, k);
  const double h = grid.cell_edge();
  return grid.box.lo + h * Vec3(i + 0.5, j + 0.5, k + 0.5);
}

/// Sign-mixed cube ids in ascending order, with the same zero nudge the
/// extraction applies.
std::vector<long> mixed_cubes(const flexi::FlexiGrid& grid) {
  std::vector<long> out;
  const int r = grid.r;
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        bool neg = false, pos = false;
        for (int c = 0; c < 8; ++c) {
          const double s = nudged(
              grid.s(grid.vertex_id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1))));
          (s < 0.0 ? neg : pos) = true;
        }
        if (neg && pos) out.push_back(grid.cube_id(i, j, k));
      }
    }
  }
  return out;
}

void fill_cube_weights(field::SdfNetwork& net, flexi::FlexiGrid& grid,
                       const std::vector<long>& cubes) {
  if (cubes.empty()) return;
  Mat centers(3, static_cast<Index>(cubes.size()));
  for (size_t c = 0; c < cubes.size(); ++c)
    centers.col(static_cast<Index>(c)) = cube_center(grid, cubes[c]);
  const Mat w = net.eval_cube(centers);
  for (size_t c = 0; c < cubes.size(); ++c) {
    flexi::CubeWeights cw;
    for (int a = 0; a < 8; ++a) cw.alpha[static_cast<size_t>(a)] = w(a, static_cast<Index>(c));
    for (int b = 0; b < 12; ++b)
      cw.beta[static_cast<size_t>(b)] = w(8 + b, static_cast<Index>(c));
    cw.gamma = w(20, static_cast<Index>(c));
    grid.cubes.emplace(cubes[c], cw);
  }
}

Vec3 sdf_grad_fd(const std::function<double(const Vec3&)>& f, const Vec3& p, double h) {
  Vec3 g;
  for (int a = 0; a < 3; ++a) {
    Vec3 pp = p, pm = p;
    pp(a) += h;
    pm(a) -= h;
    g(a) = (f(pp) - f(pm)) / (2.0 * h);
  }
  return g;
}

std::optional<ChamferResult> probe_chamfer(field::SdfNetwork& net, const TargetShape& target,
                                           int resolution, int n_samples, uint64_t seed) {
  const flexi::FlexiGrid grid = field_to_grid_banded(net, resolution);
  const flexi::Extraction ex = flexi::extract_mesh(grid);
  if (ex.mesh.empty()) return std::nullopt;
  return chamfer(ex.mesh, target, n_samples, seed);
}

void finish_report(FitReport& rep, const std::optional<ChamferResult>& last) {
  if (last) {
    rep.stage_chamfer.push_back(last->chamfer_l1);
    rep.final_chamfer = last->chamfer_l1;
    rep.final_hausdorff95 = last->hausdorff95;
  } else {
    rep.stage_chamfer.push_back(-1.0);
  }
}

}  // namespace

void FitSchedule::validate() const {
  if (stages.empty()) throw ConfigError("fit schedule: needs at least one stage");
  int prev = 0;
  for (const FitStage& st : stages) {
    if (st.resolution < 2) throw ConfigError("fit schedule: stage resolution must be >= 2");
    if (st.resolution < prev)
      throw ConfigError("fit schedule: stage resolutions must be non-decreasing");
    if (st.iters < 0) throw ConfigError("fit schedule: stage iterations must be >= 0");
    if (!(st.w_sdf >= 0.0 && st.w_eik >= 0.0))
      throw ConfigError("fit schedule: loss weights must be non-negative");
    prev = st.resolution;
  }
  if (batch < 1) throw ConfigError("fit schedule: batch must be >= 1");
  if (!(lr_mlp > 0.0 && lr_table > 0.0))
    throw ConfigError("fit schedule: learning rates must be positive");
  if (chamfer_samples < 1) throw ConfigError("fit schedule: chamfer_samples must be >= 1");
}

void write_loss_csv(const std::string& path, const std::vector<LossRow>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write loss log: " + path);
  out << "iter,stage,loss_total,loss_sdf,loss_eik,chamfer\n";
  char buf[256];
  for (const LossRow& r : rows) {
    std::snprintf(buf, sizeof(buf), "%ld,%d,%.17g,%.17g,%.17g,", r.iter, r.stage, r.total,
                  r.sdf, r.eik);
    out << buf;
    if (r.chamfer >= 0.0) {
      std::snprintf(buf, sizeof(buf), "%.17g", r.chamfer);
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw ConfigError("write failed for loss log: " + path);
}

flexi::FlexiGrid field_to_grid(field::SdfNetwork& net, int resolution) {
  const ResolutionGuard guard(net, resolution);
  flexi::FlexiGrid grid(resolution, net.config().domain);
  const long nv = grid.n_vertices();
  Mat pts(3, nv);
  long col = 0;
  for (int k = 0; k <= resolution; ++k)
    for (int j = 0; j <= resolution; ++j)
      for (int i = 0; i <= resolution; ++i) pts.col(col++) = grid.vertex_pos(i, j, k);
  const Mat out = net.eval_vertex(pts);
  grid.s = out.row(0).transpose();
  grid.delta = out.bottomRows(3);
  fill_cube_weights(net, grid, mixed_cubes(grid));
  return grid;
}

flexi::FlexiGrid field_to_grid_banded(field::SdfNetwork& net, int resolution) {
  if (resolution < 16 || resolution % 4 != 0) return field_to_grid(net, resolution);
  const ResolutionGuard guard(net, resolution);
  const BoundingBox& box = net.config().domain;
  flexi::FlexiGrid grid(resolution, box);
  const long nv = grid.n_vertices();
  const int rc = resolution / 4;
  const long rc1 = rc + 1;

  Mat cpts(3, rc1 * rc1 * rc1);
  const double ch = box.cell_edge(rc);
  long col = 0;
  for (int k = 0; k <= rc; ++k)
    for (int j = 0; j <= rc; ++j)
      for (int i = 0; i <= rc; ++i) cpts.col(col++) = box.lo + ch * Vec3(i, j, k);
  const Vec cs = net.eval_vertex(cpts).row(0).transpose();
  const auto cidx = [rc1](int i, int j, int k) { return i + rc1 * (j + rc1 * k); };

  // A coarse cell is active when the surface could pass through it: a corner
  // inside the margin band or corners of mixed sign.
  const double margin = 1.5 * std::sqrt(3.0) * ch;
  std::vector<char> marked(static_cast<size_t>(nv), 0);
  for (int k = 0; k < rc; ++k) {
    for (int j = 0; j < rc; ++j) {
      for (int i = 0; i < rc; ++i) {
        bool active = false, neg = false, pos = false;
        for (int c = 0; c < 8; ++c) {
          const double s = cs(cidx(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)));
          active = active || std::abs(s) <= margin;
          (nudged(s) < 0.0 ? neg : pos) = true;
        }
        if (!(active || (neg && pos))) continue;
        for (int fk = 4 * k; fk <= 4 * k + 4; ++fk)
          for (int fj = 4 * j; fj <= 4 * j + 4; ++fj)
            for (int fi = 4 * i; fi <= 4 * i + 4; ++fi)
              marked[static_cast<size_t>(grid.vertex_id(fi, fj, fk))] = 1;
      }
    }
  }

  std::vector<long> band;
  band.reserve(static_cast<size_t>(nv) / 4);
  for (long v = 0; v < nv; ++v)
    if (marked[static_cast<size_t>(v)]) band.push_back(v);

  grid.delta = Mat::Zero(3, nv);
  if (!band.empty()) {
    Mat bpts(3, static_cast<Index>(band.size()));
    for (size_t c = 0; c < band.size(); ++c) {
      int i, j, k;
      vertex_coords(grid, band[c], i, j, k);
      bpts.col(static_cast<Index>(c)) = grid.vertex_pos(i, j, k);
    }
    const Mat bout = net.eval_vertex(bpts);
    for (size_t c = 0; c < band.size(); ++c) {
      grid.s(band[c]) = bout(0, static_cast<Index>(c));
      grid.delta.col(band[c]) = bout.block<3, 1>(1, static_cast<Index>(c));
    }
  }

  // Out-of-band vertices take coarse-interpolated values (sign-stable there
  // by the margin) and keep zero offsets.
  for (long v = 0; v < nv; ++v) {
    if (marked[static_cast<size_t>(v)]) continue;
    int i, j, k;
    vertex_coords(grid, v, i, j, k);
    const int c0 = std::min(i / 4, rc - 1), c1 = std::min(j / 4, rc - 1),
              c2 = std::min(k / 4, rc - 1);
    const double tx = 0.25 * i - c0, ty = 0.25 * j - c1, tz = 0.25 * k - c2;
    double s = 0.0;
    for (int c = 0; c < 8; ++c) {
      const double w = ((c & 1) ? tx : 1.0 - tx) * (((c >> 1) & 1) ? ty : 1.0 - ty) *
                       (((c >> 2) & 1) ? tz : 1.0 - tz);
      s += w * cs(cidx(c0 + (c & 1), c1 + ((c >> 1) & 1), c2 + ((c >> 2) & 1)));
    }
    grid.s(v) = s;
  }

  fill_cube_weights(net, grid, mixed_cubes(grid));
  return grid;
}

FitReport fit_geometry(field::SdfNetwork& net, const TargetShape& target,
                       const FitSchedule& schedule, uint64_t seed) {
  schedule.validate();
  const int max_res = net.resolution();
  for (const FitStage& st : schedule.stages)
    if (st.resolution > max_res)
      throw ConfigError("fit_geometry: stage resolution " + std::to_string(st.resolution) +
                        " exceeds the network resolution " + std::to_string(max_res));

  FitReport rep;
  long global_iter = 0;
  for (size_t si = 0; si < schedule.stages.size(); ++si) {
    const FitStage& st = schedule.stages[si];
    const ResolutionGuard guard(net, st.resolution);

    field::FitSdfOptions opt;
    opt.iters = st.iters;
    opt.batch = schedule.batch;
    opt.w_sdf = st.w_sdf;
    opt.w_eik = st.w_eik;
    opt.w_offset = 0.0;
    opt.lr_mlp = schedule.lr_mlp;
    opt.lr_table = schedule.lr_table;
    opt.on_iteration = [&](int it, double total, double sdf, double eik) {
      LossRow row{global_iter, static_cast<int>(si), total, sdf, eik, -1.0};
      if (schedule.chamfer_every > 0 &&
          (global_iter % schedule.chamfer_every == 0 || it == st.iters - 1)) {
        const auto probe = probe_chamfer(net, target, st.resolution, schedule.chamfer_samples,
                                         Rng::derive(seed, "chamfer-probe"));
        if (probe) row.chamfer = probe->chamfer_l1;
      }
      rep.log.push_back(row);
      ++global_iter;
    };
    field::fit_sdf(net, target.sdf, opt, Rng::derive(seed, "stage-" + std::to_string(si)));

    finish_report(rep, probe_chamfer(net, target, st.resolution, schedule.chamfer_samples,
                                     Rng::derive(seed, "stage-end")));
  }
  return rep;
}

FitReport fit_surface_mode(field::SdfNetwork& net, const TargetShape& target,
                           const FitSchedule& schedule, uint64_t seed) {
  schedule.validate();
  const int max_res = net.resolution();
  for (const FitStage& st : schedule.stages)
    if (st.resolution > max_res)
      throw ConfigError("fit_surface_mode: stage resolution " +
                        std::to_string(st.resolution) + " exceeds the network resolution " +
                        std::to_string(max_res));

  auto params = net.params();
  const ad::AdamConfig adam{schedule.lr_mlp, 0.9, 0.999, 1e-8};
  const double table_scale = schedule.lr_table / schedule.lr_mlp;
  const double grad_h = 1e-5 * net.config().domain.extent().x();

  FitReport rep;
  long global_iter = 0;
  for (size_t si = 0; si < schedule.stages.size(); ++si) {
    const FitStage& st = schedule.stages[si];
    const ResolutionGuard guard(net, st.resolution);
    std::vector<ad::AdamState> states(params.size());

    for (int it = 0; it < st.iters; ++it) {
      const flexi::FlexiGrid grid = field_to_grid_banded(net, st.resolution);
      const flexi::Extraction ex = flexi::extract_mesh(grid);
      if (ex.mesh.empty())
        throw NumericalError("fit_surface_mode: extraction empty at iteration " +
                             std::to_string(global_iter));

      const long nvtx = ex.mesh.n_vertices();
      Mat dv(3, nvtx);
      double loss = 0.0;
      for (Index v = 0; v < nvtx; ++v) {
        const Vec3 p = ex.mesh.vertices.col(v);
        const double sv = target.sdf(p);
        loss += std::abs(sv);
        const double sign = sv > 0.0 ? 1.0 : (sv < 0.0 ? -1.0 : 0.0);
        dv.col(v) = (sign / static_cast<double>(nvtx)) * sdf_grad_fd(target.sdf, p, grad_h);
      }
      loss /= static_cast<double>(nvtx);
      if (!std::isfinite(loss))
        throw NumericalError("fit_surface_mode: non-finite loss at iteration " +
                             std::to_string(global_iter));

      const flexi::GridGrads grads = flexi::extract_backward(grid, ex, dv);

      // The only grid quantities with gradients are the corners and centers
      // of cells that produced a dual vertex; the network is rebuilt on tape
      // for exactly those.
      std::vector<long> active;
      active.reserve(ex.duals.size() * 8);
      std::vector<char> seen(static_cast<size_t>(grid.n_vertices()), 0);
      for (const auto& d : ex.duals) {
        int ci, cj, ck;
        cube_coords(grid, d.cube, ci, cj, ck);
        for (int c = 0; c < 8; ++c) {
          const long vid =
              grid.vertex_id(ci + (c & 1), cj + ((c >> 1) & 1), ck + ((c >> 2) & 1));
          if (!seen[static_cast<size_t>(vid)]) {
            seen[static_cast<size_t>(vid)] = 1;
            active.push_back(vid);
          }
        }
      }

      const Index nav = static_cast<Index>(active.size());
      Mat apos(3, nav), dsg(1, nav), ddg(3, nav);
      for (Index c = 0; c < nav; ++c) {
        int i, j, k;
        vertex_coords(grid, active[static_cast<size_t>(c)], i, j, k);
        apos.col(c) = grid.vertex_pos(i, j, k);
        dsg(0, c) = grads.ds(active[static_cast<size_t>(c)]);
        ddg.col(c) = grads.ddelta.col(active[static_cast<size_t>(c)]);
      }
      const Index nac = static_cast<Index>(ex.duals.size());
      Mat cpos(3, nac), dag(8, nac), dbg(12, nac), dgg(1, nac);
      for (Index c = 0; c < nac; ++c) {
        const long cube = ex.duals[static_cast<size_t>(c)].cube;
        cpos.col(c) = cube_center(grid, cube);
        const flexi::CubeWeights& gw = grads.dcubes.at(cube);
        for (int a = 0; a < 8; ++a) dag(a, c) = gw.alpha[static_cast<size_t>(a)];
        for (int b = 0; b < 12; ++b) dbg(b, c) = gw.beta[static_cast<size_t>(b)];
        dgg(0, c) = gw.gamma;
      }

      ad::Tape tape;
      const std::vector<int> ids = net.stage(tape);
      const auto vn = net.build_vertex(tape, ids, apos);
      const auto cn = net.build_cube(tape, ids, cpos);
      int pl = tape.sum(tape.mul(vn.s, tape.constant(dsg)));
      pl = tape.add(pl, tape.sum(tape.mul(vn.delta, tape.constant(ddg))));
      pl = tape.add(pl, tape.sum(tape.mul(cn.alpha, tape.constant(dag))));
      pl = tape.add(pl, tape.sum(tape.mul(cn.beta, tape.constant(dbg))));
      pl = tape.add(pl, tape.sum(tape.mul(cn.gamma, tape.constant(dgg))));
      tape.backward(pl);
      for (size_t k = 0; k < params.size(); ++k)
        ad::adam_step(adam, states[k], *params[k].value, tape.adjoint(ids[k]),
                      params[k].table ? table_scale : 1.0);

      LossRow row{global_iter, static_cast<int>(si), loss, loss, 0.0, -1.0};
      if (schedule.chamfer_every > 0 &&
          (global_iter % schedule.chamfer_every == 0 || it == st.iters - 1)) {
        row.chamfer = chamfer(ex.mesh, target, schedule.chamfer_samples,
                              Rng::derive(seed, "surface-chamfer"))
                          .chamfer_l1;
      }
      rep.log.push_back(row);
      ++global_iter;
    }

    finish_report(rep, probe_chamfer(net, target, st.resolution, schedule.chamfer_samples,
                                     Rng::derive(seed, "stage-end")));
  }
  return rep;
}

FitReport fit_texture(field::TextureField& tex, const flexi::TriMesh& mesh,
                      const std::function<Vec3(const Vec3&)>& target_color, int iters,
                      uint64_t seed, double lr_mlp, double lr_table) {
  if (mesh.empty()) throw std::invalid_argument("fit_texture: mesh is empty");
  if (!target_color) throw std::invalid_argument("fit_texture: no target color");
  if (iters < 0) throw ConfigError("fit_texture: iters must be >= 0");

  const Mat normals = flexi::vertex_normals(mesh);
  std::vector<double> cum_area;
  cum_area.reserve(mesh.triangles.size());
  double total_area = 0.0;
  for (const auto& t : mesh.triangles) {
    const Vec3 e0 = mesh.vertices.col(t[1]) - mesh.vertices.col(t[0]);
    const Vec3 e1 = mesh.vertices.col(t[2]) - mesh.vertices.col(t[0]);
    total_area += 0.5 * e0.cross(e1).norm();
    cum_area.push_back(total_area);
  }
  if (!(total_area > 0.0)) throw std::invalid_argument("fit_texture: zero surface area");

  auto params = tex.params();
  const ad::AdamConfig adam{lr_mlp, 0.9, 0.999, 1e-8};
  const double table_scale = lr_table / lr_mlp;
  std::vector<ad::AdamState> states(params.size());
  Rng rng(Rng::derive(seed, "texture-sampling"));
  constexpr int kBatch = 1024;

  FitReport rep;
  for (int iter = 0; iter < iters; ++iter) {
    Mat pts(3, kBatch), nrm(3, kBatch), tgt(3, kBatch);
    for (int i = 0; i < kBatch; ++i) {
      const double pick = rng.uniform(0.0, total_area);
      const size_t ti = static_cast<size_t>(
          std::lower_bound(cum_area.begin(), cum_area.end(), pick) - cum_area.begin());
      const auto& t = mesh.triangles[std::min(ti, mesh.triangles.size() - 1)];
      const double r1 = std::sqrt(rng.uniform());
      const double u = 1.0 - r1, v = rng.uniform() * r1;
      const double w = 1.0 - u - v;
      const Vec3 p = u * mesh.vertices.col(t[0]) + v * mesh.vertices.col(t[1]) +
                     w * mesh.vertices.col(t[2]);
      Vec3 n = u * normals.col(t[0]) + v * normals.col(t[1]) + w * normals.col(t[2]);
      if (n.norm() < 1e-9) {
        const Vec3 e0 = mesh.vertices.col(t[1]) - mesh.vertices.col(t[0]);
        const Vec3 e1 = mesh.vertices.col(t[2]) - mesh.vertices.col(t[0]);
        n = e0.cross(e1);
        if (n.norm() < 1e-12) n = Vec3(0, 0, 1);
      }
      n.normalize();
      pts.col(i) = p;
      nrm.col(i) = n;
      tgt.col(i) = target_color(p).cwiseMax(0.0).cwiseMin(1.0);
    }

    ad::Tape tape;
    const std::vector<int> ids = tex.stage(tape);
    const int rgb = tex.build(tape, ids, pts, nrm, nrm);
    const int diff = tape.sub(rgb, tape.constant(tgt));
    const int mse = tape.scale(tape.sum(tape.mul(diff, diff)), 1.0 / (3.0 * kBatch));
    const double val = tape.value(mse)(0, 0);
    if (!std::isfinite(val))
      throw NumericalError("fit_texture: non-finite loss at iteration " +
                           std::to_string(iter));
    tape.backward(mse);
    for (size_t k = 0; k < params.size(); ++k)
      ad::adam_step(adam, states[k], *params[k].value, tape.adjoint(ids[k]),
                    params[k].table ? table_scale : 1.0);
    rep.log.push_back({iter, 0, val, 0.0, 0.0, -1.0});
  }
  return rep;
}

AblationResult ablation_sphere(double radius, int resolution, int max_iters,
                               int probe_every, uint64_t seed) {
  if (resolution < 2 || max_iters < 1 || probe_every < 1)
    throw ConfigError("ablation_sphere: bad arguments");
  const TargetShape target = make_sphere(radius);
  field::SdfNetworkConfig cfg;
  cfg.resolution = resolution;
  cfg.validate();
  const int n_chamfer = 4096;

  AblationResult res;
  res.threshold = 2.0 * cfg.domain.cell_edge(resolution);

  {
    field::SdfNetwork net(cfg, Rng::derive(seed, "ablation-net"));
    field::FitSdfOptions opt;
    opt.iters = max_iters;
    opt.w_eik = 0.0;
    opt.w_offset = 0.0;
    opt.stop_after = [&](int it) {
      if ((it + 1) % probe_every != 0) return false;
      const auto probe = probe_chamfer(net, target, resolution, n_chamfer,
                                       Rng::derive(seed, "ablation-probe"));
      if (probe && probe->chamfer_l1 < res.threshold) {
        res.encoded_iters = it + 1;
        return true;
      }
      return false;
    };
    field::fit_sdf(net, target.sdf, opt, Rng::derive(seed, "ablation-net-fit"));
  }

  {
    // Baseline: the grid quantities themselves are the parameters. Only the
    // vertex values receive gradients from the point-sample loss; offsets
    // and cube weights sit at their defaults but are consumed by the
    // extraction exactly like trained ones would be.
    const BoundingBox& box = cfg.domain;
    flexi::FlexiGrid grid(resolution, box);
    const long nv = grid.n_vertices();
    Mat s_param(1, nv);
    Rng init(Rng::derive(seed, "ablation-baseline-init"));
    for (long v = 0; v < nv; ++v) s_param(0, v) = init.uniform(-1e-4, 1e-4);
    Mat delta_param = Mat::Zero(3, nv);
    grid.delta = delta_param;

    const ad::AdamConfig adam{1e-2, 0.9, 0.999, 1e-8};  // the lookup-table rate
    ad::AdamState s_state;
    Rng rng(Rng::derive(seed, "ablation-baseline-fit"));
    const int batch = 4096;
    const double h = box.cell_edge(resolution);

    for (int iter = 0; iter < max_iters; ++iter) {
      const Mat pts = field::fit_sample_batch(rng, box, target.sdf, batch, 0.25, 0.05, iter);
      Mat grad_s = Mat::Zero(1, nv);
      for (int i = 0; i < batch; ++i) {
        const Vec3 u = (pts.col(i) - box.lo) / h;
        int c[3];
        double t[3];
        for (int a = 0; a < 3; ++a) {
          c[a] = std::clamp(static_cast<int>(std::floor(u(a))), 0, resolution - 1);
          t[a] = u(a) - c[a];
        }
        double pred = 0.0;
        long corner[8];
        double wgt[8];
        for (int cc = 0; cc < 8; ++cc) {
          corner[cc] = grid.vertex_id(c[0] + (cc & 1), c[1] + ((cc >> 1) & 1),
                                      c[2] + ((cc >> 2) & 1));
          wgt[cc] = ((cc & 1) ? t[0] : 1.0 - t[0]) * (((cc >> 1) & 1) ? t[1] : 1.0 - t[1]) *
                    (((cc >> 2) & 1) ? t[2] : 1.0 - t[2]);
          pred += wgt[cc] * s_param(0, corner[cc]);
        }
        const double r = pred - target.sdf(pts.col(i));
        const double g = (r > 0.0 ? 1.0 : (r < 0.0 ? -1.0 : 0.0)) / batch;
        for (int cc = 0; cc < 8; ++cc) grad_s(0, corner[cc]) += g * wgt[cc];
      }
      ad::adam_step(adam, s_state, s_param, grad_s, 1.0);

      if ((iter + 1) % probe_every == 0) {
        grid.s = s_param.row(0).transpose();
        const flexi::Extraction ex = flexi::extract_mesh(grid);
        if (ex.mesh.empty()) continue;
        const double c = chamfer(ex.mesh, target, n_chamfer,
                                 Rng::derive(seed, "ablation-probe"))
                             .chamfer_l1;
        if (c < res.threshold) {
          res.baseline_iters = iter + 1;
          break;
        }
      }
    }
  }
  return res;
}

}  // namespace mtk::geo
