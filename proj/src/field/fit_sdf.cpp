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

#include "mtk/field/fit_sdf.hpp"

#include <cmath>
#include <string>

#include "mtk/ad/adam.hpp"
#include "mtk/rng.hpp"

namespace mtk::field {

double ellipsoid_sdf(const Vec3& p, const Vec3& semi_axes) {
  const Vec3 q = p.cwiseQuotient(semi_axes);
  const double k0 = q.norm();
  if (k0 < 1e-12) return -semi_axes.minCoeff();
  const double k1 = p.cwiseQuotient(semi_axes.cwiseProduct(semi_axes)).norm();
  return k0 * (k0 - 1.0) / k1;
}

namespace {

Vec3 uniform_in_box(Rng& rng, const BoundingBox& box) {
  const Vec3 ext = box.extent();
  return Vec3(box.lo.x() + ext.x() * rng.uniform(), box.lo.y() + ext.y() * rng.uniform(),
              box.lo.z() + ext.z() * rng.uniform());
}

}  // namespace

Mat fit_sample_batch(Rng& rng, const BoundingBox& box, const SdfFn& target, int batch,
                     double near_frac, double near_band, int iter) {
  const int n_near = static_cast<int>(std::lround(near_frac * batch));
  const int n_strat = batch - n_near;
  Mat pts(3, batch);
  const Vec3 ext = box.extent();

  int s = 1;
  while (s * s * s < n_strat) ++s;
  const long cells = static_cast<long>(s) * s * s;
  const long start = (static_cast<long>(iter) * n_strat) % cells;
  for (int i = 0; i < n_strat; ++i) {
    const long cell = (start + i) % cells;
    const int cx = static_cast<int>(cell % s);
    const int cy = static_cast<int>((cell / s) % s);
    const int cz = static_cast<int>(cell / (static_cast<long>(s) * s));
    pts(0, i) = box.lo.x() + ext.x() * ((cx + rng.uniform()) / s);
    pts(1, i) = box.lo.y() + ext.y() * ((cy + rng.uniform()) / s);
    pts(2, i) = box.lo.z() + ext.z() * ((cz + rng.uniform()) / s);
  }

  int found = 0;
  long attempts = 0;
  const long max_attempts = 200L * std::max(n_near, 1);
  while (found < n_near && attempts < max_attempts) {
    const Vec3 p = uniform_in_box(rng, box);
    ++attempts;
    if (std::abs(target(p)) < near_band) {
      pts.col(n_strat + found) = p;
      ++found;
    }
  }
  while (found < n_near) {  // degenerate target; fall back to uniform
    pts.col(n_strat + found) = uniform_in_box(rng, box);
    ++found;
  }
  return pts;
}

FitSdfLog fit_sdf(SdfNetwork& net, const SdfFn& target, const FitSdfOptions& opt,
                  uint64_t seed) {
  if (opt.batch < 1) throw ConfigError("fit_sdf: batch must be >= 1");
  if (opt.iters < 0) throw ConfigError("fit_sdf: iters must be >= 0");
  const BoundingBox& box = net.config().domain;
  Rng rng(Rng::derive(seed, "sampling"));

  auto params = net.params();
  std::vector<ad::AdamState> states(params.size());
  const ad::AdamConfig adam{opt.lr_mlp, 0.9, 0.999, 1e-8};
  const double table_scale = opt.lr_table / opt.lr_mlp;

  FitSdfLog log;
  log.total.reserve(static_cast<size_t>(opt.iters));
  const double inv_batch = 1.0 / opt.batch;
  const double h = opt.eik_h_cells * net.cell_edge();

  for (int iter = 0; iter < opt.iters; ++iter) {
    const Mat pts = fit_sample_batch(rng, box, target, opt.batch, opt.near_frac,
                                     opt.near_band, iter);
    Mat tgt(1, opt.batch);
    for (int i = 0; i < opt.batch; ++i) tgt(0, i) = target(pts.col(i));

    ad::Tape tape;
    const std::vector<int> ids = net.stage(tape);
    const auto v = net.build_vertex(tape, ids, pts);

    const int l_sdf =
        tape.scale(tape.sum(tape.abs(tape.sub(v.s, tape.constant(tgt)))), inv_batch);
    const int l_off = tape.scale(tape.sum(tape.abs(v.delta_unit)), inv_batch / 3.0);
    int loss = tape.add(tape.scale(l_sdf, opt.w_sdf), tape.scale(l_off, opt.w_offset));

    double eik_val = 0.0;
    if (opt.w_eik > 0.0) {
      int grads[3];
      for (int a = 0; a < 3; ++a) {
        Mat pp = pts, pm = pts;
        pp.row(a).array() += h;
        pm.row(a).array() -= h;
        const int sp = net.build_vertex(tape, ids, pp).s;
        const int sm = net.build_vertex(tape, ids, pm).s;
        grads[a] = tape.scale(tape.sub(sp, sm), 1.0 / (2.0 * h));
      }
      const int sq = tape.add(tape.add(tape.mul(grads[0], grads[0]), tape.mul(grads[1], grads[1])),
                              tape.mul(grads[2], grads[2]));
      const int norm = tape.sqrt(tape.add_scalar(sq, 1e-12));
      const int d = tape.add_scalar(norm, -1.0);
      const int l_eik = tape.scale(tape.sum(tape.mul(d, d)), inv_batch);
      eik_val = tape.value(l_eik)(0, 0);
      loss = tape.add(loss, tape.scale(l_eik, opt.w_eik));
    }

    const double total = tape.value(loss)(0, 0);
    const double sdf_val = tape.value(l_sdf)(0, 0);
    if (!std::isfinite(total))
      throw NumericalError("fit_sdf: non-finite loss at iteration " + std::to_string(iter));

    tape.backward(loss);
    for (size_t k = 0; k < params.size(); ++k)
      adam_step(adam, states[k], *params[k].value, tape.adjoint(ids[k]),
                params[k].table ? table_scale : 1.0);

    log.total.push_back(total);
    log.sdf.push_back(sdf_val);
    log.eik.push_back(eik_val);
    if (opt.on_iteration) opt.on_iteration(iter, total, sdf_val, eik_val);
    if (opt.stop_after && opt.stop_after(iter)) break;
  }
  return log;
}

WarmupResult init_ellipsoid(SdfNetwork& net, const Vec3& semi_axes, int iters,
                            uint64_t seed) {
  if (!(semi_axes.array() > 0.0).all())
    throw ConfigError("init_ellipsoid: semi-axes must be positive");
  const BoundingBox& box = net.config().domain;
  const Vec3 center = 0.5 * (box.lo + box.hi);
  if (!((center + semi_axes).array() < box.hi.array()).all() ||
      !((center - semi_axes).array() > box.lo.array()).all())
    throw ConfigError("init_ellipsoid: ellipsoid must fit inside the domain");

  const SdfFn target = [&, center](const Vec3& p) {
    return ellipsoid_sdf(p - center, semi_axes);
  };

  FitSdfOptions opt;
  opt.iters = iters;
  WarmupResult res;
  res.log = fit_sdf(net, target, opt, seed);

  Rng probe_rng(Rng::derive(seed, "probe"));
  const int n = 4096;
  Mat probes(3, n);
  for (int i = 0; i < n; ++i) probes.col(i) = uniform_in_box(probe_rng, box);
  const Mat out = net.eval_vertex(probes);
  double mae = 0.0;
  for (int i = 0; i < n; ++i) mae += std::abs(out(0, i) - target(probes.col(i)));
  res.probe_mae = mae / n;
  res.converged = res.probe_mae < 0.01;
  return res;
}

}  // namespace mtk::field
