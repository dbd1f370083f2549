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
//
// Release gate: every check below prints one PASS/FAIL line with its
// measured numbers and wall time. The binary exits nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "mtk/cli/commands.hpp"
#include "mtk/field/fit_sdf.hpp"
#include "mtk/field/network.hpp"
#include "mtk/flexi/extract.hpp"
#include "mtk/flexi/grid.hpp"
#include "mtk/flexi/mesh.hpp"
#include "mtk/geo/chamfer.hpp"
#include "mtk/geo/target.hpp"
#include "mtk/geo/trainer.hpp"
#include "mtk/inv/invert.hpp"
#include "mtk/inv/pca.hpp"
#include "mtk/inv/vocab.hpp"
#include "mtk/raster/render.hpp"
#include "mtk/rng.hpp"

namespace fs = std::filesystem;
using namespace mtk;
using flexi::Extraction;
using flexi::FlexiGrid;

namespace {

using clk = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), pattern, v);
  return buf;
}

Mat random_matrix(Rng& rng, long rows, long cols) {
  return Mat::NullaryExpr(rows, cols, [&rng](Index, Index) { return rng.normal(); });
}

FlexiGrid sphere_grid(int r, double radius) {
  FlexiGrid grid(r, BoundingBox{});
  for (int k = 0; k <= r; ++k)
    for (int j = 0; j <= r; ++j)
      for (int i = 0; i <= r; ++i)
        grid.s(grid.vertex_id(i, j, k)) = grid.vertex_pos(i, j, k).norm() - radius;
  return grid;
}

// Sphere field with jittered values, offsets, and cube weights; values are
// pushed away from zero so finite-difference steps cannot flip any sign.
FlexiGrid random_grid(int r, uint64_t seed) {
  Rng rng(seed);
  FlexiGrid grid = sphere_grid(r, 0.55);
  for (long v = 0; v < grid.s.size(); ++v) {
    grid.s(v) += rng.uniform(-0.01, 0.01);
    if (std::abs(grid.s(v)) < 1e-4) grid.s(v) = grid.s(v) >= 0.0 ? 2e-4 : -2e-4;
  }
  grid.delta = Mat::NullaryExpr(3, grid.n_vertices(),
                                [&rng](Index, Index) { return rng.uniform(-0.05, 0.05); });
  for (int k = 0; k < r; ++k) {
    for (int j = 0; j < r; ++j) {
      for (int i = 0; i < r; ++i) {
        bool neg = false, pos = false;
        for (int c = 0; c < 8; ++c) {
          const double s =
              grid.s(grid.vertex_id(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)));
          (s < 0.0 ? neg : pos) = true;
        }
        if (!neg || !pos) continue;
        flexi::CubeWeights w;
        for (double& a : w.alpha) a = std::exp(rng.uniform(-0.5, 0.5));
        for (double& b : w.beta) b = std::exp(rng.uniform(-0.5, 0.5));
        w.gamma = rng.uniform(0.2, 0.8);
        grid.cubes[grid.cube_id(i, j, k)] = w;
      }
    }
  }
  return grid;
}

// Plain cyclic Jacobi eigendecomposition, independent of the library path.
void jacobi_eig(Mat a, Mat& vectors, Vec& values) {
  const long n = a.rows();
  vectors = Mat::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (long p = 0; p < n; ++p)
      for (long q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (long p = 0; p < n; ++p) {
      for (long q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double phi = 0.5 * std::atan2(2.0 * a(p, q), a(q, q) - a(p, p));
        Mat rot = Mat::Identity(n, n);
        rot(p, p) = rot(q, q) = std::cos(phi);
        rot(p, q) = std::sin(phi);
        rot(q, p) = -std::sin(phi);
        a = (rot.transpose() * a * rot).eval();
        vectors = (vectors * rot).eval();
      }
    }
  }
  values = a.diagonal();
}

inv::Vocabulary random_vocab(Rng& rng, long v, long d) {
  inv::Vocabulary vocab;
  vocab.tokens.reserve(static_cast<size_t>(v));
  for (long i = 0; i < v; ++i) vocab.tokens.push_back("tok" + std::to_string(i));
  vocab.tokens[0] = "a";
  vocab.tokens[1] = "image";
  vocab.tokens[2] = "of";
  vocab.embeddings = random_matrix(rng, v, d);
  return vocab;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return "<missing:" + p.string() + ">";
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// ---------------------------------------------------------------------------

Outcome extraction_correctness() {
  constexpr double kRadius = 0.35;
  constexpr int kRes = 32;
  const double cell = 2.0 / kRes;
  const double tol = 1.5 * cell;

  FlexiGrid grid = sphere_grid(kRes, kRadius);
  const Extraction ex = flexi::extract_mesh(grid);
  const flexi::MeshReport rep = flexi::mesh_validate(ex.mesh);

  double max_dev = 0.0;
  bool outward = true;
  const Mat normals = flexi::vertex_normals(ex.mesh);
  for (long i = 0; i < ex.mesh.n_vertices(); ++i) {
    const Vec3 v = ex.mesh.vertices.col(i);
    max_dev = std::max(max_dev, std::abs(v.norm() - kRadius));
    outward = outward && normals.col(i).dot(v.normalized()) > 0.0;
  }

  Outcome out;
  out.pass = rep.watertight && rep.euler == 2 && max_dev < tol && outward;
  out.detail = std::string("watertight=") + (rep.watertight ? "yes" : "no") +
               " euler=" + std::to_string(rep.euler) + " max_dev=" + fmt("%.4f", max_dev) +
               "<" + fmt("%.4f", tol) + (outward ? " normals-outward" : " normals-FLIPPED");
  return out;
}

Outcome differentiable_extraction() {
  constexpr double kStep = 1e-5;
  constexpr double kTol = 1e-4;
  double worst = 0.0;

  const auto weighted_sum = [](const FlexiGrid& g, const Mat& coeff) {
    const Extraction ex = flexi::extract_mesh(g);
    return (coeff.array() * ex.mesh.vertices.array()).sum();
  };

  for (uint64_t rep = 0; rep < 20; ++rep) {
    const FlexiGrid grid = random_grid(8, 1000 + rep);
    const Extraction ex = flexi::extract_mesh(grid);
    const long nv = ex.mesh.n_vertices();
    Rng rng(9000 + rep);
    const Mat coeff = random_matrix(rng, 3, nv);
    const flexi::GridGrads grads = flexi::extract_backward(grid, ex, coeff);

    FlexiGrid probe = grid;
    const auto fd = [&](double* slot) {
      *slot += kStep;
      const double up = weighted_sum(probe, coeff);
      *slot -= 2.0 * kStep;
      const double down = weighted_sum(probe, coeff);
      *slot += kStep;
      return (up - down) / (2.0 * kStep);
    };
    const auto compare = [&](double analytic, double numeric) {
      worst = std::max(worst,
                       std::abs(analytic - numeric) / std::max(1.0, std::abs(numeric)));
    };

    for (int pick = 0; pick < 6; ++pick) {
      const auto& cr = ex.crossings[rng.uniform_int(ex.crossings.size())];
      const long vert = pick % 2 == 0 ? cr.vert_a : cr.vert_b;
      compare(grads.ds(vert), fd(&probe.s(vert)));
      const int row = static_cast<int>(rng.uniform_int(3));
      compare(grads.ddelta(row, vert), fd(&probe.delta(row, vert)));
    }
    for (int pick = 0; pick < 3; ++pick) {
      const auto& d = ex.duals[rng.uniform_int(ex.duals.size())];
      const auto& cr = ex.crossings[static_cast<size_t>(
          d.first_crossing + static_cast<int>(rng.uniform_int(d.n_crossings)))];
      flexi::CubeWeights& w = probe.cubes.at(d.cube);
      const flexi::CubeWeights& gw = grads.dcubes.at(d.cube);
      compare(gw.alpha[static_cast<size_t>(cr.slot_a)],
              fd(&w.alpha[static_cast<size_t>(cr.slot_a)]));
      compare(gw.beta[static_cast<size_t>(cr.beta_slot)],
              fd(&w.beta[static_cast<size_t>(cr.beta_slot)]));
    }
    for (int pick = 0; pick < 2; ++pick) {
      const auto& q = ex.quads[rng.uniform_int(ex.quads.size())];
      compare(grads.dcubes.at(q.owner_cube).gamma, fd(&probe.cubes.at(q.owner_cube).gamma));
    }
  }

  Outcome out;
  out.pass = worst < kTol;
  out.detail = "20 grids, max rel err " + fmt("%.2e", worst) + " < 1e-04";
  return out;
}

Outcome ellipsoid_warmup() {
  constexpr double kTol = 0.01;
  field::SdfNetworkConfig cfg;
  field::SdfNetwork net(cfg, 3);
  const field::WarmupResult warm =
      field::init_ellipsoid(net, Vec3(0.35, 0.3, 0.25), 500, 3);
  Outcome out;
  out.pass = warm.probe_mae < kTol;
  out.detail = "500 iters, probe mae " + fmt("%.5f", warm.probe_mae) + " < 0.01";
  return out;
}

Outcome coarse_to_fine_fit() {
  field::SdfNetworkConfig cfg;
  cfg.resolution = 64;
  cfg.domain.lo = Vec3::Constant(-0.5);
  cfg.domain.hi = Vec3::Constant(0.5);
  field::SdfNetwork net(cfg, 11);
  field::init_ellipsoid(net, 0.35 * cfg.domain.extent() / 2.0, 500,
                        Rng::derive(11, "warmup"));

  const geo::TargetShape torus = geo::make_torus(0.25, 0.1);
  geo::FitSchedule sched;
  sched.stages = {{32, 1000, 1.0, 0.1}, {64, 1000, 1.0, 0.1}};
  sched.batch = 2048;
  sched.chamfer_every = 0;
  const geo::FitReport rep = geo::fit_geometry(net, torus, sched, 11);

  const double fine_cell = cfg.domain.cell_edge(64);
  const double coarse = rep.stage_chamfer[0];
  const double fine = rep.stage_chamfer[1];
  Outcome out;
  out.pass = fine < 3.0 * fine_cell && fine <= 1.05 * coarse;
  out.detail = "coarse " + fmt("%.5f", coarse) + " fine " + fmt("%.5f", fine) + " < " +
               fmt("%.5f", 3.0 * fine_cell) + " and <= 1.05*coarse";
  return out;
}

Outcome surface_mode_refinement() {
  constexpr double kFactor = 10.0;
  field::SdfNetworkConfig cfg;
  cfg.resolution = 64;
  field::SdfNetwork net(cfg, 5);
  field::init_ellipsoid(net, Vec3::Constant(0.25), 500, Rng::derive(5, "warmup"));
  const geo::TargetShape target = geo::make_sphere(0.35);

  const auto mean_abs = [&](field::SdfNetwork& n) {
    FlexiGrid g = geo::field_to_grid_banded(n, 64);
    const Extraction ex = flexi::extract_mesh(g);
    double s = 0.0;
    for (long i = 0; i < ex.mesh.n_vertices(); ++i)
      s += std::abs(target.sdf(ex.mesh.vertices.col(i)));
    return s / static_cast<double>(ex.mesh.n_vertices());
  };

  const double warm = mean_abs(net);
  geo::FitSchedule sched;
  sched.stages = {{64, 1000, 1.0, 0.1}};
  sched.batch = 1024;
  sched.lr_mlp = 1e-5;
  sched.lr_table = 1e-4;
  sched.chamfer_every = 0;
  geo::fit_surface_mode(net, target, sched, 5);
  const double after = mean_abs(net);

  Outcome out;
  out.pass = warm > after * kFactor;
  out.detail = "mean |sdf*(v)| " + fmt("%.5f", warm) + " -> " + fmt("%.5f", after) +
               " (x" + fmt("%.1f", warm / std::max(after, 1e-300)) + " >= x10)";
  return out;
}

Outcome encoding_ablation() {
  // At this resolution raw grid values only learn where samples land, so the
  // shared hash encoding should cross the threshold in far fewer iterations.
  constexpr int kMaxIters = 2000;
  int wins = 0;
  std::string detail;
  for (uint64_t seed : {101, 202, 303}) {
    const geo::AblationResult r = geo::ablation_sphere(0.35, 128, kMaxIters, 25, seed);
    const int baseline = r.baseline_iters > 0 ? r.baseline_iters : kMaxIters;
    const bool win = r.encoded_iters > 0 && 2 * r.encoded_iters <= baseline;
    wins += win;
    detail += " [seed " + std::to_string(seed) + ": " + std::to_string(r.encoded_iters) +
              " vs " + (r.baseline_iters > 0 ? std::to_string(r.baseline_iters)
                                             : ">" + std::to_string(kMaxIters)) +
              "]";
  }
  Outcome out;
  out.pass = wins >= 2;
  out.detail = "encoded vs baseline iters:" + detail + " majority " +
               std::to_string(wins) + "/3";
  return out;
}

Outcome inversion_convergence() {
  constexpr long kDim = 768;
  constexpr int kSub = 8;
  constexpr double kLossDrop = 1e-6;
  constexpr double kEscape = 1e-10;
  bool all = true;
  double worst_escape = 0.0, worst_ratio = 0.0;
  for (uint64_t seed : {21, 22, 23}) {
    Rng rng(seed);
    const inv::Vocabulary vocab = random_vocab(rng, 32, kDim);
    const Vec e_style =
        inv::init_token(random_matrix(rng, kDim, 1).col(0), vocab, inv::TokenKind::kStyle);
    const Vec e_object =
        inv::init_token(random_matrix(rng, kDim, 1).col(0), vocab, inv::TokenKind::kObject);
    const Vec e_etc = inv::init_token(Vec(), vocab, inv::TokenKind::kEtc, 0.1, 16, seed);
    const inv::PromptEmbedding base = inv::assemble_prompt(e_style, e_object, e_etc, vocab);
    const inv::EmbeddingSubspace sub = inv::pca_fit(vocab.embeddings, kSub);

    Vec hidden(kSub);
    for (int i = 0; i < kSub; ++i) hidden(i) = rng.uniform(-1.0, 1.0);
    const inv::ScoringOracle oracle =
        inv::quadratic_oracle(inv::pool_pseudo(base) + sub.basis * hidden);

    double escape = 0.0;
    const inv::ScoringOracle probe{
        "probe", [&](const inv::PromptEmbedding& p, uint64_t key) {
          for (int s : inv::kPseudoSlots) {
            const Vec delta = p.slots.col(s) - base.slots.col(s);
            const Vec residual = delta - sub.basis * (sub.basis.transpose() * delta);
            escape = std::max(escape, residual.cwiseAbs().maxCoeff());
          }
          return oracle.evaluate(p, key);
        }};

    inv::InversionOptions opt;  // 200 generations
    const inv::InversionResult res = inv::optimize_embedding(probe, base, sub, opt, seed);
    const double ratio = res.best_loss / res.initial_loss;
    worst_ratio = std::max(worst_ratio, ratio);
    worst_escape = std::max(worst_escape, escape);
    all = all && ratio < kLossDrop && escape < kEscape;
  }
  Outcome out;
  out.pass = all;
  out.detail = "3 seeds, worst loss ratio " + fmt("%.2e", worst_ratio) +
               " < 1e-06, worst confinement escape " + fmt("%.2e", worst_escape) +
               " < 1e-10";
  return out;
}

Outcome pca_equivalence() {
  constexpr double kTol = 1e-8;
  Rng rng(17);
  const Mat data = random_matrix(rng, 10, 6);
  const inv::EmbeddingSubspace sub = inv::pca_fit(data, 6);

  const Mat centered = data.rowwise() - data.colwise().mean();
  const Mat cov = centered.transpose() * centered / 9.0;
  Mat vectors;
  Vec values;
  jacobi_eig(cov, vectors, values);

  // sort the dense result by descending eigenvalue, then align signs
  std::vector<long> order(6);
  for (long i = 0; i < 6; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](long a, long b) { return values(a) > values(b); });

  double max_diff = 0.0;
  for (long c = 0; c < 6; ++c) {
    Vec ref = vectors.col(order[static_cast<size_t>(c)]);
    if (ref.dot(sub.basis.col(c)) < 0.0) ref = -ref;
    max_diff = std::max(max_diff, (ref - sub.basis.col(c)).cwiseAbs().maxCoeff());
    max_diff = std::max(max_diff,
                        std::abs(values(order[static_cast<size_t>(c)]) - sub.eigenvalues(c)));
  }
  Outcome out;
  out.pass = max_diff < kTol;
  out.detail = "max entry diff vs dense eigendecomposition " + fmt("%.2e", max_diff) +
               " < 1e-08";
  return out;
}

Outcome psnr_exactness() {
  constexpr double kTol = 1e-3;
  const Mat a = Mat::Constant(3, 128, 0.3);
  const Mat b = a.array() + 0.1;
  const Mat c = a.array() + 0.5;
  const double p01 = raster::psnr(a, b);
  const double p05 = raster::psnr(a, c);
  const double cap = raster::psnr(a, a);
  Outcome out;
  out.pass = std::abs(p01 - 20.0) < kTol && std::abs(p05 - 6.0206) < kTol && cap == 99.0;
  out.detail = "0.1 -> " + fmt("%.4f", p01) + " dB, 0.5 -> " + fmt("%.4f", p05) +
               " dB, identical -> " + fmt("%.1f", cap);
  return out;
}

Outcome artifact_determinism() {
  const fs::path root = fs::temp_directory_path() / "mtk_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string configs = MTK_CONFIG_DIR;

  bool same = true;
  std::string detail;

  cli::Overrides fit_a, fit_b;
  fit_a.out = (root / "fit_a").string();
  fit_b.out = (root / "fit_b").string();
  fit_a.iters = fit_b.iters = 20;
  same = same && cli::run_command("fit-shape", configs + "/fit_torus.json", fit_a) == 0;
  same = same && cli::run_command("fit-shape", configs + "/fit_torus.json", fit_b) == 0;
  for (const char* name : {"mesh.obj", "checkpoint.mtfk", "loss.csv", "metrics.csv"}) {
    if (read_file(root / "fit_a" / name) != read_file(root / "fit_b" / name)) {
      same = false;
      detail += std::string(" fit:") + name + " differs;";
    }
  }

  cli::Overrides inv_a, inv_b;
  inv_a.out = (root / "inv_a").string();
  inv_b.out = (root / "inv_b").string();
  same = same && cli::run_command("invert", configs + "/invert_quadratic.json", inv_a) == 0;
  same = same && cli::run_command("invert", configs + "/invert_quadratic.json", inv_b) == 0;
  for (const char* name : {"embedding.txt", "trace.csv", "metrics.csv"}) {
    if (read_file(root / "inv_a" / name) != read_file(root / "inv_b" / name)) {
      same = false;
      detail += std::string(" invert:") + name + " differs;";
    }
  }

  Outcome out;
  out.pass = same;
  out.detail = same ? "fit-shape and invert artifacts byte-identical across reruns"
                    : "mismatch:" + detail;
  return out;
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    std::function<Outcome()> fn;
    double budget_s;  // wall-clock bound; <= 0 means untimed
  };
  const std::vector<Entry> entries = {
      {"extraction correctness", extraction_correctness, 5.0},
      {"differentiable extraction", differentiable_extraction, 30.0},
      {"ellipsoid warm-up", ellipsoid_warmup, 60.0},
      {"coarse-to-fine fit", coarse_to_fine_fit, 600.0},
      {"surface-mode refinement", surface_mode_refinement, 600.0},
      {"encoding ablation", encoding_ablation, 0.0},
      {"inversion convergence", inversion_convergence, 60.0},
      {"pca equivalence", pca_equivalence, 1.0},
      {"psnr exactness", psnr_exactness, 1.0},
      {"artifact determinism", artifact_determinism, 0.0},
  };

  int passed = 0;
  for (size_t i = 0; i < entries.size(); ++i) {
    const auto t0 = clk::now();
    Outcome out;
    try {
      out = entries[i].fn();
    } catch (const std::exception& ex) {
      out.pass = false;
      out.detail = std::string("exception: ") + ex.what();
    }
    const double secs = std::chrono::duration<double>(clk::now() - t0).count();
    if (entries[i].budget_s > 0.0 && secs >= entries[i].budget_s) {
      out.pass = false;
      out.detail += " [over " + fmt("%.0f", entries[i].budget_s) + " s budget]";
    }
    passed += out.pass;
    std::printf("criterion %2zu  %-28s %s  %s  (%.1f s)\n", i + 1, entries[i].name,
                out.pass ? "PASS" : "FAIL", out.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/%zu criteria passed\n", passed, entries.size());
  return passed == static_cast<int>(entries.size()) ? 0 : 1;
}
