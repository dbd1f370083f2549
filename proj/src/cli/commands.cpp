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

#include "mtk/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "mtk/field/checkpoint.hpp"
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
#include "mtk/raster/camera.hpp"
#include "mtk/raster/render.hpp"
#include "mtk/rng.hpp"

namespace mtk::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Context {
  json config;
  fs::path config_dir;  // anchor for relative input paths
  uint64_t seed = 0;
  fs::path out;
};

void check_keys(const json& j, const std::string& what,
                std::initializer_list<const char*> allowed) {
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) known = known || it.key() == key;
    if (!known)
      throw ConfigError("unknown key '" + it.key() + "' in " + what);
  }
}

const json& require(const json& j, const char* key, const std::string& what) {
  if (!j.contains(key))
    throw ConfigError(what + " requires the key '" + key + "'");
  return j[key];
}

double as_double(const json& j, const std::string& what) {
  if (!j.is_number()) throw ConfigError(what + " must be a number");
  return j.get<double>();
}

long as_long(const json& j, const std::string& what) {
  if (!j.is_number_integer()) throw ConfigError(what + " must be an integer");
  return j.get<long>();
}

bool as_bool(const json& j, const std::string& what) {
  if (!j.is_boolean()) throw ConfigError(what + " must be a boolean");
  return j.get<bool>();
}

std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ConfigError(what + " must be a string");
  return j.get<std::string>();
}

Vec3 as_vec3(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw ConfigError(what + " must be an array of three numbers");
  return Vec3(as_double(j[0], what), as_double(j[1], what), as_double(j[2], what));
}

double num_or(const json& j, const char* key, double fallback) {
  return j.contains(key) ? as_double(j[key], std::string("'") + key + "'") : fallback;
}

long int_or(const json& j, const char* key, long fallback) {
  return j.contains(key) ? as_long(j[key], std::string("'") + key + "'") : fallback;
}

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& ex) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + ex.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be a JSON object");
  return j;
}

Context open_context(const std::string& config_path, const Overrides& o,
                     std::initializer_list<const char*> allowed) {
  Context ctx;
  ctx.config = parse_file(config_path);
  if (o.seed) ctx.config["seed"] = *o.seed;
  if (o.out) ctx.config["out"] = *o.out;
  if (o.iters) ctx.config["iters"] = *o.iters;
  check_keys(ctx.config, "the config", allowed);

  const json& seed = require(ctx.config, "seed", "the config");
  if (!seed.is_number_integer() || seed.get<long long>() < 0)
    throw ConfigError("every run needs an explicit non-negative integer 'seed'");
  ctx.seed = seed.get<uint64_t>();

  ctx.out = fs::path(as_string(require(ctx.config, "out", "the config"), "'out'"));
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw ConfigError("cannot create output directory '" + ctx.out.string() + "'");

  ctx.config_dir = fs::absolute(fs::path(config_path)).parent_path();
  return ctx;
}

std::string resolve_input(const Context& ctx, const std::string& p) {
  const fs::path q(p);
  return q.is_absolute() ? q.string() : (ctx.config_dir / q).string();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_metrics(const fs::path& path,
                   const std::vector<std::pair<std::string, std::string>>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  out << "metric,value\n";
  for (const auto& [k, v] : rows) out << k << "," << v << "\n";
  if (!out) throw ConfigError("failed writing '" + path.string() + "'");
}

geo::TargetShape parse_shape(const json& j, const std::string& what) {
  if (!j.is_object()) throw ConfigError(what + " must be an object");
  const std::string kind = as_string(require(j, "kind", what), what + ".kind");
  if (kind == "sphere") {
    check_keys(j, what, {"kind", "radius"});
    return geo::make_sphere(as_double(require(j, "radius", what), what + ".radius"));
  }
  if (kind == "ellipsoid") {
    check_keys(j, what, {"kind", "semi_axes"});
    return geo::make_ellipsoid(as_vec3(require(j, "semi_axes", what), what + ".semi_axes"));
  }
  if (kind == "torus") {
    check_keys(j, what, {"kind", "major", "minor"});
    return geo::make_torus(as_double(require(j, "major", what), what + ".major"),
                           as_double(require(j, "minor", what), what + ".minor"));
  }
  if (kind == "box") {
    check_keys(j, what, {"kind", "half_extent"});
    return geo::make_box(as_vec3(require(j, "half_extent", what), what + ".half_extent"));
  }
  if (kind == "capsule") {
    check_keys(j, what, {"kind", "a", "b", "radius"});
    return geo::make_capsule(as_vec3(require(j, "a", what), what + ".a"),
                             as_vec3(require(j, "b", what), what + ".b"),
                             as_double(require(j, "radius", what), what + ".radius"));
  }
  if (kind == "union" || kind == "intersection" || kind == "difference") {
    check_keys(j, what, {"kind", "a", "b"});
    geo::TargetShape a = parse_shape(require(j, "a", what), what + ".a");
    geo::TargetShape b = parse_shape(require(j, "b", what), what + ".b");
    if (kind == "union") return geo::shape_union(std::move(a), std::move(b));
    if (kind == "intersection") return geo::shape_intersection(std::move(a), std::move(b));
    return geo::shape_difference(std::move(a), std::move(b));
  }
  throw ConfigError(what + ": unknown shape kind '" + kind + "'");
}

BoundingBox parse_domain(const json& cfg) {
  BoundingBox box;
  if (cfg.contains("domain")) {
    const json& j = cfg["domain"];
    check_keys(j, "'domain'", {"half"});
    const double half = as_double(require(j, "half", "'domain'"), "'domain.half'");
    if (!(half > 0.0)) throw ConfigError("'domain.half' must be positive");
    box.lo = Vec3::Constant(-half);
    box.hi = Vec3::Constant(half);
  }
  box.validate();
  return box;
}

field::SdfNetworkConfig parse_network(const json& cfg, const BoundingBox& box,
                                      int resolution) {
  field::SdfNetworkConfig net;
  net.domain = box;
  net.resolution = resolution;
  if (cfg.contains("network")) {
    const json& j = cfg["network"];
    check_keys(j, "'network'",
               {"levels", "base_resolution", "growth", "table_size", "features",
                "hidden", "offset_bound"});
    net.grid.levels = static_cast<int>(int_or(j, "levels", net.grid.levels));
    net.grid.base_resolution =
        static_cast<int>(int_or(j, "base_resolution", net.grid.base_resolution));
    net.grid.growth = num_or(j, "growth", net.grid.growth);
    net.grid.table_size = static_cast<int>(int_or(j, "table_size", net.grid.table_size));
    net.grid.features = static_cast<int>(int_or(j, "features", net.grid.features));
    net.hidden = static_cast<int>(int_or(j, "hidden", net.hidden));
    net.offset_bound = num_or(j, "offset_bound", net.offset_bound);
  }
  net.validate();
  return net;
}

geo::FitSchedule parse_schedule(const json& cfg) {
  geo::FitSchedule schedule;
  if (cfg.contains("schedule")) {
    const json& j = cfg["schedule"];
    check_keys(j, "'schedule'",
               {"stages", "batch", "lr_mlp", "lr_table", "chamfer_every",
                "chamfer_samples"});
    if (j.contains("stages")) {
      if (!j["stages"].is_array() || j["stages"].empty())
        throw ConfigError("'schedule.stages' must be a non-empty array");
      schedule.stages.clear();
      for (const json& s : j["stages"]) {
        check_keys(s, "a schedule stage", {"resolution", "iters", "w_sdf", "w_eik"});
        geo::FitStage stage;
        stage.resolution =
            static_cast<int>(as_long(require(s, "resolution", "a stage"), "stage resolution"));
        stage.iters = static_cast<int>(as_long(require(s, "iters", "a stage"), "stage iters"));
        stage.w_sdf = num_or(s, "w_sdf", stage.w_sdf);
        stage.w_eik = num_or(s, "w_eik", stage.w_eik);
        schedule.stages.push_back(stage);
      }
    }
    schedule.batch = static_cast<int>(int_or(j, "batch", schedule.batch));
    schedule.lr_mlp = num_or(j, "lr_mlp", schedule.lr_mlp);
    schedule.lr_table = num_or(j, "lr_table", schedule.lr_table);
    schedule.chamfer_every =
        static_cast<int>(int_or(j, "chamfer_every", schedule.chamfer_every));
    schedule.chamfer_samples =
        static_cast<int>(int_or(j, "chamfer_samples", schedule.chamfer_samples));
  }
  if (cfg.contains("iters")) {
    const long n = as_long(cfg["iters"], "'iters'");
    for (auto& stage : schedule.stages) stage.iters = static_cast<int>(n);
  }
  schedule.validate();
  return schedule;
}

raster::Camera parse_camera(const json& j, int index) {
  const std::string what = "camera " + std::to_string(index);
  check_keys(j, what,
             {"mode", "position", "look_at", "up", "width", "height",
              "half_extent", "vfov_deg"});
  raster::Camera cam;
  const std::string mode = as_string(require(j, "mode", what), what + ".mode");
  if (mode == "orthographic") {
    cam.mode = raster::CameraMode::kOrthographic;
  } else if (mode == "pinhole") {
    cam.mode = raster::CameraMode::kPinhole;
  } else {
    throw ConfigError(what + ": unknown mode '" + mode + "'");
  }
  cam.position = as_vec3(require(j, "position", what), what + ".position");
  cam.look_at = as_vec3(require(j, "look_at", what), what + ".look_at");
  if (j.contains("up")) cam.up = as_vec3(j["up"], what + ".up");
  cam.width = static_cast<int>(int_or(j, "width", cam.width));
  cam.height = static_cast<int>(int_or(j, "height", cam.height));
  cam.half_extent = num_or(j, "half_extent", cam.half_extent);
  cam.vfov_deg = num_or(j, "vfov_deg", cam.vfov_deg);
  cam.validate();
  return cam;
}

inv::ScoringOracle parse_oracle(const json& cfg, const Context& ctx,
                                const inv::PromptEmbedding& base,
                                const inv::EmbeddingSubspace& sub) {
  const json& j = require(cfg, "oracle", "the invert config");
  const std::string what = "'oracle'";
  const std::string kind = as_string(require(j, "kind", what), what + ".kind");
  if (kind == "hidden-quadratic") {
    // self-contained acceptance oracle: the optimum is a seeded coefficient
    // vector inside the search subspace, so zero loss is reachable
    check_keys(j, what, {"kind", "hidden_seed"});
    const long hidden_seed = int_or(j, "hidden_seed", 0);
    Rng rng(Rng::derive(static_cast<uint64_t>(hidden_seed), "hidden-target"));
    Vec q(sub.basis.cols());
    for (long i = 0; i < q.size(); ++i) q(i) = rng.uniform(-1.0, 1.0);
    return inv::quadratic_oracle(inv::pool_pseudo(base) + sub.basis * q);
  }
  const Vec target = inv::read_embedding_line(
      resolve_input(ctx, as_string(require(j, "target", what), what + ".target")),
      base.slots.rows());
  if (kind == "quadratic") {
    check_keys(j, what, {"kind", "target"});
    return inv::quadratic_oracle(target);
  }
  if (kind == "cosine") {
    check_keys(j, what, {"kind", "target"});
    return inv::cosine_oracle(target);
  }
  if (kind == "noisy-cosine") {
    check_keys(j, what, {"kind", "target", "noise_std"});
    return inv::noisy_proxy_oracle(
        target, as_double(require(j, "noise_std", what), what + ".noise_std"));
  }
  throw ConfigError(what + ": unknown kind '" + kind + "'");
}

}  // namespace

void cmd_fit_shape(const std::string& config_path, const Overrides& o) {
  const Context ctx = open_context(
      config_path, o,
      {"seed", "out", "iters", "target", "domain", "network", "schedule", "mode",
       "warmup", "chamfer_samples"});
  const json& cfg = ctx.config;

  const BoundingBox box = parse_domain(cfg);
  const geo::TargetShape target = parse_shape(require(cfg, "target", "the config"), "'target'");
  const geo::FitSchedule schedule = parse_schedule(cfg);
  const int final_res = schedule.stages.back().resolution;

  std::string mode = "geometry";
  if (cfg.contains("mode")) mode = as_string(cfg["mode"], "'mode'");
  if (mode != "geometry" && mode != "surface")
    throw ConfigError("'mode' must be \"geometry\" or \"surface\"");

  field::SdfNetwork net(parse_network(cfg, box, final_res), ctx.seed);
  geo::check_inside_box(target, box, ctx.seed);

  long warm_iters = 500;
  Vec3 semi_axes = 0.35 * box.extent() / 2.0;
  if (cfg.contains("warmup")) {
    const json& j = cfg["warmup"];
    check_keys(j, "'warmup'", {"iters", "semi_axes"});
    warm_iters = int_or(j, "iters", warm_iters);
    if (warm_iters < 0) throw ConfigError("'warmup.iters' must be non-negative");
    if (j.contains("semi_axes")) semi_axes = as_vec3(j["semi_axes"], "'warmup.semi_axes'");
  }
  const field::WarmupResult warm = field::init_ellipsoid(
      net, semi_axes, static_cast<int>(warm_iters), Rng::derive(ctx.seed, "warmup"));

  const geo::FitReport report = mode == "surface"
                                    ? geo::fit_surface_mode(net, target, schedule, ctx.seed)
                                    : geo::fit_geometry(net, target, schedule, ctx.seed);

  flexi::FlexiGrid grid = geo::field_to_grid(net, final_res);
  const flexi::Extraction ex = flexi::extract_mesh(grid);
  if (ex.mesh.empty())
    throw NumericalError("final extraction produced no surface; nothing to write");
  const flexi::MeshReport shape = flexi::mesh_validate(ex.mesh);
  const geo::ChamferResult ch = geo::chamfer(ex.mesh, target, schedule.chamfer_samples,
                                             Rng::derive(ctx.seed, "metrics-chamfer"));

  const Mat normals = flexi::vertex_normals(ex.mesh);
  flexi::write_obj((ctx.out / "mesh.obj").string(), ex.mesh, &normals);
  field::save_sdf(net, (ctx.out / "checkpoint.mtfk").string());
  geo::write_loss_csv((ctx.out / "loss.csv").string(), report.log);

  std::vector<std::pair<std::string, std::string>> rows;
  rows.emplace_back("warmup_probe_mae", fmt(warm.probe_mae));
  for (size_t i = 0; i < report.stage_chamfer.size(); ++i)
    rows.emplace_back("stage_chamfer_" + std::to_string(i), fmt(report.stage_chamfer[i]));
  rows.emplace_back("chamfer_l1", fmt(ch.chamfer_l1));
  rows.emplace_back("hausdorff95", fmt(ch.hausdorff95));
  rows.emplace_back("watertight", shape.watertight ? "true" : "false");
  rows.emplace_back("euler", std::to_string(shape.euler));
  rows.emplace_back("vertices", std::to_string(ex.mesh.n_vertices()));
  rows.emplace_back("triangles", std::to_string(ex.mesh.n_triangles()));
  write_metrics(ctx.out / "metrics.csv", rows);
}

void cmd_invert(const std::string& config_path, const Overrides& o) {
  const Context ctx = open_context(
      config_path, o,
      {"seed", "out", "iters", "vocabulary", "style_query", "object_query",
       "subspace_dim", "temperature", "top_k", "oracle", "generations", "sigma0",
       "sequential", "noise_key"});
  const json& cfg = ctx.config;

  const inv::Vocabulary vocab = inv::read_vocabulary(
      resolve_input(ctx, as_string(require(cfg, "vocabulary", "the config"), "'vocabulary'")));
  const Vec style_query = inv::read_embedding_line(
      resolve_input(ctx, as_string(require(cfg, "style_query", "the config"), "'style_query'")),
      vocab.dim());
  const Vec object_query = inv::read_embedding_line(
      resolve_input(ctx, as_string(require(cfg, "object_query", "the config"), "'object_query'")),
      vocab.dim());

  const double temperature = num_or(cfg, "temperature", 0.1);
  const int top_k = static_cast<int>(int_or(cfg, "top_k", 16));
  const int dim = static_cast<int>(int_or(cfg, "subspace_dim", 8));

  const Vec e_style =
      inv::init_token(style_query, vocab, inv::TokenKind::kStyle, temperature, top_k);
  const Vec e_object =
      inv::init_token(object_query, vocab, inv::TokenKind::kObject, temperature, top_k);
  const Vec e_etc = inv::init_token(Vec(), vocab, inv::TokenKind::kEtc, temperature,
                                    top_k, ctx.seed);
  const inv::PromptEmbedding base = inv::assemble_prompt(e_style, e_object, e_etc, vocab);
  const inv::EmbeddingSubspace sub = inv::pca_fit(vocab.embeddings, dim);
  const inv::ScoringOracle oracle = parse_oracle(cfg, ctx, base, sub);

  inv::InversionOptions opt;
  opt.generations = static_cast<int>(int_or(cfg, "generations", opt.generations));
  if (cfg.contains("iters"))
    opt.generations = static_cast<int>(as_long(cfg["iters"], "'iters'"));
  opt.sigma0 = num_or(cfg, "sigma0", opt.sigma0);
  if (cfg.contains("sequential")) opt.sequential = as_bool(cfg["sequential"], "'sequential'");
  opt.noise_key = static_cast<uint64_t>(int_or(cfg, "noise_key", 0));

  const inv::InversionResult res = inv::optimize_embedding(oracle, base, sub, opt, ctx.seed);

  inv::write_embedding_columns((ctx.out / "embedding.txt").string(), res.slots);
  inv::write_trace_csv((ctx.out / "trace.csv").string(), res.trace);
  write_metrics(ctx.out / "metrics.csv",
                {{"initial_loss", fmt(res.initial_loss)},
                 {"best_loss", fmt(res.best_loss)},
                 {"generations", std::to_string(res.trace.size())}});
}

void cmd_render(const std::string& config_path, const Overrides& o) {
  const Context ctx =
      open_context(config_path, o, {"seed", "out", "mesh", "texture", "cameras"});
  const json& cfg = ctx.config;

  const flexi::TriMesh mesh = flexi::read_obj(
      resolve_input(ctx, as_string(require(cfg, "mesh", "the config"), "'mesh'")));

  std::optional<field::TextureField> texture;
  if (cfg.contains("texture"))
    texture = field::load_texture(
        resolve_input(ctx, as_string(cfg["texture"], "'texture'")));

  const json& cams = require(cfg, "cameras", "the config");
  if (!cams.is_array() || cams.empty())
    throw ConfigError("'cameras' must be a non-empty array");

  for (size_t i = 0; i < cams.size(); ++i) {
    const raster::Camera cam = parse_camera(cams[i], static_cast<int>(i));
    const raster::RenderTarget t =
        raster::render(mesh, cam, texture ? &*texture : nullptr);
    const std::string tag = std::to_string(i);
    raster::write_pgm((ctx.out / ("mask_" + tag + ".pgm")).string(), t.mask);
    raster::write_pgm((ctx.out / ("depth_" + tag + ".pgm")).string(),
                      raster::depth_to_unit(t.depth));
    raster::write_normal_map((ctx.out / ("normal_" + tag + ".bin")).string(), t.normal,
                             t.width, t.height);
    if (t.has_rgb())
      raster::write_ppm((ctx.out / ("rgb_" + tag + ".ppm")).string(), t.rgb, t.width,
                        t.height);
  }
}

void cmd_eval(const std::string& config_path, const Overrides& o) {
  const Context ctx = open_context(
      config_path, o, {"seed", "out", "mesh", "target", "chamfer_samples", "images"});
  const json& cfg = ctx.config;

  std::vector<std::pair<std::string, std::string>> rows;

  std::optional<flexi::TriMesh> mesh;
  if (cfg.contains("mesh")) {
    mesh = flexi::read_obj(resolve_input(ctx, as_string(cfg["mesh"], "'mesh'")));
    const flexi::MeshReport rep = flexi::mesh_validate(*mesh);
    rows.emplace_back("watertight", rep.watertight ? "true" : "false");
    rows.emplace_back("euler", std::to_string(rep.euler));
    rows.emplace_back("boundary_edges", std::to_string(rep.boundary_edges));
    rows.emplace_back("nonmanifold_edges", std::to_string(rep.nonmanifold_edges));
    rows.emplace_back("vertices", std::to_string(mesh->n_vertices()));
    rows.emplace_back("triangles", std::to_string(mesh->n_triangles()));
  }

  if (cfg.contains("target")) {
    if (!mesh) throw ConfigError("'target' requires a 'mesh' to compare against");
    const geo::TargetShape target = parse_shape(cfg["target"], "'target'");
    const int samples = static_cast<int>(int_or(cfg, "chamfer_samples", 4096));
    const geo::ChamferResult ch =
        geo::chamfer(*mesh, target, samples, Rng::derive(ctx.seed, "eval-chamfer"));
    rows.emplace_back("chamfer_l1", fmt(ch.chamfer_l1));
    rows.emplace_back("hausdorff95", fmt(ch.hausdorff95));
  }

  if (cfg.contains("images")) {
    const json& images = cfg["images"];
    if (!images.is_array()) throw ConfigError("'images' must be an array");
    for (size_t i = 0; i < images.size(); ++i) {
      const std::string what = "images[" + std::to_string(i) + "]";
      check_keys(images[i], what, {"a", "b", "kind"});
      const std::string a =
          resolve_input(ctx, as_string(require(images[i], "a", what), what + ".a"));
      const std::string b =
          resolve_input(ctx, as_string(require(images[i], "b", what), what + ".b"));
      std::string kind = "ppm";
      if (images[i].contains("kind")) kind = as_string(images[i]["kind"], what + ".kind");
      double value = 0.0;
      if (kind == "ppm") {
        int wa = 0, ha = 0, wb = 0, hb = 0;
        const Mat ia = raster::read_ppm(a, wa, ha);
        const Mat ib = raster::read_ppm(b, wb, hb);
        if (wa != wb || ha != hb)
          throw ConfigError(what + ": image dimensions differ");
        value = raster::psnr(ia, ib);
      } else if (kind == "pgm") {
        value = raster::psnr(raster::read_pgm(a), raster::read_pgm(b));
      } else {
        throw ConfigError(what + ": unknown kind '" + kind + "'");
      }
      rows.emplace_back("psnr_" + std::to_string(i), fmt(value));
    }
  }

  if (rows.empty())
    throw ConfigError("eval config names nothing to evaluate");
  write_metrics(ctx.out / "metrics.csv", rows);
}

void cmd_extract_mesh(const std::string& config_path, const Overrides& o) {
  const Context ctx =
      open_context(config_path, o, {"seed", "out", "checkpoint", "resolution"});
  const json& cfg = ctx.config;

  field::SdfNetwork net = field::load_sdf(resolve_input(
      ctx, as_string(require(cfg, "checkpoint", "the config"), "'checkpoint'")));
  const int resolution =
      static_cast<int>(int_or(cfg, "resolution", net.resolution()));
  if (resolution < 2) throw ConfigError("'resolution' must be at least 2");

  flexi::FlexiGrid grid = geo::field_to_grid(net, resolution);
  const flexi::Extraction ex = flexi::extract_mesh(grid);
  if (ex.mesh.empty())
    throw NumericalError("extraction produced no surface at resolution " +
                         std::to_string(resolution));
  const Mat normals = flexi::vertex_normals(ex.mesh);
  flexi::write_obj((ctx.out / "mesh.obj").string(), ex.mesh, &normals);
}

int run_command(const std::string& name, const std::string& config_path,
                const Overrides& o) {
  try {
    if (name == "fit-shape") {
      cmd_fit_shape(config_path, o);
    } else if (name == "invert") {
      cmd_invert(config_path, o);
    } else if (name == "render") {
      cmd_render(config_path, o);
    } else if (name == "eval") {
      cmd_eval(config_path, o);
    } else if (name == "extract-mesh") {
      cmd_extract_mesh(config_path, o);
    } else {
      throw ConfigError("unknown command '" + name + "'");
    }
    return 0;
  } catch (const ConfigError& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return 2;
  } catch (const NumericalError& ex) {
    std::cerr << "numerical abort: " << ex.what() << std::endl;
    return 3;
  } catch (const std::invalid_argument& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return 2;
  } catch (const json::exception& ex) {
    std::cerr << "error: " << ex.what() << std::endl;
    return 2;
  } catch (const std::exception& ex) {
    std::cerr << "unexpected failure: " << ex.what() << std::endl;
    return 1;
  }
}

}  // namespace mtk::cli
