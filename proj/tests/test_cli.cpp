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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "mtk/cli/commands.hpp"
#include "mtk/field/checkpoint.hpp"
#include "mtk/field/fit_sdf.hpp"
#include "mtk/field/network.hpp"
#include "mtk/flexi/mesh.hpp"
#include "mtk/raster/render.hpp"

namespace fs = std::filesystem;
using namespace mtk;

namespace {

const std::string kConfigDir = MTK_CONFIG_DIR;

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mtk_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: " << p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

long count_lines(const fs::path& p) {
  const std::string text = read_file(p);
  long n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

std::map<std::string, std::string> read_metrics(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE_MESSAGE(in.good(), "missing metrics: " << p.string());
  std::map<std::string, std::string> rows;
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "metric,value");
  while (std::getline(in, line)) {
    const size_t comma = line.find(',');
    REQUIRE(comma != std::string::npos);
    rows[line.substr(0, comma)] = line.substr(comma + 1);
  }
  return rows;
}

double metric(const std::map<std::string, std::string>& rows, const std::string& key) {
  REQUIRE_MESSAGE(rows.count(key) == 1, "missing metric: " << key);
  return std::stod(rows.at(key));
}

// Runs the installed binary through the shell; returns the process exit code.
int run_binary(const std::string& args) {
  const std::string cmd = std::string(MTK_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

cli::Overrides out_to(const fs::path& dir) {
  cli::Overrides o;
  o.out = dir.string();
  return o;
}

}  // namespace

TEST_CASE("the bundled torus fit writes its artifacts and beats the cell threshold") {
  const fs::path out = fresh_dir("fit_torus");
  REQUIRE(cli::run_command("fit-shape", kConfigDir + "/fit_torus.json", out_to(out)) == 0);

  for (const char* name : {"mesh.obj", "checkpoint.mtfk", "loss.csv", "metrics.csv"})
    CHECK_MESSAGE(fs::exists(out / name), name);

  const auto rows = read_metrics(out / "metrics.csv");
  CHECK(metric(rows, "chamfer_l1") < 3.0 * (1.0 / 32.0));
  CHECK(rows.at("watertight") == "true");
  CHECK(rows.at("euler") == "0");  // a torus

  const flexi::TriMesh mesh = flexi::read_obj((out / "mesh.obj").string());
  const flexi::MeshReport rep = flexi::mesh_validate(mesh);
  CHECK(rep.watertight);
  CHECK(rep.euler == 0);
}

TEST_CASE("repeated shape fits are byte identical") {
  const fs::path a = fresh_dir("fit_rep_a");
  const fs::path b = fresh_dir("fit_rep_b");
  cli::Overrides oa = out_to(a);
  oa.iters = 20;
  cli::Overrides ob = out_to(b);
  ob.iters = 20;
  const std::string cfg = kConfigDir + "/fit_torus.json";
  REQUIRE(cli::run_command("fit-shape", cfg, oa) == 0);
  REQUIRE(cli::run_command("fit-shape", cfg, ob) == 0);
  for (const char* name : {"mesh.obj", "checkpoint.mtfk", "loss.csv", "metrics.csv"})
    CHECK_MESSAGE(read_file(a / name) == read_file(b / name), name);
}

TEST_CASE("the bundled inversion collapses the quadratic loss and reproduces bitwise") {
  const fs::path a = fresh_dir("inv_a");
  const fs::path b = fresh_dir("inv_b");
  const std::string cfg = kConfigDir + "/invert_quadratic.json";
  REQUIRE(cli::run_command("invert", cfg, out_to(a)) == 0);
  REQUIRE(cli::run_command("invert", cfg, out_to(b)) == 0);

  for (const char* name : {"embedding.txt", "trace.csv", "metrics.csv"})
    CHECK_MESSAGE(read_file(a / name) == read_file(b / name), name);

  const auto rows = read_metrics(a / "metrics.csv");
  CHECK(metric(rows, "best_loss") < 1e-6 * metric(rows, "initial_loss"));
  CHECK(count_lines(a / "trace.csv") == 201);   // header + one row per generation
  CHECK(count_lines(a / "embedding.txt") == 3);  // style, object, etc
}

TEST_CASE("an iteration override caps the inversion budget") {
  const fs::path out = fresh_dir("inv_short");
  cli::Overrides o = out_to(out);
  o.iters = 1;
  REQUIRE(cli::run_command("invert", kConfigDir + "/invert_quadratic.json", o) == 0);
  CHECK(count_lines(out / "trace.csv") == 2);
  CHECK(read_metrics(out / "metrics.csv").at("generations") == "1");
}

TEST_CASE("rendering writes mask, depth, and normal maps per camera") {
  const fs::path out = fresh_dir("render");
  REQUIRE(cli::run_command("render", kConfigDir + "/render_views.json", out_to(out)) == 0);

  size_t files = 0;
  for (const auto& e : fs::directory_iterator(out)) {
    (void)e;
    ++files;
  }
  CHECK(files == 6);  // two cameras, three maps each, no texture
  for (const char* name : {"mask_0.pgm", "depth_0.pgm", "normal_0.bin", "mask_1.pgm",
                           "depth_1.pgm", "normal_1.bin"})
    CHECK_MESSAGE(fs::exists(out / name), name);

  const Mat mask = raster::read_pgm((out / "mask_0.pgm").string());
  CHECK(mask.rows() == 128);
  CHECK(mask.cols() == 128);
  CHECK(mask.maxCoeff() == 1.0);  // the octahedron is in frame
}

TEST_CASE("a texture checkpoint adds color images to the render") {
  const fs::path dir = fresh_dir("render_tex");
  field::TextureFieldConfig tcfg;
  tcfg.hidden = 16;
  tcfg.domain.lo = Vec3::Constant(-1.5);
  tcfg.domain.hi = Vec3::Constant(1.5);
  field::TextureField tex(tcfg, 7);
  field::save_texture(tex, (dir / "texture.mtfk").string());

  {
    std::ofstream cfg(dir / "render.json");
    cfg << "{\n"
        << "  \"seed\": 0,\n"
        << "  \"out\": \"" << (dir / "out").string() << "\",\n"
        << "  \"mesh\": \"" << kConfigDir << "/probe_mesh.obj\",\n"
        << "  \"texture\": \"texture.mtfk\",\n"
        << "  \"cameras\": [{\"mode\": \"orthographic\", \"position\": [0, 0, 2.5],\n"
        << "                 \"look_at\": [0, 0, 0], \"width\": 64, \"height\": 64,\n"
        << "                 \"half_extent\": 1.5}]\n"
        << "}\n";
  }
  REQUIRE(cli::run_command("render", (dir / "render.json").string()) == 0);

  int w = 0, h = 0;
  const Mat rgb = raster::read_ppm((dir / "out" / "rgb_0.ppm").string(), w, h);
  CHECK(w == 64);
  CHECK(h == 64);
  CHECK(rgb.maxCoeff() > 0.0);
}

TEST_CASE("eval reports shape, chamfer, and image rows") {
  const fs::path dir = fresh_dir("eval");

  {
    std::ofstream cfg(dir / "render.json");
    cfg << "{\"seed\": 0, \"out\": \"" << (dir / "views").string() << "\",\n"
        << " \"mesh\": \"" << kConfigDir << "/probe_mesh.obj\",\n"
        << " \"cameras\": [{\"mode\": \"orthographic\", \"position\": [0, 0, 2.5],\n"
        << "                \"look_at\": [0, 0, 0], \"width\": 48, \"height\": 48,\n"
        << "                \"half_extent\": 1.5}]}\n";
  }
  REQUIRE(cli::run_command("render", (dir / "render.json").string()) == 0);

  {
    std::ofstream cfg(dir / "eval.json");
    cfg << "{\"seed\": 5, \"out\": \"" << (dir / "out").string() << "\",\n"
        << " \"mesh\": \"" << kConfigDir << "/probe_mesh.obj\",\n"
        << " \"target\": {\"kind\": \"sphere\", \"radius\": 1.0},\n"
        << " \"chamfer_samples\": 512,\n"
        << " \"images\": [{\"a\": \"" << (dir / "views" / "mask_0.pgm").string()
        << "\", \"b\": \"" << (dir / "views" / "mask_0.pgm").string()
        << "\", \"kind\": \"pgm\"}]}\n";
  }
  REQUIRE(cli::run_command("eval", (dir / "eval.json").string()) == 0);

  const auto rows = read_metrics(dir / "out" / "metrics.csv");
  CHECK(rows.at("watertight") == "true");
  CHECK(rows.at("euler") == "2");
  CHECK(rows.at("boundary_edges") == "0");
  // unit octahedron vs unit sphere: faces sit well inside, so the gap is
  // large but bounded
  CHECK(metric(rows, "chamfer_l1") > 0.1);
  CHECK(metric(rows, "chamfer_l1") < 0.45);
  CHECK(metric(rows, "psnr_0") == 99.0);  // identical images hit the cap
}

TEST_CASE("extract-mesh turns a saved checkpoint into a watertight surface") {
  const fs::path dir = fresh_dir("extract");
  field::SdfNetworkConfig cfg;
  cfg.resolution = 16;
  field::SdfNetwork net(cfg, 11);
  field::init_ellipsoid(net, Vec3::Constant(0.5), 200, 11);
  field::save_sdf(net, (dir / "ckpt.mtfk").string());

  {
    std::ofstream j(dir / "extract.json");
    j << "{\"seed\": 0, \"out\": \"" << (dir / "out").string() << "\",\n"
      << " \"checkpoint\": \"ckpt.mtfk\", \"resolution\": 16}\n";
  }
  REQUIRE(cli::run_command("extract-mesh", (dir / "extract.json").string()) == 0);

  const flexi::TriMesh mesh = flexi::read_obj((dir / "out" / "mesh.obj").string());
  REQUIRE(!mesh.empty());
  const flexi::MeshReport rep = flexi::mesh_validate(mesh);
  CHECK(rep.watertight);
  CHECK(rep.euler == 2);
}

TEST_CASE("the command router rejects unknown names") {
  CHECK(cli::run_command("bogus", kConfigDir + "/invert_quadratic.json") == 2);
}

TEST_CASE("usage errors and numerical aborts map to distinct exit codes") {
  const fs::path dir = fresh_dir("exit_codes");
  const fs::path scratch = dir / "scratch";

  {
    std::ofstream bad(dir / "bad.json");
    bad << "{not json";
  }
  {
    std::ofstream unk(dir / "unknown_key.json");
    unk << "{\"seed\": 7, \"out\": \"" << scratch.string() << "\",\n"
        << " \"vocabulary\": \"" << kConfigDir << "/vocabulary.txt\",\n"
        << " \"style_query\": \"" << kConfigDir << "/style_query.txt\",\n"
        << " \"object_query\": \"" << kConfigDir << "/object_query.txt\",\n"
        << " \"oracle\": {\"kind\": \"hidden-quadratic\", \"hidden_seed\": 9},\n"
        << " \"bogus\": 1}\n";
  }
  {
    std::ofstream noseed(dir / "no_seed.json");
    noseed << "{\"out\": \"" << scratch.string() << "\",\n"
           << " \"vocabulary\": \"" << kConfigDir << "/vocabulary.txt\",\n"
           << " \"style_query\": \"" << kConfigDir << "/style_query.txt\",\n"
           << " \"object_query\": \"" << kConfigDir << "/object_query.txt\",\n"
           << " \"oracle\": {\"kind\": \"hidden-quadratic\", \"hidden_seed\": 9}}\n";
  }
  {
    // a decoded candidate overflows the quadratic loss at this step size,
    // which must surface as a numerical abort rather than a config error
    std::ofstream sig(dir / "huge_sigma.json");
    sig << "{\"seed\": 7, \"out\": \"" << scratch.string() << "\",\n"
        << " \"vocabulary\": \"" << kConfigDir << "/vocabulary.txt\",\n"
        << " \"style_query\": \"" << kConfigDir << "/style_query.txt\",\n"
        << " \"object_query\": \"" << kConfigDir << "/object_query.txt\",\n"
        << " \"sigma0\": 1e200,\n"
        << " \"oracle\": {\"kind\": \"hidden-quadratic\", \"hidden_seed\": 9}}\n";
  }

  CHECK(run_binary("invert --config " + (dir / "bad.json").string()) == 2);
  CHECK(run_binary("invert --config " + (dir / "missing.json").string()) == 2);
  CHECK(run_binary("invert --config " + (dir / "unknown_key.json").string()) == 2);
  CHECK(run_binary("invert --config " + (dir / "no_seed.json").string()) == 2);
  CHECK(run_binary("render --config " + kConfigDir + "/render_views.json --out " +
                   scratch.string() + " --iters 5") == 2);
  CHECK(run_binary("invert --config " + (dir / "huge_sigma.json").string()) == 3);
  CHECK(run_binary("--help") == 0);
  CHECK(run_binary("") == 2);
  CHECK(run_binary("invert --config x --no-such-flag") == 2);
}
