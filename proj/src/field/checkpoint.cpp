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

#include "mtk/field/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace mtk::field {

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format is little-endian");

constexpr char kMagic[4] = {'M', 'T', 'F', 'K'};
constexpr uint32_t kVersion = 1;

void write_u32(std::ostream& os, uint32_t v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

void write_f64(std::ostream& os, double v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

uint32_t read_u32(std::istream& is) {
  uint32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return v;
}

double read_f64(std::istream& is) {
  double v = 0.0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw ConfigError("checkpoint: truncated file");
  return v;
}

void write_mat(std::ostream& os, const Mat& m) {
  write_u32(os, static_cast<uint32_t>(m.rows()));
  write_u32(os, static_cast<uint32_t>(m.cols()));
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) write_f64(os, m(i, j));
}

void read_mat(std::istream& is, Mat& m) {
  const uint32_t rows = read_u32(is);
  const uint32_t cols = read_u32(is);
  if (rows != static_cast<uint32_t>(m.rows()) || cols != static_cast<uint32_t>(m.cols()))
    throw ConfigError("checkpoint: parameter shape mismatch");
  for (Index j = 0; j < m.cols(); ++j)
    for (Index i = 0; i < m.rows(); ++i) m(i, j) = read_f64(is);
}

void write_header(std::ostream& os, uint32_t kind, const HashGridConfig& grid, int hidden,
                  double offset_bound, const BoundingBox& box, int resolution) {
  os.write(kMagic, 4);
  write_u32(os, kVersion);
  write_u32(os, kind);
  write_u32(os, static_cast<uint32_t>(grid.levels));
  write_u32(os, static_cast<uint32_t>(grid.base_resolution));
  write_f64(os, grid.growth);
  write_u32(os, static_cast<uint32_t>(grid.table_size));
  write_u32(os, static_cast<uint32_t>(grid.features));
  write_u32(os, static_cast<uint32_t>(hidden));
  write_f64(os, offset_bound);
  for (int a = 0; a < 3; ++a) write_f64(os, box.lo(a));
  for (int a = 0; a < 3; ++a) write_f64(os, box.hi(a));
  write_u32(os, static_cast<uint32_t>(resolution));
}

struct Header {
  uint32_t kind;
  HashGridConfig grid;
  int hidden;
  double offset_bound;
  BoundingBox box;
  int resolution;
};

Header read_header(std::istream& is) {
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0)
    throw ConfigError("checkpoint: bad magic");
  if (read_u32(is) != kVersion) throw ConfigError("checkpoint: unsupported version");
  Header h;
  h.kind = read_u32(is);
  h.grid.levels = static_cast<int>(read_u32(is));
  h.grid.base_resolution = static_cast<int>(read_u32(is));
  h.grid.growth = read_f64(is);
  h.grid.table_size = static_cast<int>(read_u32(is));
  h.grid.features = static_cast<int>(read_u32(is));
  h.hidden = static_cast<int>(read_u32(is));
  h.offset_bound = read_f64(is);
  for (int a = 0; a < 3; ++a) h.box.lo(a) = read_f64(is);
  for (int a = 0; a < 3; ++a) h.box.hi(a) = read_f64(is);
  h.resolution = static_cast<int>(read_u32(is));
  return h;
}

}  // namespace

void save_sdf(SdfNetwork& net, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("checkpoint: cannot open for writing: " + path);
  const SdfNetworkConfig& cfg = net.config();
  write_header(os, 0, cfg.grid, cfg.hidden, cfg.offset_bound, cfg.domain, cfg.resolution);
  const auto params = net.params();
  write_u32(os, static_cast<uint32_t>(params.size()));
  for (const auto& p : params) write_mat(os, *p.value);
  if (!os) throw ConfigError("checkpoint: write failed: " + path);
}

SdfNetwork load_sdf(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open: " + path);
  const Header h = read_header(is);
  if (h.kind != 0) throw ConfigError("checkpoint: not an sdf field checkpoint");
  SdfNetworkConfig cfg;
  cfg.grid = h.grid;
  cfg.hidden = h.hidden;
  cfg.offset_bound = h.offset_bound;
  cfg.domain = h.box;
  cfg.resolution = h.resolution;
  SdfNetwork net(cfg, 0);
  const auto params = net.params();
  if (read_u32(is) != params.size())
    throw ConfigError("checkpoint: parameter count mismatch");
  for (const auto& p : params) read_mat(is, *p.value);
  return net;
}

void save_texture(TextureField& tex, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("checkpoint: cannot open for writing: " + path);
  const TextureFieldConfig& cfg = tex.config();
  write_header(os, 1, cfg.grid, cfg.hidden, 0.0, cfg.domain, 0);
  const auto params = tex.params();
  write_u32(os, static_cast<uint32_t>(params.size()));
  for (const auto& p : params) write_mat(os, *p.value);
  if (!os) throw ConfigError("checkpoint: write failed: " + path);
}

TextureField load_texture(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open: " + path);
  const Header h = read_header(is);
  if (h.kind != 1) throw ConfigError("checkpoint: not a texture field checkpoint");
  TextureFieldConfig cfg;
  cfg.grid = h.grid;
  cfg.hidden = h.hidden;
  cfg.domain = h.box;
  TextureField tex(cfg, 0);
  const auto params = tex.params();
  if (read_u32(is) != params.size())
    throw ConfigError("checkpoint: parameter count mismatch");
  for (const auto& p : params) read_mat(is, *p.value);
  return tex;
}

}  // namespace mtk::field
