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

#include "mtk/field/network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mtk::field {

namespace {

using ad::sigmoid_value;
using ad::softplus_value;

Mat apply_softplus(const Mat& m) {
  return m.unaryExpr([](double x) { return softplus_value(x); });
}

Mat apply_sigmoid(const Mat& m) {
  return m.unaryExpr([](double x) { return sigmoid_value(x); });
}

void check_unit_columns(const Mat& v, const char* what) {
  if (v.rows() != 3) throw std::invalid_argument(std::string(what) + " must be 3 x N");
  for (Index j = 0; j < v.cols(); ++j)
    if (std::abs(v.col(j).norm() - 1.0) > 1e-6)
      throw std::invalid_argument(std::string(what) + " must be unit length (column " +
                                  std::to_string(j) + ")");
}

}  // namespace

Linear make_linear(int out_dim, int in_dim, Rng& rng) {
  Linear l;
  l.w.resize(out_dim, in_dim);
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim + out_dim));
  for (int i = 0; i < out_dim; ++i)
    for (int j = 0; j < in_dim; ++j) l.w(i, j) = rng.uniform(-limit, limit);
  l.b = Mat::Zero(out_dim, 1);
  return l;
}

void SdfNetworkConfig::validate() const {
  grid.validate();
  domain.validate();
  if (hidden < 1) throw ConfigError("sdf network: hidden must be >= 1");
  if (!(offset_bound > 0.0 && offset_bound < 0.5))
    throw ConfigError("sdf network: offset_bound must lie in (0, 0.5)");
  if (resolution < 2) throw ConfigError("sdf network: resolution must be >= 2");
}

SdfNetwork::SdfNetwork(const SdfNetworkConfig& cfg, uint64_t seed)
    : cfg_(cfg), grid_(cfg.grid, Rng::derive(seed, "grid")) {
  cfg_.validate();
  const int enc = grid_.feature_dim();
  Rng rv(Rng::derive(seed, "vertex_head"));
  v1_ = make_linear(cfg_.hidden, enc, rv);
  v2_ = make_linear(cfg_.hidden, cfg_.hidden + enc, rv);
  v3_ = make_linear(4, cfg_.hidden, rv);
  Rng rc(Rng::derive(seed, "cube_head"));
  c1_ = make_linear(cfg_.hidden, enc, rc);
  c2_ = make_linear(cfg_.hidden, cfg_.hidden + enc, rc);
  c3_ = make_linear(21, cfg_.hidden, rc);
}

void SdfNetwork::set_resolution(int r) {
  if (r < 2) throw ConfigError("sdf network: resolution must be >= 2");
  cfg_.resolution = r;
}

std::vector<ParamRef> SdfNetwork::params() {
  std::vector<ParamRef> out;
  for (Mat& t : grid_.tables()) out.push_back({&t, true});
  for (Linear* l : {&v1_, &v2_, &v3_, &c1_, &c2_, &c3_}) {
    out.push_back({&l->w, false});
    out.push_back({&l->b, false});
  }
  return out;
}

std::vector<int> SdfNetwork::stage(ad::Tape& tape) const {
  std::vector<int> ids;
  for (const Mat& t : grid_.tables()) ids.push_back(tape.input(t));
  for (const Linear* l : {&v1_, &v2_, &v3_, &c1_, &c2_, &c3_}) {
    ids.push_back(tape.input(l->w));
    ids.push_back(tape.input(l->b));
  }
  return ids;
}

Mat SdfNetwork::to_unit(const Mat& domain_pts) const {
  if (domain_pts.rows() != 3) throw std::invalid_argument("points must be 3 x N");
  const Vec3 lo = cfg_.domain.lo;
  const Vec3 ext = cfg_.domain.extent();
  Mat u(3, domain_pts.cols());
  for (int a = 0; a < 3; ++a)
    u.row(a) = (domain_pts.row(a).array() - lo(a)) / ext(a);
  return u;
}

namespace {

// Shared trunk: enc -> h1 -> [h1 ; enc] -> h2 -> head. Ids follow stage():
// grid tables first, then (w, b) pairs per layer.
struct HeadIds {
  int w1, b1, w2, b2, w3, b3;
};

int trunk_head(ad::Tape& t, const HeadIds& ids, int enc) {
  const int h1 = t.softplus(t.add_col(t.matmul(ids.w1, enc), ids.b1));
  const int h2 = t.softplus(t.add_col(t.matmul(ids.w2, t.concat_rows({h1, enc})), ids.b2));
  return t.add_col(t.matmul(ids.w3, h2), ids.b3);
}

}  // namespace

SdfNetwork::VertexNodes SdfNetwork::build_vertex(ad::Tape& tape,
                                                 const std::vector<int>& param_ids,
                                                 const Mat& domain_pts) const {
  const size_t l = grid_.tables().size();
  if (param_ids.size() != l + 12)
    throw std::invalid_argument("build_vertex: wrong number of parameter nodes");
  const HashGrid::GatherPlan gp = grid_.plan(to_unit(domain_pts));
  const std::vector<int> table_ids(param_ids.begin(), param_ids.begin() + l);
  const int enc = grid_.encode_on_tape(tape, table_ids, gp);
  const HeadIds h{param_ids[l + 0], param_ids[l + 1], param_ids[l + 2],
                  param_ids[l + 3], param_ids[l + 4], param_ids[l + 5]};
  const int out = trunk_head(tape, h, enc);
  VertexNodes v;
  v.s = tape.slice_rows(out, 0, 1);
  v.delta_unit = tape.tanh(tape.slice_rows(out, 1, 3));
  v.delta = tape.scale(v.delta_unit, offset_scale());
  return v;
}

SdfNetwork::CubeNodes SdfNetwork::build_cube(ad::Tape& tape,
                                             const std::vector<int>& param_ids,
                                             const Mat& domain_pts) const {
  const size_t l = grid_.tables().size();
  if (param_ids.size() != l + 12)
    throw std::invalid_argument("build_cube: wrong number of parameter nodes");
  const HashGrid::GatherPlan gp = grid_.plan(to_unit(domain_pts));
  const std::vector<int> table_ids(param_ids.begin(), param_ids.begin() + l);
  const int enc = grid_.encode_on_tape(tape, table_ids, gp);
  const HeadIds h{param_ids[l + 6], param_ids[l + 7], param_ids[l + 8],
                  param_ids[l + 9], param_ids[l + 10], param_ids[l + 11]};
  const int out = trunk_head(tape, h, enc);
  CubeNodes c;
  c.alpha = tape.add_scalar(tape.softplus(tape.slice_rows(out, 0, 8)), 1e-3);
  c.beta = tape.add_scalar(tape.softplus(tape.slice_rows(out, 8, 12)), 1e-3);
  c.gamma = tape.sigmoid(tape.slice_rows(out, 20, 1));
  return c;
}

namespace {

// Value-only trunk mirroring trunk_head op for op, so results are
// bit-identical to the tape path.
Mat trunk_head_value(const Linear& l1, const Linear& l2, const Linear& l3, const Mat& enc) {
  Mat z1 = l1.w * enc;
  z1 = z1.colwise() + l1.b.col(0);
  const Mat h1 = apply_softplus(z1);
  Mat cat(h1.rows() + enc.rows(), enc.cols());
  cat.topRows(h1.rows()) = h1;
  cat.bottomRows(enc.rows()) = enc;
  Mat z2 = l2.w * cat;
  z2 = z2.colwise() + l2.b.col(0);
  const Mat h2 = apply_softplus(z2);
  Mat z3 = l3.w * h2;
  z3 = z3.colwise() + l3.b.col(0);
  return z3;
}

}  // namespace

namespace {

// Fixed evaluation chunk. Bounds peak memory on full-grid sweeps; the chunk
// size never depends on input size, so identical points always go through
// identical kernel shapes (bit-reproducibility across call sites).
constexpr Index kEvalChunk = 16384;

}  // namespace

Mat SdfNetwork::eval_vertex(const Mat& domain_pts) const {
  const Index n = domain_pts.cols();
  Mat r(4, n);
  for (Index at = 0; at < n; at += kEvalChunk) {
    const Index len = std::min(kEvalChunk, n - at);
    const Mat chunk = domain_pts.middleCols(at, len);
    const Mat enc = grid_.encode(to_unit(chunk));
    const Mat out = trunk_head_value(v1_, v2_, v3_, enc);
    r.block(0, at, 1, len) = out.row(0);
    const Mat du = out.middleRows(1, 3).array().tanh().matrix();
    r.block(1, at, 3, len) = offset_scale() * du;
  }
  return r;
}

Mat SdfNetwork::eval_cube(const Mat& domain_pts) const {
  const Index n = domain_pts.cols();
  Mat r(21, n);
  for (Index at = 0; at < n; at += kEvalChunk) {
    const Index len = std::min(kEvalChunk, n - at);
    const Mat chunk = domain_pts.middleCols(at, len);
    const Mat enc = grid_.encode(to_unit(chunk));
    const Mat out = trunk_head_value(c1_, c2_, c3_, enc);
    r.block(0, at, 8, len) = (apply_softplus(out.middleRows(0, 8)).array() + 1e-3).matrix();
    r.block(8, at, 12, len) = (apply_softplus(out.middleRows(8, 12)).array() + 1e-3).matrix();
    r.block(20, at, 1, len) = apply_sigmoid(out.row(20));
  }
  return r;
}

void SdfNetwork::sdf_eval(const Vec3& p, double& s, Vec3& delta) const {
  const Mat r = eval_vertex(p);
  s = r(0, 0);
  delta = r.block<3, 1>(1, 0);
}

void TextureFieldConfig::validate() const {
  grid.validate();
  domain.validate();
  if (hidden < 1) throw ConfigError("texture field: hidden must be >= 1");
}

TextureField::TextureField(const TextureFieldConfig& cfg, uint64_t seed)
    : cfg_(cfg), grid_(cfg.grid, Rng::derive(seed, "grid")) {
  cfg_.validate();
  const int in = grid_.feature_dim() + 6;
  Rng rng(Rng::derive(seed, "head"));
  l1_ = make_linear(cfg_.hidden, in, rng);
  l2_ = make_linear(cfg_.hidden, cfg_.hidden, rng);
  l3_ = make_linear(3, cfg_.hidden, rng);
}

std::vector<ParamRef> TextureField::params() {
  std::vector<ParamRef> out;
  for (Mat& t : grid_.tables()) out.push_back({&t, true});
  for (Linear* l : {&l1_, &l2_, &l3_}) {
    out.push_back({&l->w, false});
    out.push_back({&l->b, false});
  }
  return out;
}

std::vector<int> TextureField::stage(ad::Tape& tape) const {
  std::vector<int> ids;
  for (const Mat& t : grid_.tables()) ids.push_back(tape.input(t));
  for (const Linear* l : {&l1_, &l2_, &l3_}) {
    ids.push_back(tape.input(l->w));
    ids.push_back(tape.input(l->b));
  }
  return ids;
}

int TextureField::build(ad::Tape& tape, const std::vector<int>& param_ids,
                        const Mat& domain_pts, const Mat& normals,
                        const Mat& view_dirs) const {
  const size_t l = grid_.tables().size();
  if (param_ids.size() != l + 6)
    throw std::invalid_argument("texture build: wrong number of parameter nodes");
  check_unit_columns(normals, "surface normal");
  check_unit_columns(view_dirs, "view direction");
  const Vec3 lo = cfg_.domain.lo;
  const Vec3 ext = cfg_.domain.extent();
  Mat unit(3, domain_pts.cols());
  for (int a = 0; a < 3; ++a)
    unit.row(a) = (domain_pts.row(a).array() - lo(a)) / ext(a);
  const HashGrid::GatherPlan gp = grid_.plan(unit);
  const std::vector<int> table_ids(param_ids.begin(), param_ids.begin() + l);
  const int enc = grid_.encode_on_tape(tape, table_ids, gp);
  const int feat = tape.concat_rows({enc, tape.constant(normals), tape.constant(view_dirs)});
  const int h1 = tape.softplus(tape.add_col(tape.matmul(param_ids[l + 0], feat), param_ids[l + 1]));
  const int h2 = tape.softplus(tape.add_col(tape.matmul(param_ids[l + 2], h1), param_ids[l + 3]));
  return tape.sigmoid(tape.add_col(tape.matmul(param_ids[l + 4], h2), param_ids[l + 5]));
}

Mat TextureField::eval(const Mat& domain_pts, const Mat& normals, const Mat& view_dirs) const {
  check_unit_columns(normals, "surface normal");
  check_unit_columns(view_dirs, "view direction");
  const Vec3 lo = cfg_.domain.lo;
  const Vec3 ext = cfg_.domain.extent();
  const Index n = domain_pts.cols();
  Mat rgb(3, n);
  for (Index at = 0; at < n; at += kEvalChunk) {
    const Index len = std::min(kEvalChunk, n - at);
    Mat unit(3, len);
    for (int a = 0; a < 3; ++a)
      unit.row(a) = (domain_pts.row(a).middleCols(at, len).array() - lo(a)) / ext(a);
    const Mat enc = grid_.encode(unit);
    Mat feat(enc.rows() + 6, len);
    feat.topRows(enc.rows()) = enc;
    feat.middleRows(enc.rows(), 3) = normals.middleCols(at, len);
    feat.bottomRows(3) = view_dirs.middleCols(at, len);
    Mat z1 = l1_.w * feat;
    z1 = z1.colwise() + l1_.b.col(0);
    const Mat h1 = apply_softplus(z1);
    Mat z2 = l2_.w * h1;
    z2 = z2.colwise() + l2_.b.col(0);
    const Mat h2 = apply_softplus(z2);
    Mat z3 = l3_.w * h2;
    z3 = z3.colwise() + l3_.b.col(0);
    rgb.middleCols(at, len) = apply_sigmoid(z3);
  }
  return rgb;
}

}  // namespace mtk::field
