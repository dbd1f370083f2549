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

#include "mtk/field/hash_grid.hpp"

#include <algorithm>
#include <cmath>

#include "mtk/rng.hpp"

namespace mtk::field {

namespace {

constexpr uint64_t kHashY = 2654435761ull;
constexpr uint64_t kHashZ = 805459861ull;

}  // namespace

void HashGridConfig::validate() const {
  if (levels < 1) throw ConfigError("hash grid: levels must be >= 1");
  if (base_resolution < 1) throw ConfigError("hash grid: base_resolution must be >= 1");
  if (growth < 1.0) throw ConfigError("hash grid: growth must be >= 1");
  if (table_size < 8) throw ConfigError("hash grid: table_size must be >= 8");
  if (features < 1) throw ConfigError("hash grid: features must be >= 1");
}

HashGrid::HashGrid(const HashGridConfig& cfg, uint64_t seed) : cfg_(cfg) {
  cfg_.validate();
  Rng rng(seed);
  resolution_.resize(static_cast<size_t>(cfg_.levels));
  dense_.resize(static_cast<size_t>(cfg_.levels));
  tables_.resize(static_cast<size_t>(cfg_.levels));
  for (int l = 0; l < cfg_.levels; ++l) {
    const int n = static_cast<int>(
        std::floor(cfg_.base_resolution * std::pow(cfg_.growth, static_cast<double>(l))));
    resolution_[static_cast<size_t>(l)] = n;
    const long long corners = static_cast<long long>(n + 1) * (n + 1) * (n + 1);
    const bool dense = corners <= static_cast<long long>(cfg_.table_size);
    dense_[static_cast<size_t>(l)] = dense;
    const Index rows = dense ? static_cast<Index>(corners) : cfg_.table_size;
    Mat& t = tables_[static_cast<size_t>(l)];
    t.resize(rows, cfg_.features);
    for (Index i = 0; i < t.rows(); ++i)
      for (Index j = 0; j < t.cols(); ++j) t(i, j) = rng.uniform(-1e-4, 1e-4);
  }
}

int HashGrid::slot(int level, int i, int j, int k) const {
  const int n1 = resolution_[static_cast<size_t>(level)] + 1;
  if (dense_[static_cast<size_t>(level)])
    return i + n1 * (j + n1 * k);
  const uint64_t h = static_cast<uint64_t>(i) ^ (static_cast<uint64_t>(j) * kHashY) ^
                     (static_cast<uint64_t>(k) * kHashZ);
  return static_cast<int>(h % static_cast<uint64_t>(cfg_.table_size));
}

HashGrid::GatherPlan HashGrid::plan(const Mat& unit_pts) const {
  if (unit_pts.rows() != 3) throw std::invalid_argument("encode: points must be 3 x N");
  if (!unit_pts.allFinite()) throw NumericalError("encode: non-finite coordinate");
  const Index n = unit_pts.cols();
  GatherPlan out;
  out.idx.resize(static_cast<size_t>(cfg_.levels));
  out.w.resize(static_cast<size_t>(cfg_.levels));
  for (int l = 0; l < cfg_.levels; ++l) {
    const int res = resolution_[static_cast<size_t>(l)];
    Eigen::MatrixXi& idx = out.idx[static_cast<size_t>(l)];
    Mat& w = out.w[static_cast<size_t>(l)];
    idx.resize(8, n);
    w.resize(8, n);
    for (Index p = 0; p < n; ++p) {
      int base[3];
      double frac[3];
      for (int a = 0; a < 3; ++a) {
        const double x = std::clamp(unit_pts(a, p), 0.0, 1.0) * res;
        int i0 = static_cast<int>(std::floor(x));
        i0 = std::min(i0, res - 1);
        base[a] = i0;
        frac[a] = x - i0;
      }
      for (int c = 0; c < 8; ++c) {
        const int dx = c & 1, dy = (c >> 1) & 1, dz = (c >> 2) & 1;
        idx(c, p) = slot(l, base[0] + dx, base[1] + dy, base[2] + dz);
        w(c, p) = (dx ? frac[0] : 1.0 - frac[0]) * (dy ? frac[1] : 1.0 - frac[1]) *
                  (dz ? frac[2] : 1.0 - frac[2]);
      }
    }
  }
  return out;
}

int HashGrid::encode_on_tape(ad::Tape& tape, const std::vector<int>& table_ids,
                             const GatherPlan& plan) const {
  if (table_ids.size() != tables_.size())
    throw std::invalid_argument("encode: wrong number of table nodes");
  std::vector<int> parts;
  parts.reserve(tables_.size());
  for (size_t l = 0; l < tables_.size(); ++l)
    parts.push_back(tape.gather_sum(table_ids[l], plan.idx[l], plan.w[l]));
  return parts.size() == 1 ? parts[0] : tape.concat_rows(parts);
}

Mat HashGrid::encode(const Mat& unit_pts) const {
  const GatherPlan gp = plan(unit_pts);
  const Index n = unit_pts.cols();
  Mat out(feature_dim(), n);
  for (int l = 0; l < cfg_.levels; ++l) {
    const Mat& t = tables_[static_cast<size_t>(l)];
    const Eigen::MatrixXi& idx = gp.idx[static_cast<size_t>(l)];
    const Mat& w = gp.w[static_cast<size_t>(l)];
    auto block = out.middleRows(static_cast<Index>(l) * cfg_.features, cfg_.features);
    block.setZero();
    for (Index p = 0; p < n; ++p)
      for (int c = 0; c < 8; ++c)
        block.col(p).noalias() += w(c, p) * t.row(idx(c, p)).transpose();
  }
  return out;
}

}  // namespace mtk::field
