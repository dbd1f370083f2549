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

#include "mtk/common.hpp"

namespace mtk::ad {

/// Primitive operations recorded on a Tape. All buffers are dense
/// double-precision matrices; vectors are single-column or single-row
/// matrices, scalars are 1x1.
enum class Op {
  kInput,       // tracked leaf
  kConstant,    // untracked leaf
  kAdd,         // a + b, same shape
  kSub,         // a - b, same shape
  kMul,         // elementwise a * b
  kScale,       // scalar_ * a
  kAddScalar,   // a + scalar_ elementwise
  kMatMul,      // a (m x k) * b (k x n)
  kAddCol,      // a (m x n) + b (m x 1) broadcast over columns
  kConcatRows,  // stack inputs vertically, equal column counts
  kSliceRows,   // rows [i0_, i0_+i1_) of a
  kGatherSum,   // weighted sum of table rows: out(:,j) = sum_c w(c,j) * a.row(idx(c,j))
  kSoftplus,
  kTanh,
  kSigmoid,
  kRelu,
  kAbs,
  kSqrt,
  kSum,  // sum of all entries -> 1x1
};

/// Reverse-mode automatic differentiation over dense matrices.
///
/// Nodes are appended in topological order by construction: an operation may
/// only reference node ids that already exist, so cycles cannot be formed.
/// backward() seeds the (scalar) output adjoint and sweeps the tape in
/// reverse, accumulating adjoints additively; repeated gathers into the same
/// table row and repeated reads of the same node both accumulate.
///
/// A Tape is single-threaded; distinct Tape instances are independent.
class Tape {
 public:
  /// Tracked leaf; its adjoint is available after backward().
  int input(const Mat& value);
  /// Untracked leaf.
  int constant(const Mat& value);
  int constant(double value);

  int add(int a, int b);
  int sub(int a, int b);
  int mul(int a, int b);
  int scale(int a, double c);
  int add_scalar(int a, double c);
  int matmul(int a, int b);
  int add_col(int a, int bias);
  int concat_rows(const std::vector<int>& parts);
  int slice_rows(int a, int first_row, int row_count);
  int gather_sum(int table, Eigen::MatrixXi indices, Mat weights);
  int softplus(int a);
  int tanh(int a);
  int sigmoid(int a);
  int relu(int a);
  int abs(int a);
  int sqrt(int a);
  int sum(int a);

  const Mat& value(int id) const { return node(id).value; }

  /// Reverse sweep from a scalar output node. `seed` is the output adjoint.
  void backward(int output, double seed = 1.0);

  /// Adjoint buffer of a node; valid after backward(). Zero matrix if the
  /// node did not influence the output.
  const Mat& adjoint(int id) const;

  int size() const { return static_cast<int>(nodes_.size()); }
  void clear() { nodes_.clear(); }

 private:
  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    std::vector<int> extra;  // kConcatRows inputs beyond the first two
    double scalar = 0.0;
    int i0 = 0, i1 = 0;  // kSliceRows bounds
    Eigen::MatrixXi gather_idx;
    Mat gather_w;
    Mat value;
    Mat adjoint;
  };

  const Node& node(int id) const;
  Node& node(int id);
  int push(Node n);
  int check(int id) const;  // bounds check for an operand id

  std::vector<Node> nodes_;
};

/// Numerically stable softplus / logistic sigmoid, shared with value-only
/// network evaluation paths.
double softplus_value(double x);
double sigmoid_value(double x);

}  // namespace mtk::ad
