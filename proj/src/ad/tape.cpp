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

#include "mtk/ad/tape.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace mtk::ad {

namespace {

void require(bool cond, const std::string& what) {
  if (!cond) throw std::invalid_argument("tape: " + what);
}

std::string shape_str(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

}  // namespace

double softplus_value(double x) {
  // log(1 + e^x) = max(x, 0) + log1p(e^{-|x|}); exact for large |x|.
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

double sigmoid_value(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

const Tape::Node& Tape::node(int id) const { return nodes_[static_cast<size_t>(id)]; }
Tape::Node& Tape::node(int id) { return nodes_[static_cast<size_t>(id)]; }

int Tape::check(int id) const {
  require(id >= 0 && id < size(), "operand id " + std::to_string(id) + " out of range");
  return id;
}

int Tape::push(Node n) {
  nodes_.push_back(std::move(n));
  return size() - 1;
}

int Tape::input(const Mat& value) {
  require(value.size() > 0, "input must be non-empty");
  Node n;
  n.op = Op::kInput;
  n.value = value;
  return push(std::move(n));
}

int Tape::constant(const Mat& value) {
  require(value.size() > 0, "constant must be non-empty");
  Node n;
  n.op = Op::kConstant;
  n.value = value;
  return push(std::move(n));
}

int Tape::constant(double value) {
  Mat m(1, 1);
  m(0, 0) = value;
  return constant(m);
}

int Tape::add(int a, int b) {
  check(a);
  check(b);
  const Mat& va = node(a).value;
  const Mat& vb = node(b).value;
  require(va.rows() == vb.rows() && va.cols() == vb.cols(),
          "add shape mismatch " + shape_str(va) + " vs " + shape_str(vb));
  Node n;
  n.op = Op::kAdd;
  n.a = a;
  n.b = b;
  n.value = va + vb;
  return push(std::move(n));
}

int Tape::sub(int a, int b) {
  check(a);
  check(b);
  const Mat& va = node(a).value;
  const Mat& vb = node(b).value;
  require(va.rows() == vb.rows() && va.cols() == vb.cols(),
          "sub shape mismatch " + shape_str(va) + " vs " + shape_str(vb));
  Node n;
  n.op = Op::kSub;
  n.a = a;
  n.b = b;
  n.value = va - vb;
  return push(std::move(n));
}

int Tape::mul(int a, int b) {
  check(a);
  check(b);
  const Mat& va = node(a).value;
  const Mat& vb = node(b).value;
  require(va.rows() == vb.rows() && va.cols() == vb.cols(),
          "mul shape mismatch " + shape_str(va) + " vs " + shape_str(vb));
  Node n;
  n.op = Op::kMul;
  n.a = a;
  n.b = b;
  n.value = va.cwiseProduct(vb);
  return push(std::move(n));
}

int Tape::scale(int a, double c) {
  check(a);
  Node n;
  n.op = Op::kScale;
  n.a = a;
  n.scalar = c;
  n.value = c * node(a).value;
  return push(std::move(n));
}

int Tape::add_scalar(int a, double c) {
  check(a);
  Node n;
  n.op = Op::kAddScalar;
  n.a = a;
  n.scalar = c;
  n.value = (node(a).value.array() + c).matrix();
  return push(std::move(n));
}

int Tape::matmul(int a, int b) {
  check(a);
  check(b);
  const Mat& va = node(a).value;
  const Mat& vb = node(b).value;
  require(va.cols() == vb.rows(),
          "matmul inner dimension mismatch " + shape_str(va) + " vs " + shape_str(vb));
  Node n;
  n.op = Op::kMatMul;
  n.a = a;
  n.b = b;
  n.value = va * vb;
  return push(std::move(n));
}

int Tape::add_col(int a, int bias) {
  check(a);
  check(bias);
  const Mat& va = node(a).value;
  const Mat& vb = node(bias).value;
  require(vb.cols() == 1, "add_col bias must be a column vector, got " + shape_str(vb));
  require(va.rows() == vb.rows(),
          "add_col row mismatch " + shape_str(va) + " vs " + shape_str(vb));
  Node n;
  n.op = Op::kAddCol;
  n.a = a;
  n.b = bias;
  n.value = va.colwise() + vb.col(0);
  return push(std::move(n));
}

int Tape::concat_rows(const std::vector<int>& parts) {
  require(!parts.empty(), "concat_rows needs at least one part");
  Index rows = 0;
  const Index cols = node(check(parts[0])).value.cols();
  for (int p : parts) {
    const Mat& v = node(check(p)).value;
    require(v.cols() == cols, "concat_rows column mismatch");
    rows += v.rows();
  }
  Node n;
  n.op = Op::kConcatRows;
  n.extra = parts;
  n.value.resize(rows, cols);
  Index at = 0;
  for (int p : parts) {
    const Mat& v = node(p).value;
    n.value.middleRows(at, v.rows()) = v;
    at += v.rows();
  }
  return push(std::move(n));
}

int Tape::slice_rows(int a, int first_row, int row_count) {
  check(a);
  const Mat& va = node(a).value;
  require(first_row >= 0 && row_count >= 1 && first_row + row_count <= va.rows(),
          "slice_rows [" + std::to_string(first_row) + ", " +
              std::to_string(first_row + row_count) + ") out of range for " + shape_str(va));
  Node n;
  n.op = Op::kSliceRows;
  n.a = a;
  n.i0 = first_row;
  n.i1 = row_count;
  n.value = va.middleRows(first_row, row_count);
  return push(std::move(n));
}

int Tape::gather_sum(int table, Eigen::MatrixXi indices, Mat weights) {
  check(table);
  const Mat& vt = node(table).value;
  require(indices.rows() == weights.rows() && indices.cols() == weights.cols(),
          "gather_sum index/weight shape mismatch");
  require(indices.size() > 0, "gather_sum needs at least one index");
  const int rows = static_cast<int>(vt.rows());
  for (Index c = 0; c < indices.rows(); ++c)
    for (Index j = 0; j < indices.cols(); ++j)
      require(indices(c, j) >= 0 && indices(c, j) < rows,
              "gather_sum index out of range: " + std::to_string(indices(c, j)));
  Node n;
  n.op = Op::kGatherSum;
  n.a = table;
  n.value = Mat::Zero(vt.cols(), indices.cols());
  for (Index j = 0; j < indices.cols(); ++j)
    for (Index c = 0; c < indices.rows(); ++c)
      n.value.col(j).noalias() += weights(c, j) * vt.row(indices(c, j)).transpose();
  n.gather_idx = std::move(indices);
  n.gather_w = std::move(weights);
  return push(std::move(n));
}

int Tape::softplus(int a) {
  check(a);
  Node n;
  n.op = Op::kSoftplus;
  n.a = a;
  n.value = node(a).value.unaryExpr([](double x) { return softplus_value(x); });
  return push(std::move(n));
}

int Tape::tanh(int a) {
  check(a);
  Node n;
  n.op = Op::kTanh;
  n.a = a;
  n.value = node(a).value.array().tanh().matrix();
  return push(std::move(n));
}

int Tape::sigmoid(int a) {
  check(a);
  Node n;
  n.op = Op::kSigmoid;
  n.a = a;
  n.value = node(a).value.unaryExpr([](double x) { return sigmoid_value(x); });
  return push(std::move(n));
}

int Tape::relu(int a) {
  check(a);
  Node n;
  n.op = Op::kRelu;
  n.a = a;
  n.value = node(a).value.cwiseMax(0.0);
  return push(std::move(n));
}

int Tape::abs(int a) {
  check(a);
  Node n;
  n.op = Op::kAbs;
  n.a = a;
  n.value = node(a).value.cwiseAbs();
  return push(std::move(n));
}

int Tape::sqrt(int a) {
  check(a);
  require((node(a).value.array() >= 0.0).all(), "sqrt of negative entry");
  Node n;
  n.op = Op::kSqrt;
  n.a = a;
  n.value = node(a).value.array().sqrt().matrix();
  return push(std::move(n));
}

int Tape::sum(int a) {
  check(a);
  Node n;
  n.op = Op::kSum;
  n.a = a;
  n.value = Mat::Constant(1, 1, node(a).value.sum());
  return push(std::move(n));
}

const Mat& Tape::adjoint(int id) const {
  const Node& n = node(check(id));
  require(n.adjoint.size() > 0, "adjoint requested before backward()");
  return n.adjoint;
}

void Tape::backward(int output, double seed) {
  check(output);
  require(node(output).value.rows() == 1 && node(output).value.cols() == 1,
          "backward output must be scalar, got " + shape_str(node(output).value));
  for (Node& n : nodes_) n.adjoint = Mat::Zero(n.value.rows(), n.value.cols());
  node(output).adjoint(0, 0) = seed;

  for (int id = output; id >= 0; --id) {
    Node& n = node(id);
    const Mat& g = n.adjoint;
    switch (n.op) {
      case Op::kInput:
      case Op::kConstant:
        break;
      case Op::kAdd:
        node(n.a).adjoint += g;
        node(n.b).adjoint += g;
        break;
      case Op::kSub:
        node(n.a).adjoint += g;
        node(n.b).adjoint -= g;
        break;
      case Op::kMul:
        node(n.a).adjoint += g.cwiseProduct(node(n.b).value);
        node(n.b).adjoint += g.cwiseProduct(node(n.a).value);
        break;
      case Op::kScale:
        node(n.a).adjoint += n.scalar * g;
        break;
      case Op::kAddScalar:
        node(n.a).adjoint += g;
        break;
      case Op::kMatMul:
        node(n.a).adjoint.noalias() += g * node(n.b).value.transpose();
        node(n.b).adjoint.noalias() += node(n.a).value.transpose() * g;
        break;
      case Op::kAddCol:
        node(n.a).adjoint += g;
        node(n.b).adjoint += g.rowwise().sum();
        break;
      case Op::kConcatRows: {
        Index at = 0;
        for (int p : n.extra) {
          Node& src = node(p);
          src.adjoint += g.middleRows(at, src.value.rows());
          at += src.value.rows();
        }
        break;
      }
      case Op::kSliceRows:
        node(n.a).adjoint.middleRows(n.i0, n.i1) += g;
        break;
      case Op::kGatherSum: {
        Mat& gt = node(n.a).adjoint;
        for (Index j = 0; j < n.gather_idx.cols(); ++j)
          for (Index c = 0; c < n.gather_idx.rows(); ++c)
            gt.row(n.gather_idx(c, j)).noalias() +=
                n.gather_w(c, j) * g.col(j).transpose();
        break;
      }
      case Op::kSoftplus:
        node(n.a).adjoint += g.cwiseProduct(
            node(n.a).value.unaryExpr([](double x) { return sigmoid_value(x); }));
        break;
      case Op::kTanh:
        node(n.a).adjoint.array() += g.array() * (1.0 - n.value.array().square());
        break;
      case Op::kSigmoid:
        node(n.a).adjoint.array() += g.array() * n.value.array() * (1.0 - n.value.array());
        break;
      case Op::kRelu:
        node(n.a).adjoint.array() +=
            g.array() * (node(n.a).value.array() > 0.0).cast<double>();
        break;
      case Op::kAbs:
        node(n.a).adjoint.array() +=
            g.array() * node(n.a).value.unaryExpr([](double x) {
                          return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0);
                        }).array();
        break;
      case Op::kSqrt:
        node(n.a).adjoint.array() += g.array() * 0.5 / n.value.array();
        break;
      case Op::kSum:
        node(n.a).adjoint.array() += g(0, 0);
        break;
    }
  }
}

}  // namespace mtk::ad
