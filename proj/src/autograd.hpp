// Copyright 2026 The WACSE Lab Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef WACSE_AUTOGRAD_HPP_
#define WACSE_AUTOGRAD_HPP_

// Minimal reverse-mode automatic differentiation over dense row-major
// matrices. Every op records a closure that pushes the node's gradient into
// its inputs; Backward() replays them in reverse topological order.

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <span>
#include <utility>
#include <vector>

namespace wacse::ag {

using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Index = Eigen::Index;

struct Node {
  Matrix value;
  Matrix grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;

  template <typename Expr>
  void Accumulate(const Expr& g) {
    if (grad.size() == 0) grad = Matrix::Zero(value.rows(), value.cols());
    grad += g;
  }
};

class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }
  // Returns a zero matrix of matching shape when no gradient has arrived.
  Matrix grad() const;
  bool requires_grad() const { return node_->requires_grad; }
  Index rows() const { return node_->value.rows(); }
  Index cols() const { return node_->value.cols(); }
  double scalar() const { return node_->value(0, 0); }
  void ZeroGrad() { node_->grad.resize(0, 0); }

  Node* node() const { return node_.get(); }
  const std::shared_ptr<Node>& shared() const { return node_; }
  explicit operator bool() const { return node_ != nullptr; }

 private:
  std::shared_ptr<Node> node_;
};

// While alive, ops record no backward closures (inference mode).
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

Var Parameter(Matrix value);
Var Constant(Matrix value);

// Seeds d(root)/d(root) = 1 and propagates. The root must be 1x1.
void Backward(const Var& root);

Var MatMul(const Var& a, const Var& b);
// a * b^T
Var MatMulNT(const Var& a, const Var& b);
Var Add(const Var& a, const Var& b);
// Adds a 1xC row to every row of a.
Var AddRow(const Var& a, const Var& row);
Var Scale(const Var& a, double factor);
// Sum of 1x1 values, optionally weighted.
Var SumScalars(std::span<const Var> terms);
Var WeightedSum(std::span<const Var> terms, std::span<const double> weights);

Var LayerNorm(const Var& x, const Var& gain, const Var& bias, double eps);
Var Gelu(const Var& x);

// Row i of the result is row ids[i] of table.
Var GatherRows(const Var& table, std::span<const int> ids);

// Scales every row to unit L2 norm. Throws ArgumentError on a zero row.
Var NormalizeRows(const Var& x);

struct Segment {
  int start = 0;
  int length = 0;
};

// Multi-head scaled dot-product attention restricted to each segment of
// rows; rows in different segments never attend to each other.
Var SegmentAttention(const Var& q, const Var& k, const Var& v,
                     std::span<const Segment> segments, int heads);

// out(out_row, out_col) = sum of coef * x(in_row, in_col) over the terms.
struct SparseTerm {
  int out_row;
  int out_col;
  int in_row;
  int in_col;
  double coef;
};
Var Combine(const Var& x, Index rows, Index cols,
            std::span<const SparseTerm> terms);

// Sum over rows r of -log softmax(logits.row(r))[targets[r]]. Rows whose
// target is negative are skipped. Result is 1x1.
Var CrossEntropySum(const Var& logits, std::span<const int> targets);

}  // namespace wacse::ag

#endif  // WACSE_AUTOGRAD_HPP_
