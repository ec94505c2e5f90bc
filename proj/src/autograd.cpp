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

#include "autograd.hpp"

#include <cmath>
#include <numbers>
#include <unordered_set>

#include "error.hpp"

namespace wacse::ag {
namespace {

using NodePtr = std::shared_ptr<Node>;

thread_local bool grad_enabled = true;

// Creates a result node wired to its inputs. The backward closure is only
// kept when some input needs a gradient.
Var MakeResult(Matrix value, std::vector<NodePtr> inputs,
               std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (grad_enabled) {
    for (const auto& in : inputs) node->requires_grad |= in->requires_grad;
  }
  if (node->requires_grad) {
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Var(std::move(node));
}

void CheckSameShape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ArgumentError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

NoGradGuard::NoGradGuard() : previous_(grad_enabled) { grad_enabled = false; }
NoGradGuard::~NoGradGuard() { grad_enabled = previous_; }

Matrix Var::grad() const {
  if (node_->grad.size() == 0) {
    return Matrix::Zero(node_->value.rows(), node_->value.cols());
  }
  return node_->grad;
}

Var Parameter(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var Constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

void Backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) {
    throw ArgumentError("Backward: root must be a scalar");
  }
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<std::pair<Node*, size_t>> stack;
  stack.emplace_back(root.node(), 0);
  seen.insert(root.node());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && seen.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->Accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() != 0) node->backward(*node);
  }
  // Interior gradients are not needed after the sweep; leaves keep theirs.
  for (Node* node : order) {
    if (node->backward) node->grad.resize(0, 0);
  }
}

Var MatMul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw ArgumentError("MatMul: shape mismatch");
  NodePtr na = a.shared(), nb = b.shared();
  Matrix out = a.value() * b.value();
  return MakeResult(std::move(out), {na, nb}, [na, nb](Node& self) {
    if (na->requires_grad) na->Accumulate(self.grad * nb->value.transpose());
    if (nb->requires_grad) nb->Accumulate(na->value.transpose() * self.grad);
  });
}

Var MatMulNT(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) throw ArgumentError("MatMulNT: shape mismatch");
  NodePtr na = a.shared(), nb = b.shared();
  Matrix out = a.value() * b.value().transpose();
  return MakeResult(std::move(out), {na, nb}, [na, nb](Node& self) {
    if (na->requires_grad) na->Accumulate(self.grad * nb->value);
    if (nb->requires_grad) nb->Accumulate(self.grad.transpose() * na->value);
  });
}

Var Add(const Var& a, const Var& b) {
  CheckSameShape(a, b, "Add");
  NodePtr na = a.shared(), nb = b.shared();
  Matrix out = a.value() + b.value();
  return MakeResult(std::move(out), {na, nb}, [na, nb](Node& self) {
    if (na->requires_grad) na->Accumulate(self.grad);
    if (nb->requires_grad) nb->Accumulate(self.grad);
  });
}

Var AddRow(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) {
    throw ArgumentError("AddRow: shape mismatch");
  }
  NodePtr na = a.shared(), nr = row.shared();
  Matrix out = a.value().rowwise() + row.value().row(0);
  return MakeResult(std::move(out), {na, nr}, [na, nr](Node& self) {
    if (na->requires_grad) na->Accumulate(self.grad);
    if (nr->requires_grad) nr->Accumulate(self.grad.colwise().sum());
  });
}

Var Scale(const Var& a, double factor) {
  NodePtr na = a.shared();
  Matrix out = a.value() * factor;
  return MakeResult(std::move(out), {na}, [na, factor](Node& self) {
    na->Accumulate(self.grad * factor);
  });
}

Var SumScalars(std::span<const Var> terms) {
  std::vector<double> ones(terms.size(), 1.0);
  return WeightedSum(terms, ones);
}

Var WeightedSum(std::span<const Var> terms, std::span<const double> weights) {
  if (terms.size() != weights.size()) {
    throw ArgumentError("WeightedSum: size mismatch");
  }
  std::vector<NodePtr> inputs;
  std::vector<double> w(weights.begin(), weights.end());
  double total = 0.0;
  for (size_t i = 0; i < terms.size(); ++i) {
    if (terms[i].rows() != 1 || terms[i].cols() != 1) {
      throw ArgumentError("WeightedSum: terms must be scalars");
    }
    total += w[i] * terms[i].scalar();
    inputs.push_back(terms[i].shared());
  }
  Matrix out(1, 1);
  out(0, 0) = total;
  auto captured = inputs;
  return MakeResult(std::move(out), std::move(inputs),
                    [captured, w](Node& self) {
                      const double g = self.grad(0, 0);
                      for (size_t i = 0; i < captured.size(); ++i) {
                        if (captured[i]->requires_grad) {
                          captured[i]->Accumulate(Matrix::Constant(1, 1, g * w[i]));
                        }
                      }
                    });
}

Var LayerNorm(const Var& x, const Var& gain, const Var& bias, double eps) {
  const Index cols = x.cols();
  if (gain.rows() != 1 || gain.cols() != cols || bias.rows() != 1 ||
      bias.cols() != cols) {
    throw ArgumentError("LayerNorm: shape mismatch");
  }
  NodePtr nx = x.shared(), ng = gain.shared(), nb = bias.shared();
  const Matrix& in = x.value();
  Matrix normalized(in.rows(), cols);
  Eigen::VectorXd inv_std(in.rows());
  for (Index r = 0; r < in.rows(); ++r) {
    const double mean = in.row(r).mean();
    const double var = (in.row(r).array() - mean).square().mean();
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    normalized.row(r) = (in.row(r).array() - mean) * inv_std(r);
  }
  Matrix out = (normalized.array().rowwise() * gain.value().row(0).array())
                   .rowwise() +
               bias.value().row(0).array();
  return MakeResult(
      std::move(out), {nx, ng, nb},
      [nx, ng, nb, normalized, inv_std](Node& self) {
        const Matrix& g = self.grad;
        if (ng->requires_grad) {
          ng->Accumulate((g.array() * normalized.array()).colwise().sum().matrix());
        }
        if (nb->requires_grad) nb->Accumulate(g.colwise().sum());
        if (nx->requires_grad) {
          Matrix dnorm = g.array().rowwise() * ng->value.row(0).array();
          Matrix dx(g.rows(), g.cols());
          for (Index r = 0; r < g.rows(); ++r) {
            const double mean_d = dnorm.row(r).mean();
            const double mean_dn =
                (dnorm.row(r).array() * normalized.row(r).array()).mean();
            dx.row(r) = (dnorm.row(r).array() - mean_d -
                         normalized.row(r).array() * mean_dn) *
                        inv_std(r);
          }
          nx->Accumulate(dx);
        }
      });
}

Var Gelu(const Var& x) {
  NodePtr nx = x.shared();
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Matrix out = x.value().unaryExpr([inv_sqrt2](double v) {
    return 0.5 * v * (1.0 + std::erf(v * inv_sqrt2));
  });
  return MakeResult(std::move(out), {nx}, [nx, inv_sqrt2](Node& self) {
    const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * std::numbers::pi);
    Matrix d = nx->value.unaryExpr([&](double v) {
      return 0.5 * (1.0 + std::erf(v * inv_sqrt2)) +
             v * inv_sqrt_2pi * std::exp(-0.5 * v * v);
    });
    nx->Accumulate(self.grad.cwiseProduct(d));
  });
}

Var GatherRows(const Var& table, std::span<const int> ids) {
  NodePtr nt = table.shared();
  std::vector<int> index(ids.begin(), ids.end());
  Matrix out(static_cast<Index>(index.size()), table.cols());
  for (size_t i = 0; i < index.size(); ++i) {
    if (index[i] < 0 || index[i] >= table.rows()) {
      throw ArgumentError("GatherRows: row index out of range");
    }
    out.row(static_cast<Index>(i)) = table.value().row(index[i]);
  }
  return MakeResult(std::move(out), {nt}, [nt, index](Node& self) {
    if (nt->grad.size() == 0) {
      nt->grad = Matrix::Zero(nt->value.rows(), nt->value.cols());
    }
    for (size_t i = 0; i < index.size(); ++i) {
      nt->grad.row(index[i]) += self.grad.row(static_cast<Index>(i));
    }
  });
}

Var NormalizeRows(const Var& x) {
  NodePtr nx = x.shared();
  Eigen::VectorXd norms = x.value().rowwise().norm();
  for (Index r = 0; r < norms.size(); ++r) {
    if (!(norms(r) > 0.0)) {
      throw ArgumentError("NormalizeRows: zero vector has no direction");
    }
  }
  Matrix out = x.value().array().colwise() / norms.array();
  Matrix unit = out;
  return MakeResult(std::move(out), {nx}, [nx, unit, norms](Node& self) {
    Eigen::VectorXd proj = (unit.array() * self.grad.array()).rowwise().sum();
    Matrix dx = self.grad - (unit.array().colwise() * proj.array()).matrix();
    dx.array().colwise() /= norms.array();
    nx->Accumulate(dx);
  });
}

Var SegmentAttention(const Var& q, const Var& k, const Var& v,
                     std::span<const Segment> segments, int heads) {
  CheckSameShape(q, k, "SegmentAttention");
  CheckSameShape(q, v, "SegmentAttention");
  const Index dim = q.cols();
  if (heads <= 0 || dim % heads != 0) {
    throw ArgumentError("SegmentAttention: dim not divisible by heads");
  }
  const Index head_dim = dim / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Segment> segs(segments.begin(), segments.end());
  for (const auto& s : segs) {
    if (s.start < 0 || s.length <= 0 || s.start + s.length > q.rows()) {
      throw ArgumentError("SegmentAttention: segment out of range");
    }
  }

  NodePtr nq = q.shared(), nk = k.shared(), nv = v.shared();
  Matrix out = Matrix::Zero(q.rows(), dim);
  // probs[s * heads + h] holds the attention weights of segment s, head h.
  auto probs = std::make_shared<std::vector<Matrix>>();
  probs->reserve(segs.size() * heads);
  for (const auto& s : segs) {
    for (int h = 0; h < heads; ++h) {
      auto qs = q.value().block(s.start, h * head_dim, s.length, head_dim);
      auto ks = k.value().block(s.start, h * head_dim, s.length, head_dim);
      auto vs = v.value().block(s.start, h * head_dim, s.length, head_dim);
      Matrix scores = (qs * ks.transpose()) * scale;
      for (Index r = 0; r < scores.rows(); ++r) {
        const double mx = scores.row(r).maxCoeff();
        scores.row(r) = (scores.row(r).array() - mx).exp();
        scores.row(r) /= scores.row(r).sum();
      }
      out.block(s.start, h * head_dim, s.length, head_dim) = scores * vs;
      probs->push_back(std::move(scores));
    }
  }

  return MakeResult(
      std::move(out), {nq, nk, nv},
      [nq, nk, nv, segs, heads, head_dim, scale, probs](Node& self) {
        Matrix dq = Matrix::Zero(nq->value.rows(), nq->value.cols());
        Matrix dk = Matrix::Zero(dq.rows(), dq.cols());
        Matrix dv = Matrix::Zero(dq.rows(), dq.cols());
        size_t idx = 0;
        for (const auto& s : segs) {
          for (int h = 0; h < heads; ++h, ++idx) {
            const Matrix& p = (*probs)[idx];
            auto qs = nq->value.block(s.start, h * head_dim, s.length, head_dim);
            auto ks = nk->value.block(s.start, h * head_dim, s.length, head_dim);
            auto vs = nv->value.block(s.start, h * head_dim, s.length, head_dim);
            auto dout =
                self.grad.block(s.start, h * head_dim, s.length, head_dim);
            dv.block(s.start, h * head_dim, s.length, head_dim) =
                p.transpose() * dout;
            Matrix dp = dout * vs.transpose();
            Eigen::VectorXd inner = (dp.array() * p.array()).rowwise().sum();
            Matrix ds = p.array() * (dp.array().colwise() - inner.array());
            dq.block(s.start, h * head_dim, s.length, head_dim) =
                (ds * ks) * scale;
            dk.block(s.start, h * head_dim, s.length, head_dim) =
                (ds.transpose() * qs) * scale;
          }
        }
        if (nq->requires_grad) nq->Accumulate(dq);
        if (nk->requires_grad) nk->Accumulate(dk);
        if (nv->requires_grad) nv->Accumulate(dv);
      });
}

Var Combine(const Var& x, Index rows, Index cols,
            std::span<const SparseTerm> terms) {
  NodePtr nx = x.shared();
  std::vector<SparseTerm> t(terms.begin(), terms.end());
  Matrix out = Matrix::Zero(rows, cols);
  for (const auto& term : t) {
    if (term.out_row < 0 || term.out_row >= rows || term.out_col < 0 ||
        term.out_col >= cols || term.in_row < 0 || term.in_row >= x.rows() ||
        term.in_col < 0 || term.in_col >= x.cols()) {
      throw ArgumentError("Combine: term index out of range");
    }
    out(term.out_row, term.out_col) +=
        term.coef * x.value()(term.in_row, term.in_col);
  }
  return MakeResult(std::move(out), {nx}, [nx, t](Node& self) {
    Matrix dx = Matrix::Zero(nx->value.rows(), nx->value.cols());
    for (const auto& term : t) {
      dx(term.in_row, term.in_col) +=
          term.coef * self.grad(term.out_row, term.out_col);
    }
    nx->Accumulate(dx);
  });
}

Var CrossEntropySum(const Var& logits, std::span<const int> targets) {
  if (static_cast<Index>(targets.size()) != logits.rows()) {
    throw ArgumentError("CrossEntropySum: one target per row required");
  }
  NodePtr nl = logits.shared();
  std::vector<int> tgt(targets.begin(), targets.end());
  Matrix probs(logits.rows(), logits.cols());
  double loss = 0.0;
  for (Index r = 0; r < logits.rows(); ++r) {
    const int target = tgt[r];
    if (target < 0) {
      probs.row(r).setZero();
      continue;
    }
    if (target >= logits.cols()) {
      throw ArgumentError("CrossEntropySum: target out of range");
    }
    const auto row = logits.value().row(r);
    const double mx = row.maxCoeff();
    probs.row(r) = (row.array() - mx).exp();
    const double z = probs.row(r).sum();
    probs.row(r) /= z;
    loss += -(row(target) - mx - std::log(z));
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  return MakeResult(std::move(out), {nl}, [nl, tgt, probs](Node& self) {
    Matrix d = probs;
    for (Index r = 0; r < d.rows(); ++r) {
      if (tgt[r] >= 0) d(r, tgt[r]) -= 1.0;
    }
    nl->Accumulate(d * self.grad(0, 0));
  });
}

}  // namespace wacse::ag
