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

#ifndef WACSE_OBJECTIVES_HPP_
#define WACSE_OBJECTIVES_HPP_

// Translation ranking (TR), aligned word prediction (AWP) and word
// translation ranking (WTR) losses and their weighted combination.
//
// Similarities are raw cosines unless SimilarityOptions::scale says
// otherwise. Multi-token words are compared position by position after
// clipping both spans to the shorter length.

#include <span>
#include <vector>

#include "alignment.hpp"
#include "autograd.hpp"
#include "encoder.hpp"
#include "tokenizer.hpp"

namespace wacse {

struct LossWeights {
  double alpha = 0.8;  // TR
  double beta = 0.1;   // AWP
  double gamma = 0.1;  // WTR

  void Validate() const;
  bool operator==(const LossWeights&) const = default;
};

struct BatchLosses {
  double tr = 0.0;
  double awp = 0.0;
  double wtr = 0.0;
  double total = 0.0;
  int n = 0;
};

// Cosine similarity; throws ArgumentError on a zero vector.
double Phi(std::span<const double> u, std::span<const double> v);
double Phi(const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v);

// Mean position-wise cosine over the first min(rows) rows of each span.
double PhiM(const ag::Matrix& a, const ag::Matrix& b);

struct SimilarityOptions {
  // Multiplies every cosine before the softmax; 1 leaves them unscaled.
  double scale = 1.0;
  // Averages the X->Y and Y->X ranking losses instead of X->Y alone.
  bool bidirectional_tr = false;
};

enum class AwpMode {
  kBatched,  // all aligned words of a sentence masked in one pass
  kExact,    // one pass per aligned word
};

// Mean over rows i of -log softmax_j(phi(src_i, tgt_j))[i]. Inputs are N x d
// with N >= 2.
ag::Var TrLoss(const ag::Var& src_cls, const ag::Var& tgt_cls,
               const SimilarityOptions& options = {});
double TrLoss(const std::vector<Eigen::RowVectorXd>& src_cls,
              const std::vector<Eigen::RowVectorXd>& tgt_cls,
              const SimilarityOptions& options = {});

// A tokenized pair with its filtered dictionaries; links that point at
// words dropped by truncation are removed.
struct PairExample {
  Tokenized src;
  Tokenized tgt;
  AlignmentDict forward;   // src word -> tgt word
  AlignmentDict backward;  // tgt word -> src word
};

PairExample MakeExample(const ParallelPair& pair, const BidirectionalDict& dicts,
                        const Tokenizer& tokenizer, int max_seq_len);

// WTR summed over aligned words in both directions, divided by 2N. Sequence
// src_i starts at row src_offsets[i] of hidden, tgt_i at tgt_offsets[i].
ag::Var WtrLoss(const ag::Var& hidden, std::span<const PairExample> batch,
                std::span<const int> src_offsets, std::span<const int> tgt_offsets,
                const SimilarityOptions& options = {});

// One masked encoder input and the positions it is scored at.
struct MaskedInput {
  Tokenized input;
  std::vector<int> positions;
  std::vector<int> targets;
};

// Masked inputs for both directions of one example.
std::vector<MaskedInput> BuildAwpInputs(const PairExample& example, AwpMode mode);

// AWP summed over aligned words in both directions, divided by 2N.
ag::Var AwpLoss(const Encoder& encoder, std::span<const PairExample> batch,
                AwpMode mode);

// Validates weights; total = alpha*tr + beta*awp + gamma*wtr.
BatchLosses CombineLosses(double tr, double awp, double wtr,
                          const LossWeights& weights, int n = 0);

struct ObjectiveConfig {
  LossWeights weights;
  SimilarityOptions similarity;
  AwpMode awp_mode = AwpMode::kBatched;
};

struct BatchObjective {
  ag::Var total;
  BatchLosses losses;
};

// Combined loss of a batch. A component with zero weight is left out of the
// graph; with report_all it is still evaluated for logging.
BatchObjective ComputeBatchLoss(const Encoder& encoder,
                                std::span<const PairExample> batch,
                                const ObjectiveConfig& config,
                                bool report_all = true);

}  // namespace wacse

#endif  // WACSE_OBJECTIVES_HPP_
