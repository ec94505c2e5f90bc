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

#include "objectives.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace wacse {
namespace {

// Keeps links whose indices survived truncation.
AlignmentDict RestrictDict(const AlignmentDict& dict, int src_words, int tgt_words) {
  AlignmentDict out = dict;
  std::erase_if(out.links, [&](const auto& kv) {
    return kv.first >= src_words || kv.second.index >= tgt_words;
  });
  return out;
}

ag::Matrix ToMatrix(const std::vector<Eigen::RowVectorXd>& rows) {
  if (rows.empty()) return ag::Matrix();
  ag::Matrix m(static_cast<ag::Index>(rows.size()), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw ArgumentError("ragged embeddings");
    m.row(static_cast<ag::Index>(i)) = rows[i];
  }
  return m;
}

// Cross entropy of one direction of WTR for one pair. `sim` holds unit
// cosines between query-side token rows and key-side token rows; when
// transposed, rows index the key side instead.
void AppendWtrDirection(const AlignmentDict& dict,
                        const std::vector<WordSpan>& query_spans,
                        const std::vector<WordSpan>& key_spans, bool transposed,
                        double scale, std::vector<ag::SparseTerm>& terms,
                        std::vector<int>& targets) {
  const int nkeys = static_cast<int>(key_spans.size());
  for (const auto& [word, target] : dict.links) {
    const int row = static_cast<int>(targets.size());
    const WordSpan q = query_spans[word];
    for (int n = 0; n < nkeys; ++n) {
      const WordSpan k = key_spans[n];
      const int m = std::min(q.width(), k.width());
      for (int t = 0; t < m; ++t) {
        // Token rows exclude cls, hence the -1.
        const int qi = q.start + t - 1;
        const int ki = k.start + t - 1;
        terms.push_back({row, n, transposed ? ki : qi, transposed ? qi : ki,
                         scale / m});
      }
    }
    targets.push_back(target.index);
  }
}

}  // namespace

void LossWeights::Validate() const {
  if (!(alpha >= 0.0) || !(beta >= 0.0) || !(gamma >= 0.0)) {
    throw ArgumentError("loss weights must be non-negative");
  }
}

double Phi(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw ArgumentError("Phi: dimension mismatch");
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (!(nu > 0.0) || !(nv > 0.0)) {
    throw ArgumentError("Phi: cosine of a zero vector is undefined");
  }
  return std::clamp(dot / std::sqrt(nu * nv), -1.0, 1.0);
}

double Phi(const Eigen::RowVectorXd& u, const Eigen::RowVectorXd& v) {
  return Phi(std::span<const double>(u.data(), static_cast<size_t>(u.size())),
             std::span<const double>(v.data(), static_cast<size_t>(v.size())));
}

double PhiM(const ag::Matrix& a, const ag::Matrix& b) {
  if (a.rows() == 0 || b.rows() == 0) throw ArgumentError("PhiM: empty span");
  const ag::Index m = std::min(a.rows(), b.rows());
  double sum = 0.0;
  for (ag::Index t = 0; t < m; ++t) sum += Phi(Eigen::RowVectorXd(a.row(t)),
                                               Eigen::RowVectorXd(b.row(t)));
  return sum / static_cast<double>(m);
}

ag::Var TrLoss(const ag::Var& src_cls, const ag::Var& tgt_cls,
               const SimilarityOptions& options) {
  const ag::Index n = src_cls.rows();
  if (n < 2) throw ArgumentError("TrLoss: batch needs at least 2 pairs");
  if (tgt_cls.rows() != n) throw ArgumentError("TrLoss: batch size mismatch");
  std::vector<int> diag(static_cast<size_t>(n));
  for (ag::Index i = 0; i < n; ++i) diag[i] = static_cast<int>(i);
  const ag::Var xs = ag::NormalizeRows(src_cls);
  const ag::Var ys = ag::NormalizeRows(tgt_cls);
  const ag::Var fwd = ag::CrossEntropySum(
      ag::Scale(ag::MatMulNT(xs, ys), options.scale), diag);
  if (!options.bidirectional_tr) return ag::Scale(fwd, 1.0 / n);
  const ag::Var bwd = ag::CrossEntropySum(
      ag::Scale(ag::MatMulNT(ys, xs), options.scale), diag);
  const ag::Var both[] = {fwd, bwd};
  const double w[] = {0.5 / n, 0.5 / n};
  return ag::WeightedSum(both, w);
}

double TrLoss(const std::vector<Eigen::RowVectorXd>& src_cls,
              const std::vector<Eigen::RowVectorXd>& tgt_cls,
              const SimilarityOptions& options) {
  ag::NoGradGuard no_grad;
  return TrLoss(ag::Constant(ToMatrix(src_cls)), ag::Constant(ToMatrix(tgt_cls)),
                options)
      .scalar();
}

PairExample MakeExample(const ParallelPair& pair, const BidirectionalDict& dicts,
                        const Tokenizer& tokenizer, int max_seq_len) {
  PairExample ex;
  ex.src = tokenizer.Tokenize(pair.src, max_seq_len);
  ex.tgt = tokenizer.Tokenize(pair.tgt, max_seq_len);
  ex.forward = RestrictDict(dicts.forward, ex.src.word_count(), ex.tgt.word_count());
  ex.backward = RestrictDict(dicts.backward, ex.tgt.word_count(), ex.src.word_count());
  return ex;
}

ag::Var WtrLoss(const ag::Var& hidden, std::span<const PairExample> batch,
                std::span<const int> src_offsets, std::span<const int> tgt_offsets,
                const SimilarityOptions& options) {
  const size_t n = batch.size();
  if (n == 0) throw ArgumentError("WtrLoss: empty batch");
  if (src_offsets.size() != n || tgt_offsets.size() != n) {
    throw ArgumentError("WtrLoss: offset count mismatch");
  }
  std::vector<ag::Var> terms;
  const ag::Var unit = ag::NormalizeRows(hidden);
  for (size_t i = 0; i < n; ++i) {
    const PairExample& ex = batch[i];
    if (ex.forward.empty() && ex.backward.empty()) continue;
    std::vector<int> src_rows, tgt_rows;
    for (size_t p = 1; p < ex.src.ids.size(); ++p) {
      src_rows.push_back(src_offsets[i] + static_cast<int>(p));
    }
    for (size_t p = 1; p < ex.tgt.ids.size(); ++p) {
      tgt_rows.push_back(tgt_offsets[i] + static_cast<int>(p));
    }
    const ag::Var sim =
        ag::MatMulNT(ag::GatherRows(unit, src_rows), ag::GatherRows(unit, tgt_rows));

    std::vector<ag::SparseTerm> fwd_terms, bwd_terms;
    std::vector<int> fwd_targets, bwd_targets;
    AppendWtrDirection(ex.forward, ex.src.spans, ex.tgt.spans, false,
                       options.scale, fwd_terms, fwd_targets);
    AppendWtrDirection(ex.backward, ex.tgt.spans, ex.src.spans, true,
                       options.scale, bwd_terms, bwd_targets);
    if (!fwd_targets.empty()) {
      terms.push_back(ag::CrossEntropySum(
          ag::Combine(sim, static_cast<ag::Index>(fwd_targets.size()),
                      ex.tgt.word_count(), fwd_terms),
          fwd_targets));
    }
    if (!bwd_targets.empty()) {
      terms.push_back(ag::CrossEntropySum(
          ag::Combine(sim, static_cast<ag::Index>(bwd_targets.size()),
                      ex.src.word_count(), bwd_terms),
          bwd_targets));
    }
  }
  if (terms.empty()) return ag::Constant(ag::Matrix::Zero(1, 1));
  std::vector<double> w(terms.size(), 1.0 / (2.0 * static_cast<double>(n)));
  return ag::WeightedSum(terms, w);
}

std::vector<MaskedInput> BuildAwpInputs(const PairExample& example, AwpMode mode) {
  std::vector<MaskedInput> out;
  auto direction = [&](const Tokenized& query, const Tokenized& key,
                       const AlignmentDict& dict) {
    MaskedInput batched{query, {}, {}};
    for (const auto& [word, target] : dict.links) {
      MaskedInput single{query, {}, {}};
      MaskedInput& into = mode == AwpMode::kBatched ? batched : single;
      const WordSpan q = query.spans[word];
      const WordSpan k = key.spans[target.index];
      for (int p = q.start; p < q.end; ++p) into.input.ids[p] = Tokenizer::kMask;
      const int m = std::min(q.width(), k.width());
      for (int t = 0; t < m; ++t) {
        into.positions.push_back(q.start + t);
        into.targets.push_back(key.ids[k.start + t]);
      }
      if (mode == AwpMode::kExact) out.push_back(std::move(single));
    }
    if (mode == AwpMode::kBatched && !batched.positions.empty()) {
      out.push_back(std::move(batched));
    }
  };
  direction(example.src, example.tgt, example.forward);
  direction(example.tgt, example.src, example.backward);
  return out;
}

ag::Var AwpLoss(const Encoder& encoder, std::span<const PairExample> batch,
                AwpMode mode) {
  const size_t n = batch.size();
  if (n == 0) throw ArgumentError("AwpLoss: empty batch");
  std::vector<Tokenized> inputs;
  std::vector<int> rows, targets;
  std::vector<std::vector<int>> positions;
  for (const auto& ex : batch) {
    for (auto& masked : BuildAwpInputs(ex, mode)) {
      inputs.push_back(std::move(masked.input));
      positions.push_back(std::move(masked.positions));
      targets.insert(targets.end(), masked.targets.begin(), masked.targets.end());
    }
  }
  if (inputs.empty()) return ag::Constant(ag::Matrix::Zero(1, 1));
  const Encoder::Output out = encoder.Forward(inputs);
  for (size_t s = 0; s < inputs.size(); ++s) {
    for (int p : positions[s]) rows.push_back(out.offsets[s] + p);
  }
  const ag::Var logits = encoder.MlmHead(ag::GatherRows(out.hidden, rows));
  return ag::Scale(ag::CrossEntropySum(logits, targets),
                   1.0 / (2.0 * static_cast<double>(n)));
}

BatchLosses CombineLosses(double tr, double awp, double wtr,
                          const LossWeights& weights, int n) {
  weights.Validate();
  BatchLosses out;
  out.tr = tr;
  out.awp = awp;
  out.wtr = wtr;
  out.total = weights.alpha * tr + weights.beta * awp + weights.gamma * wtr;
  out.n = n;
  return out;
}

BatchObjective ComputeBatchLoss(const Encoder& encoder,
                                std::span<const PairExample> batch,
                                const ObjectiveConfig& config, bool report_all) {
  config.weights.Validate();
  const size_t n = batch.size();
  if (n < 2) throw ArgumentError("batch needs at least 2 pairs");

  std::vector<Tokenized> inputs;
  inputs.reserve(2 * n);
  for (const auto& ex : batch) inputs.push_back(ex.src);
  for (const auto& ex : batch) inputs.push_back(ex.tgt);
  const Encoder::Output out = encoder.Forward(inputs);
  std::vector<int> src_offsets(out.offsets.begin(), out.offsets.begin() + n);
  std::vector<int> tgt_offsets(out.offsets.begin() + n, out.offsets.end());

  const ag::Var tr = TrLoss(ag::GatherRows(out.hidden, src_offsets),
                            ag::GatherRows(out.hidden, tgt_offsets),
                            config.similarity);

  std::vector<ag::Var> parts{tr};
  std::vector<double> weights{config.weights.alpha};
  double wtr_value = 0.0, awp_value = 0.0;

  if (config.weights.gamma > 0.0) {
    const ag::Var wtr =
        WtrLoss(out.hidden, batch, src_offsets, tgt_offsets, config.similarity);
    wtr_value = wtr.scalar();
    parts.push_back(wtr);
    weights.push_back(config.weights.gamma);
  } else if (report_all) {
    ag::NoGradGuard no_grad;
    wtr_value =
        WtrLoss(out.hidden, batch, src_offsets, tgt_offsets, config.similarity)
            .scalar();
  }

  if (config.weights.beta > 0.0) {
    const ag::Var awp = AwpLoss(encoder, batch, config.awp_mode);
    awp_value = awp.scalar();
    parts.push_back(awp);
    weights.push_back(config.weights.beta);
  } else if (report_all) {
    ag::NoGradGuard no_grad;
    awp_value = AwpLoss(encoder, batch, config.awp_mode).scalar();
  }

  BatchObjective result;
  result.total = ag::WeightedSum(parts, weights);
  result.losses = CombineLosses(tr.scalar(), awp_value, wtr_value, config.weights,
                                static_cast<int>(n));
  return result;
}

}  // namespace wacse
