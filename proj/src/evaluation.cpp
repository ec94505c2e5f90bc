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

#include "evaluation.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "error.hpp"
#include "objectives.hpp"
#include "util.hpp"

namespace wacse {
namespace {

ag::Matrix UnitRows(const ag::Matrix& m) {
  ag::Matrix out = m;
  for (ag::Index r = 0; r < out.rows(); ++r) {
    const double norm = out.row(r).norm();
    if (norm > 0.0) out.row(r) /= norm;
  }
  return out;
}

double MeanTopK(const Eigen::RowVectorXd& row, int k) {
  std::vector<double> v(row.data(), row.data() + row.size());
  k = std::min<int>(k, static_cast<int>(v.size()));
  std::partial_sort(v.begin(), v.begin() + k, v.end(), std::greater<>());
  return std::accumulate(v.begin(), v.begin() + k, 0.0) / k;
}

std::string PairKey(const LangPair& langs) {
  return std::to_string(langs.first) + "-" + std::to_string(langs.second);
}

Eigen::RowVectorXd WordVector(const Model& model, const std::string& word) {
  const int id = model.tokenizer.TokenId(model.tokenizer.SplitWord(word).front());
  return model.encoder.token_embedding().value().row(id);
}

}  // namespace

ag::Matrix EmbedSentences(const Tokenizer& tokenizer, const Encoder& encoder,
                          const std::vector<Sentence>& sentences, int batch_size) {
  const int dim = encoder.config().model_dim;
  ag::Matrix out(static_cast<ag::Index>(sentences.size()), dim);
  std::vector<Tokenized> chunk;
  for (size_t begin = 0; begin < sentences.size();
       begin += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(sentences.size(), begin + batch_size);
    chunk.clear();
    for (size_t i = begin; i < end; ++i) {
      chunk.push_back(tokenizer.Tokenize(sentences[i], encoder.config().max_seq_len));
    }
    const auto encoded = encoder.EncodeBatch(chunk);
    for (size_t i = begin; i < end; ++i) {
      out.row(static_cast<ag::Index>(i)) = encoded[i - begin].cls;
    }
  }
  return out;
}

RetrievalResult RetrievalAccuracy(const ag::Matrix& src, const ag::Matrix& tgt) {
  if (src.rows() != tgt.rows() || src.cols() != tgt.cols()) {
    throw ArgumentError("RetrievalAccuracy: embedding sets differ in shape");
  }
  if (src.rows() < 2) throw ArgumentError("RetrievalAccuracy: need >= 2 items");
  const ag::Matrix sim = UnitRows(src) * UnitRows(tgt).transpose();
  const ag::Index n = sim.rows();
  int fwd = 0, bwd = 0;
  for (ag::Index i = 0; i < n; ++i) {
    ag::Index best_col = 0, best_row = 0;
    for (ag::Index j = 1; j < n; ++j) {
      if (sim(i, j) > sim(i, best_col)) best_col = j;
      if (sim(j, i) > sim(best_row, i)) best_row = j;
    }
    fwd += best_col == i;
    bwd += best_row == i;
  }
  RetrievalResult r;
  r.forward = static_cast<double>(fwd) / static_cast<double>(n);
  r.backward = static_cast<double>(bwd) / static_cast<double>(n);
  r.mean = 0.5 * (r.forward + r.backward);
  return r;
}

ag::Matrix MarginScores(const ag::Matrix& a, const ag::Matrix& b, int k) {
  if (k < 1) throw ArgumentError("mining k must be >= 1");
  if (a.rows() == 0 || b.rows() == 0) throw ArgumentError("mining: empty side");
  const ag::Matrix sim = UnitRows(a) * UnitRows(b).transpose();
  Eigen::VectorXd knn_a(sim.rows()), knn_b(sim.cols());
  for (ag::Index i = 0; i < sim.rows(); ++i) knn_a(i) = MeanTopK(sim.row(i), k);
  for (ag::Index j = 0; j < sim.cols(); ++j) {
    knn_b(j) = MeanTopK(sim.col(j).transpose(), k);
  }
  ag::Matrix out(sim.rows(), sim.cols());
  for (ag::Index i = 0; i < sim.rows(); ++i) {
    for (ag::Index j = 0; j < sim.cols(); ++j) {
      double denom = 0.5 * (knn_a(i) + knn_b(j));
      if (denom == 0.0) denom = std::numeric_limits<double>::min();
      out(i, j) = sim(i, j) / denom;
    }
  }
  return out;
}

std::vector<MiningCandidate> ScoreCandidates(const ag::Matrix& a,
                                             const ag::Matrix& b, int k,
                                             MiningMode mode) {
  const ag::Matrix scores = mode == MiningMode::kMargin
                                ? MarginScores(a, b, k)
                                : ag::Matrix(UnitRows(a) * UnitRows(b).transpose());
  std::map<std::pair<int, int>, double> merged;
  for (ag::Index i = 0; i < scores.rows(); ++i) {
    ag::Index best = 0;
    for (ag::Index j = 1; j < scores.cols(); ++j) {
      if (scores(i, j) > scores(i, best)) best = j;
    }
    merged[{static_cast<int>(i), static_cast<int>(best)}] = scores(i, best);
  }
  for (ag::Index j = 0; j < scores.cols(); ++j) {
    ag::Index best = 0;
    for (ag::Index i = 1; i < scores.rows(); ++i) {
      if (scores(i, j) > scores(best, j)) best = i;
    }
    merged[{static_cast<int>(best), static_cast<int>(j)}] = scores(best, j);
  }
  std::vector<MiningCandidate> out;
  out.reserve(merged.size());
  for (const auto& [ab, score] : merged) out.push_back({ab.first, ab.second, score});
  return out;
}

Prf ComputePrf(const IndexPairs& predicted, const IndexPairs& gold) {
  if (gold.empty()) throw ArgumentError("mining: empty gold set");
  size_t hits = 0;
  for (const auto& p : predicted) hits += gold.count(p);
  Prf prf;
  prf.precision = predicted.empty() ? 0.0
                                    : static_cast<double>(hits) /
                                          static_cast<double>(predicted.size());
  prf.recall = static_cast<double>(hits) / static_cast<double>(gold.size());
  // Same value as the harmonic mean, but equal ratios round identically.
  prf.f1 = 2.0 * static_cast<double>(hits) /
           static_cast<double>(predicted.size() + gold.size());
  return prf;
}

ThresholdChoice BestThreshold(const std::vector<MiningCandidate>& candidates,
                              const IndexPairs& gold) {
  if (gold.empty()) throw ArgumentError("mining: empty gold set");
  std::vector<MiningCandidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& x, const auto& y) { return x.score > y.score; });
  ThresholdChoice best;
  best.threshold = std::numeric_limits<double>::infinity();
  double best_f = 0.0;
  size_t hits = 0;
  for (size_t i = 0; i < sorted.size();) {
    const double threshold = sorted[i].score;
    while (i < sorted.size() && sorted[i].score == threshold) {
      hits += gold.count({sorted[i].a, sorted[i].b});
      ++i;
    }
    const double f = 2.0 * static_cast<double>(hits) /
                     static_cast<double>(i + gold.size());
    if (f > best_f) {
      best_f = f;
      best.threshold = threshold;
    }
  }
  IndexPairs selected;
  for (const auto& c : sorted) {
    if (c.score >= best.threshold) selected.insert({c.a, c.b});
  }
  best.prf = ComputePrf(selected, gold);
  return best;
}

MiningResult MineBitext(const ag::Matrix& a, const ag::Matrix& b,
                        const IndexPairs& gold, int k, MiningMode mode,
                        bool held_out) {
  if (gold.empty()) throw ArgumentError("mining: empty gold set");
  const auto candidates = ScoreCandidates(a, b, k, mode);
  MiningResult result;
  if (!held_out) {
    const auto choice = BestThreshold(candidates, gold);
    result.prf = choice.prf;
    result.threshold = choice.threshold;
    return result;
  }
  std::vector<MiningCandidate> tune, test;
  IndexPairs gold_tune, gold_test;
  for (const auto& c : candidates) (c.a % 2 == 0 ? tune : test).push_back(c);
  for (const auto& g : gold) (g.first % 2 == 0 ? gold_tune : gold_test).insert(g);
  if (gold_tune.empty() || gold_test.empty()) {
    throw ArgumentError("mining: held-out split needs gold pairs on both halves");
  }
  result.threshold = BestThreshold(tune, gold_tune).threshold;
  IndexPairs selected;
  for (const auto& c : test) {
    if (c.score >= result.threshold) selected.insert({c.a, c.b});
  }
  result.prf = ComputePrf(selected, gold_test);
  return result;
}

std::vector<double> AverageRanks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t x, size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
    i = j + 1;
  }
  return ranks;
}

double SpearmanRho(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("Spearman: length mismatch");
  if (x.size() < 3) throw ArgumentError("Spearman: need at least 3 items");
  const auto rx = AverageRanks(x);
  const auto ry = AverageRanks(y);
  const double n = static_cast<double>(rx.size());
  const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw ArgumentError("Spearman: correlation undefined for constant input");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<size_t> WeightedSample(const std::vector<double>& weights, size_t n,
                                   uint64_t seed) {
  Rng rng(DeriveSeed(seed, 0x5A4D));
  std::vector<std::pair<double, size_t>> keys;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0)) continue;
    double u = rng.Uniform();
    while (u <= 0.0) u = rng.Uniform();
    keys.emplace_back(std::log(u) / weights[i], i);
  }
  n = std::min(n, keys.size());
  std::partial_sort(keys.begin(), keys.begin() + static_cast<long>(n), keys.end(),
                    [](const auto& x, const auto& y) {
                      return x.first > y.first || (x.first == y.first && x.second < y.second);
                    });
  std::vector<size_t> out;
  for (size_t i = 0; i < n; ++i) out.push_back(keys[i].second);
  return out;
}

CosineStats AlignedWordCosine(const Model& model,
                              const std::vector<ParallelPair>& pairs,
                              int max_pairs, uint64_t seed) {
  std::map<std::pair<std::string, std::string>, double> counts;
  for (const auto& pair : pairs) {
    for (const auto& link : pair.gold_links) {
      if (link.src >= static_cast<int>(pair.src.size()) ||
          link.tgt >= static_cast<int>(pair.tgt.size())) {
        throw ArgumentError("gold link out of sentence bounds");
      }
      counts[{pair.src.words[link.src], pair.tgt.words[link.tgt]}] += 1.0;
    }
  }
  if (counts.empty()) throw ArgumentError("aligned word cosine: no gold links");
  std::vector<std::pair<std::string, std::string>> items;
  std::vector<double> weights;
  for (const auto& [words, count] : counts) {
    items.push_back(words);
    weights.push_back(count);
  }
  const auto picked =
      WeightedSample(weights, static_cast<size_t>(std::max(max_pairs, 0)), seed);
  std::vector<double> cosines;
  for (size_t idx : picked) {
    cosines.push_back(Phi(WordVector(model, items[idx].first),
                          WordVector(model, items[idx].second)));
  }
  CosineStats stats;
  stats.count = static_cast<int>(cosines.size());
  if (cosines.empty()) return stats;
  const double n = static_cast<double>(cosines.size());
  stats.mean = std::accumulate(cosines.begin(), cosines.end(), 0.0) / n;
  double var = 0.0;
  for (double c : cosines) var += (c - stats.mean) * (c - stats.mean);
  stats.stddev = std::sqrt(var / n);
  return stats;
}

std::vector<WordSample> SampleWords(const std::vector<ParallelPair>& pairs, int n,
                                    uint64_t seed) {
  std::map<std::pair<LangId, std::string>, double> counts;
  for (const auto& pair : pairs) {
    for (const auto& w : pair.src.words) counts[{pair.src.lang, w}] += 1.0;
    for (const auto& w : pair.tgt.words) counts[{pair.tgt.lang, w}] += 1.0;
  }
  std::vector<WordSample> items;
  std::vector<double> weights;
  for (const auto& [key, count] : counts) {
    items.push_back({key.second, key.first});
    weights.push_back(count);
  }
  std::vector<WordSample> out;
  for (size_t idx : WeightedSample(weights, static_cast<size_t>(std::max(n, 0)), seed)) {
    out.push_back(items[idx]);
  }
  return out;
}

std::vector<WordSample> SampleVocabularyWords(const Tokenizer& tokenizer, int n,
                                              uint64_t seed) {
  std::vector<WordSample> items;
  const auto& vocab = tokenizer.vocab();
  for (size_t id = Tokenizer::kSpecialCount; id < vocab.size(); ++id) {
    const std::string& token = vocab[id];
    if (token.rfind("##", 0) == 0 || tokenizer.SplitWord(token).size() != 1) continue;
    LangId lang = kPivotLanguage;
    const size_t underscore = token.find('_');
    if (token.size() > 1 && token[0] == 'l' && underscore != std::string::npos) {
      int parsed = 0;
      const auto [ptr, ec] =
          std::from_chars(token.data() + 1, token.data() + underscore, parsed);
      if (ec == std::errc() && ptr == token.data() + underscore) lang = parsed;
    }
    items.push_back({token, lang});
  }
  std::vector<WordSample> out;
  const std::vector<double> weights(items.size(), 1.0);
  for (size_t idx : WeightedSample(weights, static_cast<size_t>(std::max(n, 0)), seed)) {
    out.push_back(items[idx]);
  }
  return out;
}

ag::Matrix Pca2(const ag::Matrix& points) {
  const ag::Index n = points.rows();
  const ag::Index d = points.cols();
  ag::Matrix out = ag::Matrix::Zero(n, 2);
  if (n == 0 || d == 0) return out;
  const Eigen::RowVectorXd mean = points.colwise().mean();
  const Eigen::MatrixXd centered = points.rowwise() - mean;
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(std::max<ag::Index>(n - 1, 1));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  const Eigen::MatrixXd& vectors = solver.eigenvectors();
  for (int c = 0; c < 2 && c < d; ++c) {
    Eigen::VectorXd axis = vectors.col(d - 1 - c);
    for (ag::Index i = 0; i < axis.size(); ++i) {
      if (std::abs(axis(i)) > 1e-12) {
        if (axis(i) < 0) axis = -axis;
        break;
      }
    }
    out.col(c) = centered * axis;
  }
  return out;
}

std::vector<ProjectedWord> ProjectWords(const Model& model,
                                        const std::vector<WordSample>& words) {
  if (words.size() < 3) throw ArgumentError("projection needs at least 3 words");
  ag::Matrix points(static_cast<ag::Index>(words.size()),
                    model.encoder.config().model_dim);
  for (size_t i = 0; i < words.size(); ++i) {
    points.row(static_cast<ag::Index>(i)) = WordVector(model, words[i].word);
  }
  const ag::Matrix coords = Pca2(points);
  std::vector<ProjectedWord> out;
  for (size_t i = 0; i < words.size(); ++i) {
    const auto r = static_cast<ag::Index>(i);
    out.push_back({words[i], coords(r, 0), coords(r, 1)});
  }
  return out;
}

void WriteProjection(const std::vector<ProjectedWord>& rows,
                     const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write projection file " + path);
  for (const auto& r : rows) {
    out << r.word.word << '\t' << r.word.lang << '\t' << FormatDouble(r.x) << '\t'
        << FormatDouble(r.y) << '\n';
  }
  if (!out) throw RuntimeError("write failed for " + path);
}

std::vector<StsItem> MakeStsTask(const std::vector<ParallelPair>& pairs,
                                 uint64_t seed) {
  static constexpr double kKeepLevels[] = {1.0, 0.75, 0.5, 0.25, 0.0};
  std::vector<StsItem> items;
  if (pairs.size() < 2) return items;
  Rng rng(DeriveSeed(seed, 0x575));
  for (size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    const double keep = kKeepLevels[i % std::size(kKeepLevels)];
    const size_t len = pair.tgt.size();
    const auto replace = static_cast<size_t>(
        std::llround((1.0 - keep) * static_cast<double>(len)));
    std::vector<size_t> positions(len);
    std::iota(positions.begin(), positions.end(), 0);
    rng.Shuffle(positions);
    StsItem item{pair.src, pair.tgt, 0.0};
    size_t changed = 0;
    for (size_t r = 0; r < replace; ++r) {
      // Borrow a word from another target sentence of the same language.
      for (int attempt = 0; attempt < 16; ++attempt) {
        const size_t other = rng.Below(pairs.size());
        if (other == i) continue;
        const auto& words = pairs[other].tgt.words;
        const std::string& w = words[rng.Below(words.size())];
        if (w != item.b.words[positions[r]]) {
          item.b.words[positions[r]] = w;
          ++changed;
          break;
        }
      }
    }
    item.gold = 1.0 - static_cast<double>(changed) / static_cast<double>(len);
    items.push_back(std::move(item));
  }
  return items;
}

EvalReport Evaluate(const Model& model, const Corpus& eval_pairs,
                    const EvalOptions& options) {
  EvalReport report;
  std::vector<double> sts_sim, sts_gold;
  int mined = 0;
  for (const auto& [langs, pairs] : eval_pairs) {
    if (pairs.size() < 2) continue;
    std::vector<Sentence> src, tgt;
    for (const auto& p : pairs) {
      src.push_back(p.src);
      tgt.push_back(p.tgt);
    }
    const ag::Matrix xs = EmbedSentences(model.tokenizer, model.encoder, src);
    const ag::Matrix ys = EmbedSentences(model.tokenizer, model.encoder, tgt);
    report.retrieval[langs] = RetrievalAccuracy(xs, ys);

    const int third = static_cast<int>(pairs.size()) / 3;
    if (third >= 2) {
      const int n = static_cast<int>(pairs.size());
      IndexPairs gold;
      for (int i = third; i < 2 * third; ++i) gold.insert({i, i - third});
      const auto result =
          MineBitext(xs.topRows(2 * third), ys.bottomRows(n - third), gold,
                     options.mining_k, options.mining_mode);
      report.mining_by_pair[langs] = result;
      report.mining.precision += result.prf.precision;
      report.mining.recall += result.prf.recall;
      report.mining.f1 += result.prf.f1;
      ++mined;
    }

    if (options.sts) {
      for (const auto& item : MakeStsTask(pairs, options.seed)) {
        const ag::Matrix e = EmbedSentences(model.tokenizer, model.encoder,
                                            {item.a, item.b});
        sts_sim.push_back(Phi(Eigen::RowVectorXd(e.row(0)), Eigen::RowVectorXd(e.row(1))));
        sts_gold.push_back(item.gold);
      }
    }

    bool has_links = false;
    for (const auto& p : pairs) has_links |= !p.gold_links.empty();
    if (has_links && options.aligned_words > 0) {
      report.aligned_cosine_by_pair[langs] =
          AlignedWordCosine(model, pairs, options.aligned_words, options.seed);
    }
  }
  if (!report.retrieval.empty()) {
    for (const auto& [langs, r] : report.retrieval) report.retrieval_mean += r.mean;
    report.retrieval_mean /= static_cast<double>(report.retrieval.size());
  }
  if (mined > 0) {
    report.mining.precision /= mined;
    report.mining.recall /= mined;
    report.mining.f1 /= mined;
  }
  if (sts_sim.size() >= 3) {
    try {
      report.sts_spearman = SpearmanRho(sts_sim, sts_gold);
      report.has_sts = true;
    } catch (const Error&) {
      report.has_sts = false;
    }
  }
  std::vector<ParallelPair> all;
  for (const auto& [langs, pairs] : eval_pairs) {
    for (const auto& p : pairs) {
      if (!p.gold_links.empty()) all.push_back(p);
    }
  }
  if (!all.empty() && options.aligned_words > 0) {
    report.aligned_cosine = AlignedWordCosine(model, all, options.aligned_words, options.seed);
  }
  return report;
}

std::string FormatReport(const EvalReport& report) {
  std::ostringstream out;
  auto line = [&](const std::string& key, double value) {
    out << key << '\t' << FormatDouble(value) << '\n';
  };
  for (const auto& [langs, r] : report.retrieval) {
    const std::string k = "retrieval." + PairKey(langs);
    line(k + ".src_to_tgt", r.forward);
    line(k + ".tgt_to_src", r.backward);
    line(k + ".mean", r.mean);
  }
  line("retrieval.mean", report.retrieval_mean);
  for (const auto& [langs, m] : report.mining_by_pair) {
    const std::string k = "mining." + PairKey(langs);
    line(k + ".precision", m.prf.precision);
    line(k + ".recall", m.prf.recall);
    line(k + ".f1", m.prf.f1);
    line(k + ".threshold", m.threshold);
  }
  line("mining.precision", report.mining.precision);
  line("mining.recall", report.mining.recall);
  line("mining.f1", report.mining.f1);
  if (report.has_sts) line("sts.spearman", report.sts_spearman);
  for (const auto& [langs, c] : report.aligned_cosine_by_pair) {
    const std::string k = "aligned_cosine." + PairKey(langs);
    line(k + ".mean", c.mean);
    line(k + ".std", c.stddev);
    line(k + ".count", c.count);
  }
  line("aligned_cosine.mean", report.aligned_cosine.mean);
  line("aligned_cosine.std", report.aligned_cosine.stddev);
  line("aligned_cosine.count", report.aligned_cosine.count);
  return out.str();
}

void WriteReport(const EvalReport& report, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write report " + path);
  out << FormatReport(report);
  if (!out) throw RuntimeError("write failed for " + path);
}

}  // namespace wacse
