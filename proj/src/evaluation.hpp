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

#ifndef WACSE_EVALUATION_HPP_
#define WACSE_EVALUATION_HPP_

// Bitext retrieval, bitext mining, STS correlation, aligned-word embedding
// cosine and 2-D projection export.

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "autograd.hpp"
#include "checkpoint.hpp"
#include "corpus.hpp"

namespace wacse {

// Sentence vectors (cls states), one row per sentence.
ag::Matrix EmbedSentences(const Tokenizer& tokenizer, const Encoder& encoder,
                          const std::vector<Sentence>& sentences,
                          int batch_size = 64);

struct RetrievalResult {
  double forward = 0.0;   // src -> tgt
  double backward = 0.0;  // tgt -> src
  double mean = 0.0;
};

// Nearest neighbour by cosine; row i of src is the translation of row i of
// tgt. Ties resolve to the lowest index; zero rows score 0 against all.
RetrievalResult RetrievalAccuracy(const ag::Matrix& src, const ag::Matrix& tgt);

enum class MiningMode { kMargin, kCosine };

struct MiningCandidate {
  int a = 0;
  int b = 0;
  double score = 0.0;
};

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

using IndexPairs = std::set<std::pair<int, int>>;

// Ratio margin: cos(a, b) over the average of the mean cosine of a to its k
// nearest b's and of b to its k nearest a's.
ag::Matrix MarginScores(const ag::Matrix& a, const ag::Matrix& b, int k);

// Best-scoring partner of every row of a and of every row of b, merged.
std::vector<MiningCandidate> ScoreCandidates(const ag::Matrix& a,
                                             const ag::Matrix& b, int k,
                                             MiningMode mode);

// Throws ArgumentError on an empty gold set.
Prf ComputePrf(const IndexPairs& predicted, const IndexPairs& gold);

struct ThresholdChoice {
  double threshold = 0.0;
  Prf prf;
};

// Sweeps every candidate score as a threshold (keep score >= threshold) and
// returns the highest threshold reaching the best F.
ThresholdChoice BestThreshold(const std::vector<MiningCandidate>& candidates,
                              const IndexPairs& gold);

struct MiningResult {
  Prf prf;
  double threshold = 0.0;
};

// With held_out, the threshold is tuned on candidates whose a-index is even
// and P/R/F are reported on the odd half; otherwise both use everything.
MiningResult MineBitext(const ag::Matrix& a, const ag::Matrix& b,
                        const IndexPairs& gold, int k, MiningMode mode,
                        bool held_out = true);

// Average ranks for ties, Pearson on the ranks. Throws on constant input or
// fewer than 3 items.
double SpearmanRho(const std::vector<double>& x, const std::vector<double>& y);
std::vector<double> AverageRanks(const std::vector<double>& values);

// Samples up to n items without replacement with probability proportional to
// weight; deterministic in seed.
std::vector<size_t> WeightedSample(const std::vector<double>& weights, size_t n,
                                   uint64_t seed);

struct CosineStats {
  double mean = 0.0;
  double stddev = 0.0;
  int count = 0;
};

// Cosine of embedding-layer vectors (first subword of each word) over up to
// max_pairs distinct gold-aligned word pairs drawn by frequency.
CosineStats AlignedWordCosine(const Model& model,
                              const std::vector<ParallelPair>& pairs,
                              int max_pairs = 500, uint64_t seed = 0);

struct WordSample {
  std::string word;
  LangId lang = kPivotLanguage;
  bool operator==(const WordSample&) const = default;
};

// Distinct words drawn by corpus frequency.
std::vector<WordSample> SampleWords(const std::vector<ParallelPair>& pairs,
                                    int n, uint64_t seed);

// Whole-word vocabulary entries, uniformly sampled; the language comes from
// the "l<id>_" word prefix (pivot when absent).
std::vector<WordSample> SampleVocabularyWords(const Tokenizer& tokenizer, int n,
                                              uint64_t seed);

// First two principal components with the first nonzero loading of each
// component made positive. Returns n x 2.
ag::Matrix Pca2(const ag::Matrix& points);

struct ProjectedWord {
  WordSample word;
  double x = 0.0;
  double y = 0.0;
};

std::vector<ProjectedWord> ProjectWords(const Model& model,
                                        const std::vector<WordSample>& words);
void WriteProjection(const std::vector<ProjectedWord>& rows,
                     const std::string& path);

struct EvalOptions {
  int mining_k = 4;
  MiningMode mining_mode = MiningMode::kMargin;
  bool sts = true;
  int aligned_words = 500;
  uint64_t seed = 0;
};

struct EvalReport {
  std::map<LangPair, RetrievalResult> retrieval;
  double retrieval_mean = 0.0;  // macro average over language pairs
  std::map<LangPair, MiningResult> mining_by_pair;
  Prf mining;  // macro average
  bool has_sts = false;
  double sts_spearman = 0.0;
  std::map<LangPair, CosineStats> aligned_cosine_by_pair;
  CosineStats aligned_cosine;
};

// Graded cross-lingual similarity items: the target side of pair i has a
// growing share of its words swapped for words of other targets; the gold
// score is the share kept.
struct StsItem {
  Sentence a;
  Sentence b;
  double gold = 0.0;
};
std::vector<StsItem> MakeStsTask(const std::vector<ParallelPair>& pairs,
                                 uint64_t seed);

EvalReport Evaluate(const Model& model, const Corpus& eval_pairs,
                    const EvalOptions& options = {});

// key<TAB>value lines in a fixed order.
std::string FormatReport(const EvalReport& report);
void WriteReport(const EvalReport& report, const std::string& path);

}  // namespace wacse

#endif  // WACSE_EVALUATION_HPP_
