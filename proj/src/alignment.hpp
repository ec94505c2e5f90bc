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

#ifndef WACSE_ALIGNMENT_HPP_
#define WACSE_ALIGNMENT_HPP_

// Bidirectional word-alignment dictionaries and their providers: gold links,
// an IBM Model 1 EM aligner, or externally computed alignment files.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <variant>
#include <vector>

#include "corpus.hpp"

namespace wacse {

inline constexpr double kDefaultAlignmentThreshold = 0.9;

enum class AlignDirection { kForward, kBackward };  // X->Y, Y->X

// One target word (and score) per source word index.
struct AlignmentDict {
  struct Target {
    int index = 0;
    double score = 1.0;
    bool operator==(const Target&) const = default;
  };

  LangId src_lang = 0;
  LangId tgt_lang = 0;
  AlignDirection which = AlignDirection::kForward;
  std::map<int, Target> links;

  std::optional<Target> Lookup(int src_index) const;
  size_t size() const { return links.size(); }
  bool empty() const { return links.empty(); }
  bool operator==(const AlignmentDict&) const = default;
};

struct BidirectionalDict {
  AlignmentDict forward;
  AlignmentDict backward;
};

// Keeps links whose score is >= threshold.
std::vector<ScoredLink> FilterLinks(const std::vector<ScoredLink>& links,
                                    double threshold);
AlignmentDict FilterByThreshold(const AlignmentDict& dict, double threshold);

// Swaps src and tgt of every link.
std::vector<ScoredLink> ReverseLinks(const std::vector<ScoredLink>& links);

// Collapses links to one target per source: highest score wins, then the
// lowest target index. Throws ArgumentError on out-of-bounds indices.
AlignmentDict BuildDict(const std::vector<ScoredLink>& links, LangId src_lang,
                        LangId tgt_lang, AlignDirection which, int src_len,
                        int tgt_len);

// t(tgt word | src word), rows normalized.
class TranslationTable {
 public:
  double Prob(const std::string& src, const std::string& tgt) const;
  bool HasSource(const std::string& src) const;
  // Sum of the row for `src` (1 for known words).
  double RowSum(const std::string& src) const;
  size_t source_count() const { return rows_.size(); }

  const std::unordered_map<std::string, std::unordered_map<std::string, double>>&
  rows() const {
    return rows_;
  }
  std::unordered_map<std::string, std::unordered_map<std::string, double>>&
  mutable_rows() {
    return rows_;
  }

 private:
  std::unordered_map<std::string, std::unordered_map<std::string, double>> rows_;
};

struct Ibm1Model {
  TranslationTable table;
  // Corpus log-likelihood under the table after each iteration.
  std::vector<double> log_likelihood;
};

// EM for IBM Model 1 (no null word). With reverse=true the target side of
// each pair plays the source role.
Ibm1Model TrainIbm1(const std::vector<ParallelPair>& pairs, int iterations,
                    bool reverse = false);

// Per source word, the target word with the highest posterior
// t(f_j|e)/sum_j' t(f_j'|e); ties go to the lowest index. Unknown words
// yield no link. With reverse=true the target side is treated as source.
std::vector<ScoredLink> AlignIbm1(const TranslationTable& table,
                                  const ParallelPair& pair,
                                  bool reverse = false);

struct DirectedLinks {
  LangId src_lang = 0;
  LangId tgt_lang = 0;
  std::vector<ScoredLink> links;
  bool operator==(const DirectedLinks&) const = default;
};

using AlignmentMap = std::map<int64_t, std::vector<DirectedLinks>>;

AlignmentMap LoadAlignments(const std::string& path);
void SaveAlignments(const AlignmentMap& alignments, const std::string& path);

struct GoldProvider {};
struct Ibm1Provider {
  TranslationTable forward;
  TranslationTable backward;
};
struct FileProvider {
  AlignmentMap alignments;
};
using AlignmentProvider = std::variant<GoldProvider, Ibm1Provider, FileProvider>;

// Trains both directions with the same number of iterations.
Ibm1Provider MakeIbm1Provider(const std::vector<ParallelPair>& pairs,
                              int iterations);

// Raw scored links in each direction, before filtering. A provider that
// only knows X->Y links (gold, or files without the reverse record) yields
// the reversed links for Y->X.
struct RawAlignment {
  std::vector<ScoredLink> forward;
  std::vector<ScoredLink> backward;
};
RawAlignment ProviderLinks(const ParallelPair& pair,
                           const AlignmentProvider& provider);

// Raw links -> threshold filter -> dictionaries.
BidirectionalDict WordAlign(const ParallelPair& pair,
                            const AlignmentProvider& provider,
                            double threshold = 0.0);

// Raw links of every pair, for the alignment file.
AlignmentMap AlignCorpus(const std::vector<ParallelPair>& pairs,
                         const AlignmentProvider& provider, double threshold);

}  // namespace wacse

#endif  // WACSE_ALIGNMENT_HPP_
