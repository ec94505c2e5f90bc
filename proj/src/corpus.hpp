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

#ifndef WACSE_CORPUS_HPP_
#define WACSE_CORPUS_HPP_

// Synthetic multilingual parallel corpora with gold word alignments, and the
// tab-separated parallel-corpus file format.
//
// Every language is a word-level cipher of one shared latent vocabulary. The
// pivot language (id 0) sits on the source side of every pair; target sides
// may locally swap adjacent words and render a concept as a two-word phrase.
// Word strings carry an "l<id>_" prefix, so surface forms never collide
// across languages.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace wacse {

using LangId = int;
using LangPair = std::pair<LangId, LangId>;

inline constexpr LangId kPivotLanguage = 0;

struct Sentence {
  LangId lang = kPivotLanguage;
  std::vector<std::string> words;

  size_t size() const { return words.size(); }
  bool operator==(const Sentence&) const = default;
};

// A scored link between word src of one sentence and word tgt of another.
struct ScoredLink {
  int src = 0;
  int tgt = 0;
  double score = 1.0;

  bool operator==(const ScoredLink&) const = default;
};

struct ParallelPair {
  int64_t pair_id = 0;
  Sentence src;
  Sentence tgt;
  // Empty when the pair carries no gold alignment.
  std::vector<ScoredLink> gold_links;

  LangPair langs() const { return {src.lang, tgt.lang}; }
  bool operator==(const ParallelPair&) const = default;
};

struct LanguageSpec {
  LangId lang = 1;
  int vocab_size = 100;
  int pair_count = 1000;
};

struct CorpusConfig {
  // Non-pivot languages; each yields the pair (0, lang).
  std::vector<LanguageSpec> languages;
  uint64_t cipher_seed = 1;
  double reorder_prob = 0.0;
  double fertility_prob = 0.0;
  int min_words = 3;
  int max_words = 10;
  // Concept frequencies follow rank^-zipf_exponent.
  double zipf_exponent = 1.0;

  // Throws ConfigError naming the offending field.
  void Validate() const;
  int PivotVocabSize() const;
};

using Corpus = std::map<LangPair, std::vector<ParallelPair>>;

// Pure function of (config, seed). Lexicons depend only on cipher_seed, so
// corpora drawn with different seeds share word forms.
Corpus GenerateCorpus(const CorpusConfig& config, uint64_t seed);

// Surface form of a latent concept; part 1 is the second word of a
// two-word phrase.
std::string ConceptWord(const CorpusConfig& config, LangId lang, int concept_id,
                        int part = 0);

struct CorpusSplit {
  std::vector<ParallelPair> train;
  std::vector<ParallelPair> dev;
};

// Sends the round(n * dev_fraction) pairs with the smallest pair_id hashes to
// dev; both halves keep input order.
CorpusSplit SplitCorpus(const std::vector<ParallelPair>& pairs,
                        double dev_fraction);

std::vector<ParallelPair> Flatten(const Corpus& corpus);
Corpus GroupByLanguagePair(const std::vector<ParallelPair>& pairs);

std::vector<ParallelPair> LoadParallel(const std::string& path);
void SaveParallel(const std::vector<ParallelPair>& pairs,
                  const std::string& path);

// Single-record codec behind the file functions.
std::string FormatParallelRecord(const ParallelPair& pair);
ParallelPair ParseParallelRecord(const std::string& line);

// "i-j:score" items joined by `sep`.
std::string FormatLinks(const std::vector<ScoredLink>& links, char sep);
std::vector<ScoredLink> ParseLinks(std::string_view text);

}  // namespace wacse

#endif  // WACSE_CORPUS_HPP_
