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

#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <unordered_set>

#include "error.hpp"
#include "util.hpp"

namespace wacse {
namespace {

constexpr char kLetters[] = "abcdefghijklmnopqrstuvwxyz";

// Two surface forms per concept (single word, second word of a phrase),
// unique within the language.
struct Lexicon {
  std::vector<std::string> primary;
  std::vector<std::string> secondary;
};

Lexicon BuildLexicon(uint64_t cipher_seed, LangId lang, int vocab_size) {
  Rng rng(DeriveSeed(cipher_seed, static_cast<uint64_t>(lang) + 1000));
  const std::string prefix = "l" + std::to_string(lang) + "_";
  std::unordered_set<std::string> used;
  auto fresh = [&] {
    while (true) {
      const int len = 2 + static_cast<int>(rng.Below(6));
      std::string word = prefix;
      for (int i = 0; i < len; ++i) word += kLetters[rng.Below(26)];
      if (used.insert(word).second) return word;
    }
  };
  Lexicon lex;
  lex.primary.reserve(vocab_size);
  lex.secondary.reserve(vocab_size);
  for (int c = 0; c < vocab_size; ++c) lex.primary.push_back(fresh());
  for (int c = 0; c < vocab_size; ++c) lex.secondary.push_back(fresh());
  return lex;
}

// Weighted sampling without replacement (exponential keys).
std::vector<int> SampleConcepts(Rng& rng, const std::vector<double>& weights,
                                int count) {
  std::vector<std::pair<double, int>> keys;
  keys.reserve(weights.size());
  for (size_t c = 0; c < weights.size(); ++c) {
    double u = rng.Uniform();
    while (u <= 0.0) u = rng.Uniform();
    keys.emplace_back(std::log(u) / weights[c], static_cast<int>(c));
  }
  std::partial_sort(keys.begin(), keys.begin() + count, keys.end(),
                    [](const auto& a, const auto& b) {
                      return a.first > b.first ||
                             (a.first == b.first && a.second < b.second);
                    });
  std::vector<int> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) out.push_back(keys[i].second);
  return out;
}

void CheckWord(const std::string& word) {
  if (word.empty() || word.find_first_of(" \t\r\n") != std::string::npos) {
    throw ArgumentError("word '" + word +
                        "' is empty or contains whitespace and cannot be saved");
  }
}

}  // namespace

void CorpusConfig::Validate() const {
  if (languages.empty()) throw ConfigError("languages: at least one required");
  std::set<LangId> seen;
  for (size_t i = 0; i < languages.size(); ++i) {
    const auto& spec = languages[i];
    const std::string field = "languages[" + std::to_string(i) + "]";
    if (spec.lang <= kPivotLanguage) {
      throw ConfigError(field + ".lang must be > 0 (0 is the pivot)");
    }
    if (!seen.insert(spec.lang).second) {
      throw ConfigError(field + ".lang is duplicated");
    }
    if (spec.vocab_size < 10) throw ConfigError(field + ".vocab_size must be >= 10");
    if (spec.pair_count < 1) throw ConfigError(field + ".pair_count must be >= 1");
    if (max_words > spec.vocab_size) {
      throw ConfigError("max_words exceeds " + field + ".vocab_size");
    }
  }
  if (!(reorder_prob >= 0.0 && reorder_prob <= 1.0)) {
    throw ConfigError("reorder_prob must be in [0, 1]");
  }
  if (!(fertility_prob >= 0.0 && fertility_prob <= 1.0)) {
    throw ConfigError("fertility_prob must be in [0, 1]");
  }
  if (min_words < 1) throw ConfigError("min_words must be >= 1");
  if (max_words < min_words) throw ConfigError("max_words must be >= min_words");
  if (!(zipf_exponent >= 0.0)) throw ConfigError("zipf_exponent must be >= 0");
}

int CorpusConfig::PivotVocabSize() const {
  int size = 0;
  for (const auto& spec : languages) size = std::max(size, spec.vocab_size);
  return size;
}

std::string ConceptWord(const CorpusConfig& config, LangId lang, int concept_id,
                        int part) {
  int vocab = config.PivotVocabSize();
  if (lang != kPivotLanguage) {
    auto it = std::find_if(config.languages.begin(), config.languages.end(),
                           [&](const auto& s) { return s.lang == lang; });
    if (it == config.languages.end()) {
      throw ArgumentError("unknown language " + std::to_string(lang));
    }
    vocab = it->vocab_size;
  }
  if (concept_id < 0 || concept_id >= vocab) {
    throw ArgumentError("concept id out of range");
  }
  Lexicon lex = BuildLexicon(config.cipher_seed, lang, vocab);
  return part == 0 ? lex.primary[concept_id] : lex.secondary[concept_id];
}

Corpus GenerateCorpus(const CorpusConfig& config, uint64_t seed) {
  config.Validate();
  const Lexicon pivot =
      BuildLexicon(config.cipher_seed, kPivotLanguage, config.PivotVocabSize());

  std::vector<LanguageSpec> specs = config.languages;
  std::sort(specs.begin(), specs.end(),
            [](const auto& a, const auto& b) { return a.lang < b.lang; });

  Corpus corpus;
  int64_t next_id = 0;
  for (const auto& spec : specs) {
    const Lexicon lex = BuildLexicon(config.cipher_seed, spec.lang, spec.vocab_size);
    std::vector<double> weights(spec.vocab_size);
    for (int c = 0; c < spec.vocab_size; ++c) {
      weights[c] = std::pow(static_cast<double>(c + 1), -config.zipf_exponent);
    }
    Rng rng(DeriveSeed(seed, static_cast<uint64_t>(spec.lang)));
    auto& pairs = corpus[{kPivotLanguage, spec.lang}];
    pairs.reserve(spec.pair_count);

    for (int n = 0; n < spec.pair_count; ++n) {
      const int span = config.max_words - config.min_words + 1;
      const int length = config.min_words + static_cast<int>(rng.Below(span));
      std::vector<int> concepts = SampleConcepts(rng, weights, length);
      rng.Shuffle(concepts);

      struct Unit {
        int source_pos;
        bool phrase;
      };
      std::vector<Unit> units;
      units.reserve(length);
      for (int p = 0; p < length; ++p) {
        units.push_back({p, rng.Bernoulli(config.fertility_prob)});
      }
      for (int i = 0; i + 1 < length;) {
        if (rng.Bernoulli(config.reorder_prob)) {
          std::swap(units[i], units[i + 1]);
          i += 2;
        } else {
          ++i;
        }
      }

      ParallelPair pair;
      pair.pair_id = next_id++;
      pair.src.lang = kPivotLanguage;
      pair.tgt.lang = spec.lang;
      for (int c : concepts) pair.src.words.push_back(pivot.primary[c]);
      for (const auto& unit : units) {
        const int c = concepts[unit.source_pos];
        const int t = static_cast<int>(pair.tgt.words.size());
        pair.tgt.words.push_back(lex.primary[c]);
        pair.gold_links.push_back({unit.source_pos, t, 1.0});
        if (unit.phrase) {
          pair.tgt.words.push_back(lex.secondary[c]);
          pair.gold_links.push_back({unit.source_pos, t + 1, 1.0});
        }
      }
      std::sort(pair.gold_links.begin(), pair.gold_links.end(),
                [](const auto& a, const auto& b) {
                  return a.src < b.src || (a.src == b.src && a.tgt < b.tgt);
                });
      pairs.push_back(std::move(pair));
    }
  }
  return corpus;
}

CorpusSplit SplitCorpus(const std::vector<ParallelPair>& pairs,
                        double dev_fraction) {
  if (!(dev_fraction > 0.0 && dev_fraction < 1.0)) {
    throw ArgumentError("dev_fraction must be in (0, 1)");
  }
  const size_t n = pairs.size();
  const auto dev_count =
      static_cast<size_t>(std::llround(static_cast<double>(n) * dev_fraction));
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](size_t i) {
    return std::make_pair(Mix64(static_cast<uint64_t>(pairs[i].pair_id)),
                          pairs[i].pair_id);
  };
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return key(a) < key(b); });
  std::vector<bool> is_dev(n, false);
  for (size_t i = 0; i < dev_count; ++i) is_dev[order[i]] = true;

  CorpusSplit split;
  for (size_t i = 0; i < n; ++i) {
    (is_dev[i] ? split.dev : split.train).push_back(pairs[i]);
  }
  return split;
}

std::vector<ParallelPair> Flatten(const Corpus& corpus) {
  std::vector<ParallelPair> out;
  for (const auto& [langs, pairs] : corpus) {
    out.insert(out.end(), pairs.begin(), pairs.end());
  }
  return out;
}

Corpus GroupByLanguagePair(const std::vector<ParallelPair>& pairs) {
  Corpus out;
  for (const auto& pair : pairs) out[pair.langs()].push_back(pair);
  return out;
}

std::string FormatLinks(const std::vector<ScoredLink>& links, char sep) {
  std::string out;
  for (size_t i = 0; i < links.size(); ++i) {
    if (i) out += sep;
    out += std::to_string(links[i].src) + "-" + std::to_string(links[i].tgt) +
           ":" + FormatDouble(links[i].score);
  }
  return out;
}

std::vector<ScoredLink> ParseLinks(std::string_view text) {
  std::vector<ScoredLink> links;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && (text[i] == ',' || text[i] == ' ')) ++i;
    const size_t start = i;
    while (i < text.size() && text[i] != ',' && text[i] != ' ') ++i;
    if (i == start) break;
    const std::string_view item = text.substr(start, i - start);
    const size_t dash = item.find('-');
    const size_t colon = item.find(':');
    if (dash == std::string_view::npos || colon == std::string_view::npos ||
        colon < dash) {
      throw ParseError("malformed link '" + std::string(item) +
                       "' (expected i-j:score)");
    }
    ScoredLink link;
    link.src = static_cast<int>(ParseInt(item.substr(0, dash), "link source"));
    link.tgt = static_cast<int>(
        ParseInt(item.substr(dash + 1, colon - dash - 1), "link target"));
    link.score = ParseDouble(item.substr(colon + 1), "link score");
    if (link.src < 0 || link.tgt < 0) {
      throw ParseError("negative index in link '" + std::string(item) + "'");
    }
    if (!(link.score >= 0.0 && link.score <= 1.0)) {
      throw ParseError("link score outside [0, 1] in '" + std::string(item) + "'");
    }
    links.push_back(link);
  }
  return links;
}

std::string FormatParallelRecord(const ParallelPair& pair) {
  for (const auto& w : pair.src.words) CheckWord(w);
  for (const auto& w : pair.tgt.words) CheckWord(w);
  std::string line = std::to_string(pair.pair_id);
  line += '\t' + std::to_string(pair.src.lang);
  line += '\t' + std::to_string(pair.tgt.lang);
  line += '\t' + Join(pair.src.words, " ");
  line += '\t' + Join(pair.tgt.words, " ");
  line += '\t' + FormatLinks(pair.gold_links, ',');
  return line;
}

ParallelPair ParseParallelRecord(const std::string& line) {
  const auto fields = Split(line, '\t');
  if (fields.size() != 6) {
    throw ParseError("expected 6 tab-separated fields, found " +
                     std::to_string(fields.size()));
  }
  ParallelPair pair;
  pair.pair_id = ParseInt(fields[0], "pair_id");
  pair.src.lang = static_cast<LangId>(ParseInt(fields[1], "src_lang"));
  pair.tgt.lang = static_cast<LangId>(ParseInt(fields[2], "tgt_lang"));
  for (auto w : SplitWhitespace(fields[3])) pair.src.words.emplace_back(w);
  for (auto w : SplitWhitespace(fields[4])) pair.tgt.words.emplace_back(w);
  if (pair.src.words.empty() || pair.tgt.words.empty()) {
    throw ParseError("empty sentence");
  }
  pair.gold_links = ParseLinks(fields[5]);
  std::set<std::pair<int, int>> seen;
  for (const auto& link : pair.gold_links) {
    if (link.src >= static_cast<int>(pair.src.size()) ||
        link.tgt >= static_cast<int>(pair.tgt.size())) {
      throw ParseError("link " + std::to_string(link.src) + "-" +
                       std::to_string(link.tgt) + " out of sentence bounds");
    }
    if (!seen.insert({link.src, link.tgt}).second) {
      throw ParseError("duplicate link " + std::to_string(link.src) + "-" +
                       std::to_string(link.tgt));
    }
  }
  return pair;
}

std::vector<ParallelPair> LoadParallel(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open corpus file " + path);
  std::vector<ParallelPair> pairs;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      pairs.push_back(ParseParallelRecord(line));
    } catch (const Error& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return pairs;
}

void SaveParallel(const std::vector<ParallelPair>& pairs,
                  const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write corpus file " + path);
  for (const auto& pair : pairs) out << FormatParallelRecord(pair) << '\n';
  if (!out) throw RuntimeError("write failed for " + path);
}

}  // namespace wacse
