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

#include "alignment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "error.hpp"
#include "util.hpp"

namespace wacse {
namespace {

constexpr std::string_view kArrow = "\xE2\x86\x92";  // U+2192

const Sentence& SourceSide(const ParallelPair& pair, bool reverse) {
  return reverse ? pair.tgt : pair.src;
}
const Sentence& TargetSide(const ParallelPair& pair, bool reverse) {
  return reverse ? pair.src : pair.tgt;
}

std::string FormatDirection(LangId src, LangId tgt) {
  return std::to_string(src) + std::string(kArrow) + std::to_string(tgt);
}

std::pair<LangId, LangId> ParseDirection(std::string_view text) {
  size_t pos = text.find(kArrow);
  size_t width = kArrow.size();
  if (pos == std::string_view::npos) {
    pos = text.find("->");
    width = 2;
  }
  if (pos == std::string_view::npos) {
    throw ParseError("malformed direction '" + std::string(text) + "'");
  }
  return {static_cast<LangId>(ParseInt(text.substr(0, pos), "direction")),
          static_cast<LangId>(ParseInt(text.substr(pos + width), "direction"))};
}

}  // namespace

std::optional<AlignmentDict::Target> AlignmentDict::Lookup(int src_index) const {
  auto it = links.find(src_index);
  if (it == links.end()) return std::nullopt;
  return it->second;
}

std::vector<ScoredLink> FilterLinks(const std::vector<ScoredLink>& links,
                                    double threshold) {
  std::vector<ScoredLink> out;
  for (const auto& link : links) {
    if (link.score >= threshold) out.push_back(link);
  }
  return out;
}

AlignmentDict FilterByThreshold(const AlignmentDict& dict, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ArgumentError("threshold must be in [0, 1]");
  }
  AlignmentDict out = dict;
  std::erase_if(out.links,
                [&](const auto& kv) { return kv.second.score < threshold; });
  return out;
}

std::vector<ScoredLink> ReverseLinks(const std::vector<ScoredLink>& links) {
  std::vector<ScoredLink> out;
  out.reserve(links.size());
  for (const auto& link : links) out.push_back({link.tgt, link.src, link.score});
  return out;
}

AlignmentDict BuildDict(const std::vector<ScoredLink>& links, LangId src_lang,
                        LangId tgt_lang, AlignDirection which, int src_len,
                        int tgt_len) {
  AlignmentDict dict;
  dict.src_lang = src_lang;
  dict.tgt_lang = tgt_lang;
  dict.which = which;
  for (const auto& link : links) {
    if (link.src < 0 || link.src >= src_len || link.tgt < 0 ||
        link.tgt >= tgt_len) {
      throw ArgumentError("alignment link " + std::to_string(link.src) + "-" +
                          std::to_string(link.tgt) + " out of sentence bounds");
    }
    auto [it, inserted] =
        dict.links.try_emplace(link.src, AlignmentDict::Target{link.tgt, link.score});
    if (!inserted) {
      auto& cur = it->second;
      if (link.score > cur.score ||
          (link.score == cur.score && link.tgt < cur.index)) {
        cur = {link.tgt, link.score};
      }
    }
  }
  return dict;
}

double TranslationTable::Prob(const std::string& src,
                              const std::string& tgt) const {
  auto row = rows_.find(src);
  if (row == rows_.end()) return 0.0;
  auto cell = row->second.find(tgt);
  return cell == row->second.end() ? 0.0 : cell->second;
}

bool TranslationTable::HasSource(const std::string& src) const {
  return rows_.count(src) != 0;
}

double TranslationTable::RowSum(const std::string& src) const {
  auto row = rows_.find(src);
  if (row == rows_.end()) return 0.0;
  double sum = 0.0;
  for (const auto& [tgt, p] : row->second) sum += p;
  return sum;
}

Ibm1Model TrainIbm1(const std::vector<ParallelPair>& pairs, int iterations,
                    bool reverse) {
  if (pairs.empty()) throw ArgumentError("TrainIbm1: empty corpus");
  if (iterations < 1) throw ArgumentError("TrainIbm1: iterations must be >= 1");

  // Intern words and give every co-occurring (e, f) a slot.
  std::unordered_map<std::string, int> src_ids, tgt_ids;
  std::vector<std::string> src_words, tgt_words;
  auto intern = [](auto& ids, auto& words, const std::string& w) {
    auto [it, fresh] = ids.try_emplace(w, static_cast<int>(words.size()));
    if (fresh) words.push_back(w);
    return it->second;
  };
  struct Prepared {
    std::vector<int> src;
    std::vector<int> tgt;
    std::vector<int> slots;  // src.size() x tgt.size(), row-major
  };
  std::vector<Prepared> data;
  data.reserve(pairs.size());
  std::unordered_map<uint64_t, int> slot_of;
  std::vector<int> slot_src;
  for (const auto& pair : pairs) {
    Prepared p;
    for (const auto& w : SourceSide(pair, reverse).words) {
      p.src.push_back(intern(src_ids, src_words, w));
    }
    for (const auto& w : TargetSide(pair, reverse).words) {
      p.tgt.push_back(intern(tgt_ids, tgt_words, w));
    }
    if (p.src.empty() || p.tgt.empty()) {
      throw ArgumentError("TrainIbm1: pair " + std::to_string(pair.pair_id) +
                          " has an empty side");
    }
    for (int e : p.src) {
      for (int f : p.tgt) {
        const uint64_t key = (static_cast<uint64_t>(e) << 32) | static_cast<uint32_t>(f);
        auto [it, fresh] = slot_of.try_emplace(key, static_cast<int>(slot_src.size()));
        if (fresh) slot_src.push_back(e);
        p.slots.push_back(it->second);
      }
    }
    data.push_back(std::move(p));
  }

  // Uniform start over the co-occurring targets of each source word.
  std::vector<double> row_size(src_words.size(), 0.0);
  for (int e : slot_src) row_size[e] += 1.0;
  std::vector<double> t(slot_src.size());
  for (size_t s = 0; s < t.size(); ++s) t[s] = 1.0 / row_size[slot_src[s]];

  auto log_likelihood = [&](const std::vector<double>& table) {
    double ll = 0.0;
    for (const auto& p : data) {
      const size_t nf = p.tgt.size();
      for (size_t j = 0; j < nf; ++j) {
        double denom = 0.0;
        for (size_t i = 0; i < p.src.size(); ++i) denom += table[p.slots[i * nf + j]];
        ll += std::log(denom / static_cast<double>(p.src.size()));
      }
    }
    return ll;
  };

  Ibm1Model model;
  std::vector<double> counts(t.size());
  std::vector<double> totals(src_words.size());
  for (int it = 0; it < iterations; ++it) {
    std::fill(counts.begin(), counts.end(), 0.0);
    std::fill(totals.begin(), totals.end(), 0.0);
    for (const auto& p : data) {
      const size_t nf = p.tgt.size();
      for (size_t j = 0; j < nf; ++j) {
        double denom = 0.0;
        for (size_t i = 0; i < p.src.size(); ++i) denom += t[p.slots[i * nf + j]];
        for (size_t i = 0; i < p.src.size(); ++i) {
          const int slot = p.slots[i * nf + j];
          const double c = t[slot] / denom;
          counts[slot] += c;
          totals[p.src[i]] += c;
        }
      }
    }
    for (size_t s = 0; s < t.size(); ++s) t[s] = counts[s] / totals[slot_src[s]];
    model.log_likelihood.push_back(log_likelihood(t));
  }

  auto& rows = model.table.mutable_rows();
  for (const auto& [key, slot] : slot_of) {
    const int e = static_cast<int>(key >> 32);
    const int f = static_cast<int>(key & 0xffffffffULL);
    rows[src_words[e]][tgt_words[f]] = t[slot];
  }
  return model;
}

std::vector<ScoredLink> AlignIbm1(const TranslationTable& table,
                                  const ParallelPair& pair, bool reverse) {
  const auto& src = SourceSide(pair, reverse).words;
  const auto& tgt = TargetSide(pair, reverse).words;
  std::vector<ScoredLink> links;
  std::vector<double> probs(tgt.size());
  for (size_t i = 0; i < src.size(); ++i) {
    if (!table.HasSource(src[i])) continue;
    double sum = 0.0;
    for (size_t j = 0; j < tgt.size(); ++j) {
      probs[j] = table.Prob(src[i], tgt[j]);
      sum += probs[j];
    }
    if (!(sum > 0.0)) continue;
    size_t best = 0;
    for (size_t j = 1; j < tgt.size(); ++j) {
      if (probs[j] > probs[best]) best = j;
    }
    links.push_back({static_cast<int>(i), static_cast<int>(best),
                     std::min(1.0, probs[best] / sum)});
  }
  return links;
}

Ibm1Provider MakeIbm1Provider(const std::vector<ParallelPair>& pairs,
                              int iterations) {
  Ibm1Provider provider;
  provider.forward = TrainIbm1(pairs, iterations, false).table;
  provider.backward = TrainIbm1(pairs, iterations, true).table;
  return provider;
}

RawAlignment ProviderLinks(const ParallelPair& pair,
                           const AlignmentProvider& provider) {
  RawAlignment raw;
  if (std::holds_alternative<GoldProvider>(provider)) {
    if (pair.gold_links.empty()) {
      throw ArgumentError("pair " + std::to_string(pair.pair_id) +
                          " has no gold links");
    }
    raw.forward = pair.gold_links;
    raw.backward = ReverseLinks(pair.gold_links);
  } else if (const auto* ibm = std::get_if<Ibm1Provider>(&provider)) {
    raw.forward = AlignIbm1(ibm->forward, pair, false);
    raw.backward = AlignIbm1(ibm->backward, pair, true);
  } else {
    const auto& file = std::get<FileProvider>(provider);
    auto it = file.alignments.find(pair.pair_id);
    if (it == file.alignments.end()) return raw;
    bool have_backward = false;
    for (const auto& directed : it->second) {
      if (directed.src_lang == pair.src.lang && directed.tgt_lang == pair.tgt.lang) {
        raw.forward = directed.links;
      } else if (directed.src_lang == pair.tgt.lang &&
                 directed.tgt_lang == pair.src.lang) {
        raw.backward = directed.links;
        have_backward = true;
      }
    }
    if (!have_backward) raw.backward = ReverseLinks(raw.forward);
  }
  return raw;
}

BidirectionalDict WordAlign(const ParallelPair& pair,
                            const AlignmentProvider& provider,
                            double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ArgumentError("threshold must be in [0, 1]");
  }
  const RawAlignment raw = ProviderLinks(pair, provider);
  const int ns = static_cast<int>(pair.src.size());
  const int nt = static_cast<int>(pair.tgt.size());
  BidirectionalDict dicts;
  dicts.forward = BuildDict(FilterLinks(raw.forward, threshold), pair.src.lang,
                            pair.tgt.lang, AlignDirection::kForward, ns, nt);
  dicts.backward = BuildDict(FilterLinks(raw.backward, threshold), pair.tgt.lang,
                             pair.src.lang, AlignDirection::kBackward, nt, ns);
  return dicts;
}

AlignmentMap AlignCorpus(const std::vector<ParallelPair>& pairs,
                         const AlignmentProvider& provider, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw ArgumentError("threshold must be in [0, 1]");
  }
  AlignmentMap out;
  for (const auto& pair : pairs) {
    const RawAlignment raw = ProviderLinks(pair, provider);
    auto& entry = out[pair.pair_id];
    entry.push_back({pair.src.lang, pair.tgt.lang, FilterLinks(raw.forward, threshold)});
    // Gold links are symmetric; only learned aligners carry a separate
    // reverse direction.
    bool explicit_backward = std::holds_alternative<Ibm1Provider>(provider);
    if (const auto* file = std::get_if<FileProvider>(&provider)) {
      auto it = file->alignments.find(pair.pair_id);
      explicit_backward = it != file->alignments.end() && it->second.size() > 1;
    }
    if (explicit_backward) {
      entry.push_back(
          {pair.tgt.lang, pair.src.lang, FilterLinks(raw.backward, threshold)});
    }
  }
  return out;
}

AlignmentMap LoadAlignments(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open alignment file " + path);
  AlignmentMap out;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      std::vector<std::string_view> fields;
      if (line.find('\t') != std::string::npos) {
        fields = Split(line, '\t');
      } else {
        // Space-separated variant: id, direction, then links.
        auto parts = SplitWhitespace(line);
        if (parts.size() < 2) throw ParseError("expected at least 2 fields");
        fields = {parts[0], parts[1]};
        const size_t rest = static_cast<size_t>(parts[1].data() + parts[1].size() - line.data());
        fields.push_back(std::string_view(line).substr(rest));
      }
      if (fields.size() == 2) fields.push_back(std::string_view());
      if (fields.size() != 3) {
        throw ParseError("expected 3 tab-separated fields, found " +
                         std::to_string(fields.size()));
      }
      DirectedLinks directed;
      const int64_t pair_id = ParseInt(fields[0], "pair_id");
      std::tie(directed.src_lang, directed.tgt_lang) = ParseDirection(fields[1]);
      directed.links = ParseLinks(fields[2]);
      out[pair_id].push_back(std::move(directed));
    } catch (const Error& e) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void SaveAlignments(const AlignmentMap& alignments, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NotFoundError("cannot write alignment file " + path);
  for (const auto& [pair_id, entries] : alignments) {
    for (const auto& directed : entries) {
      out << pair_id << '\t' << FormatDirection(directed.src_lang, directed.tgt_lang)
          << '\t' << FormatLinks(directed.links, ' ') << '\n';
    }
  }
  if (!out) throw RuntimeError("write failed for " + path);
}

}  // namespace wacse
