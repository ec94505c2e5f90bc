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

#include "tokenizer.hpp"

#include <algorithm>
#include <set>

#include "error.hpp"

namespace wacse {
namespace {

const char* const kSpecialNames[Tokenizer::kSpecialCount] = {"[PAD]", "[UNK]",
                                                            "[CLS]", "[MASK]"};

bool IsContinuationByte(char c) {
  return (static_cast<unsigned char>(c) & 0xC0) == 0x80;
}

}  // namespace

Tokenizer::Tokenizer(std::vector<std::string> tokens, int split_chars)
    : split_chars_(split_chars) {
  if (split_chars < 2) throw ConfigError("split_chars must be >= 2");
  vocab_.assign(std::begin(kSpecialNames), std::end(kSpecialNames));
  for (auto& t : tokens) vocab_.push_back(std::move(t));
  for (size_t i = 0; i < vocab_.size(); ++i) {
    if (!ids_.emplace(vocab_[i], static_cast<int>(i)).second) {
      throw ArgumentError("duplicate token '" + vocab_[i] + "'");
    }
  }
}

Tokenizer Tokenizer::Build(const std::vector<ParallelPair>& pairs,
                           int split_chars) {
  Tokenizer probe({}, split_chars);
  std::set<std::string> tokens;
  auto add = [&](const Sentence& s) {
    for (const auto& w : s.words) {
      for (auto& t : probe.SplitWord(w)) tokens.insert(std::move(t));
    }
  };
  for (const auto& pair : pairs) {
    add(pair.src);
    add(pair.tgt);
  }
  for (const char* name : kSpecialNames) tokens.erase(name);
  return Tokenizer(std::vector<std::string>(tokens.begin(), tokens.end()),
                   split_chars);
}

std::vector<std::string> Tokenizer::SplitWord(std::string_view word) const {
  if (static_cast<int>(word.size()) <= split_chars_) return {std::string(word)};
  size_t cut = (word.size() + 1) / 2;
  while (cut < word.size() && IsContinuationByte(word[cut])) ++cut;
  if (cut >= word.size()) return {std::string(word)};
  return {std::string(word.substr(0, cut)), "##" + std::string(word.substr(cut))};
}

int Tokenizer::TokenId(std::string_view token) const {
  auto it = ids_.find(std::string(token));
  return it == ids_.end() ? kUnk : it->second;
}

Tokenized Tokenizer::Tokenize(const Sentence& sentence, int max_seq_len) const {
  Tokenized out;
  out.lang = sentence.lang;
  out.ids.push_back(kCls);
  for (const auto& word : sentence.words) {
    const auto pieces = SplitWord(word);
    if (static_cast<int>(out.ids.size() + pieces.size()) > max_seq_len) break;
    WordSpan span{static_cast<int>(out.ids.size()), 0};
    for (const auto& p : pieces) out.ids.push_back(TokenId(p));
    span.end = static_cast<int>(out.ids.size());
    out.spans.push_back(span);
  }
  if (out.spans.empty()) {
    throw ArgumentError("sentence is empty after truncation to " +
                        std::to_string(max_seq_len) + " tokens");
  }
  return out;
}

}  // namespace wacse
