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

#ifndef WACSE_TOKENIZER_HPP_
#define WACSE_TOKENIZER_HPP_

#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace wacse {

// Half-open token range [start, end) covering one word.
struct WordSpan {
  int start = 0;
  int end = 0;

  int width() const { return end - start; }
  bool operator==(const WordSpan&) const = default;
};

struct Tokenized {
  LangId lang = kPivotLanguage;
  std::vector<int> ids;  // ids[0] is cls
  std::vector<WordSpan> spans;

  int word_count() const { return static_cast<int>(spans.size()); }
};

// Word-level vocabulary with a deterministic two-way split for long words:
// a word of more than split_chars bytes becomes its first half plus "##"
// and the remainder.
class Tokenizer {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kMask = 3;
  static constexpr int kSpecialCount = 4;

  // `tokens` excludes the specials; order defines ids from kSpecialCount on.
  Tokenizer(std::vector<std::string> tokens, int split_chars);

  // Vocabulary of every subword in the corpus, sorted.
  static Tokenizer Build(const std::vector<ParallelPair>& pairs, int split_chars);

  std::vector<std::string> SplitWord(std::string_view word) const;
  int TokenId(std::string_view token) const;
  const std::string& TokenText(int id) const { return vocab_.at(id); }

  // Prepends cls and drops trailing whole words that would exceed
  // max_seq_len. Throws ArgumentError if no word fits.
  Tokenized Tokenize(const Sentence& sentence, int max_seq_len) const;

  int vocab_size() const { return static_cast<int>(vocab_.size()); }
  int split_chars() const { return split_chars_; }
  // Full id -> text table, specials included.
  const std::vector<std::string>& vocab() const { return vocab_; }

 private:
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, int> ids_;
  int split_chars_;
};

}  // namespace wacse

#endif  // WACSE_TOKENIZER_HPP_
