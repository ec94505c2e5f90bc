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

#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "error.hpp"
#include "test_helpers.hpp"

using namespace wacse;

namespace {

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

CorpusConfig TwoLanguages(int a, int b) {
  CorpusConfig c;
  c.languages = {{1, 50, a}, {2, 40, b}};
  return c;
}

TEST(GenerateCorpus, PureCipherGivesIdentityLinks) {
  const Corpus corpus = GenerateCorpus(TwoLanguages(30, 10), 3);
  for (const auto& [langs, pairs] : corpus) {
    for (const auto& p : pairs) {
      ASSERT_EQ(p.src.size(), p.tgt.size());
      ASSERT_EQ(p.gold_links.size(), p.src.size());
      for (size_t i = 0; i < p.gold_links.size(); ++i) {
        EXPECT_EQ(p.gold_links[i], (ScoredLink{static_cast<int>(i), static_cast<int>(i), 1.0}));
      }
    }
  }
}

TEST(GenerateCorpus, CountsEchoConfig) {
  const Corpus corpus = GenerateCorpus(TwoLanguages(1000, 50), 1);
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus.at({0, 1}).size(), 1000u);
  EXPECT_EQ(corpus.at({0, 2}).size(), 50u);
}

TEST(GenerateCorpus, FullFertilityDoublesTarget) {
  CorpusConfig c;
  c.languages = {{1, 20, 25}};
  c.fertility_prob = 1.0;
  c.min_words = 3;
  c.max_words = 3;
  const Corpus corpus = GenerateCorpus(c, 9);
  for (const auto& p : corpus.at({0, 1})) {
    ASSERT_EQ(p.src.size(), 3u);
    ASSERT_EQ(p.tgt.size(), 6u);
    ASSERT_EQ(p.gold_links.size(), 6u);
    // Enumerated by hand: word i links to target 2i and 2i+1.
    for (int i = 0; i < 3; ++i) {
      EXPECT_EQ(p.gold_links[2 * i], (ScoredLink{i, 2 * i, 1.0}));
      EXPECT_EQ(p.gold_links[2 * i + 1], (ScoredLink{i, 2 * i + 1, 1.0}));
      EXPECT_NE(p.tgt.words[2 * i], p.tgt.words[2 * i + 1]);
    }
  }
}

TEST(GenerateCorpus, ReorderingSwapsNeighbours) {
  CorpusConfig c;
  c.languages = {{1, 30, 200}};
  c.reorder_prob = 0.5;
  int swapped = 0;
  const Corpus corpus = GenerateCorpus(c, 4);
  for (const auto& p : corpus.at({0, 1})) {
    std::set<int> targets;
    for (const auto& l : p.gold_links) {
      EXPECT_LE(std::abs(l.src - l.tgt), 1);
      targets.insert(l.tgt);
      swapped += l.src != l.tgt;
    }
    EXPECT_EQ(targets.size(), p.tgt.size());
  }
  EXPECT_GT(swapped, 0);
}

TEST(GenerateCorpus, WordsCarryLanguagePrefixAndPivotIsSource) {
  const Corpus corpus = GenerateCorpus(testing_util::SmallCorpusConfig(), 5);
  for (const auto& [langs, pairs] : corpus) {
    EXPECT_EQ(langs.first, kPivotLanguage);
    for (const auto& p : pairs) {
      EXPECT_EQ(p.src.lang, kPivotLanguage);
      for (const auto& w : p.src.words) EXPECT_EQ(w.rfind("l0_", 0), 0u) << w;
      const std::string prefix = "l" + std::to_string(p.tgt.lang) + "_";
      for (const auto& w : p.tgt.words) EXPECT_EQ(w.rfind(prefix, 0), 0u) << w;
      EXPECT_GE(static_cast<int>(p.src.size()), 2);
      EXPECT_LE(static_cast<int>(p.src.size()), 6);
      for (const auto& l : p.gold_links) {
        EXPECT_LT(l.src, static_cast<int>(p.src.size()));
        EXPECT_LT(l.tgt, static_cast<int>(p.tgt.size()));
      }
    }
  }
}

TEST(GenerateCorpus, DeterministicAndSeedSensitive) {
  testing_util::TempDir dir;
  const auto config = testing_util::SmallCorpusConfig();
  SaveParallel(Flatten(GenerateCorpus(config, 11)), dir.File("a.tsv"));
  SaveParallel(Flatten(GenerateCorpus(config, 11)), dir.File("b.tsv"));
  SaveParallel(Flatten(GenerateCorpus(config, 12)), dir.File("c.tsv"));
  EXPECT_EQ(ReadFile(dir.File("a.tsv")), ReadFile(dir.File("b.tsv")));
  EXPECT_NE(ReadFile(dir.File("a.tsv")), ReadFile(dir.File("c.tsv")));
}

TEST(GenerateCorpus, LexiconDependsOnlyOnCipherSeed) {
  const auto config = testing_util::SmallCorpusConfig(0.0, 0.0);
  const Corpus a = GenerateCorpus(config, 1);
  const Corpus b = GenerateCorpus(config, 2);
  std::map<std::string, std::string> dict;
  for (const auto* corpus : {&a, &b}) {
    for (const auto& p : corpus->at({0, 1})) {
      for (size_t i = 0; i < p.src.size(); ++i) {
        auto [it, fresh] = dict.emplace(p.src.words[i], p.tgt.words[i]);
        EXPECT_EQ(it->second, p.tgt.words[i]);
      }
    }
  }
  EXPECT_EQ(ConceptWord(config, 1, 0), ConceptWord(config, 1, 0));
  EXPECT_NE(ConceptWord(config, 1, 0), ConceptWord(config, 2, 0));
}

TEST(GenerateCorpus, InvalidConfigNamesField) {
  CorpusConfig c = TwoLanguages(10, 10);
  c.languages[1].vocab_size = 5;
  try {
    GenerateCorpus(c, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
    EXPECT_NE(std::string(e.what()).find("languages[1].vocab_size"), std::string::npos);
  }
  c = TwoLanguages(10, 10);
  c.reorder_prob = 1.5;
  EXPECT_THROW(GenerateCorpus(c, 1), Error);
  c = TwoLanguages(0, 10);
  EXPECT_THROW(GenerateCorpus(c, 1), Error);
  c = TwoLanguages(10, 10);
  c.languages[0].lang = 0;
  EXPECT_THROW(GenerateCorpus(c, 1), Error);
  EXPECT_THROW(GenerateCorpus(CorpusConfig{}, 1), Error);
}

std::vector<ParallelPair> NumberedPairs(int n) {
  std::vector<ParallelPair> out;
  for (int i = 0; i < n; ++i) {
    ParallelPair p;
    p.pair_id = i;
    p.src = {0, {"a"}};
    p.tgt = {1, {"b"}};
    out.push_back(p);
  }
  return out;
}

TEST(SplitCorpus, SizesDisjointUnionAndStable) {
  const auto pairs = NumberedPairs(100);
  const auto split = SplitCorpus(pairs, 0.1);
  EXPECT_EQ(split.train.size(), 90u);
  EXPECT_EQ(split.dev.size(), 10u);
  std::set<int64_t> ids;
  for (const auto* part : {&split.train, &split.dev}) {
    for (size_t i = 1; i < part->size(); ++i) {
      EXPECT_LT((*part)[i - 1].pair_id, (*part)[i].pair_id);
    }
    for (const auto& p : *part) EXPECT_TRUE(ids.insert(p.pair_id).second);
  }
  EXPECT_EQ(ids.size(), 100u);
  const auto again = SplitCorpus(pairs, 0.1);
  EXPECT_EQ(again.dev, split.dev);
  EXPECT_EQ(again.train, split.train);
}

TEST(SplitCorpus, LowResourceTableScale) {
  // 18190 train + 2021 dev pairs for en-kk.
  const auto split = SplitCorpus(NumberedPairs(18190 + 2021), 2021.0 / (18190 + 2021));
  EXPECT_EQ(split.train.size(), 18190u);
  EXPECT_EQ(split.dev.size(), 2021u);
}

TEST(SplitCorpus, MembershipDependsOnPairIdNotPosition) {
  auto pairs = NumberedPairs(50);
  const auto a = SplitCorpus(pairs, 0.2);
  std::reverse(pairs.begin(), pairs.end());
  const auto b = SplitCorpus(pairs, 0.2);
  std::set<int64_t> da, db;
  for (const auto& p : a.dev) da.insert(p.pair_id);
  for (const auto& p : b.dev) db.insert(p.pair_id);
  EXPECT_EQ(da, db);
}

TEST(SplitCorpus, RejectsBadFraction) {
  const auto pairs = NumberedPairs(10);
  EXPECT_THROW(SplitCorpus(pairs, 0.0), Error);
  EXPECT_THROW(SplitCorpus(pairs, 1.0), Error);
  EXPECT_THROW(SplitCorpus(pairs, -0.5), Error);
}

TEST(ParallelFiles, EmptyFileGivesEmptyList) {
  testing_util::TempDir dir;
  std::ofstream(dir.File("empty.tsv")).close();
  EXPECT_TRUE(LoadParallel(dir.File("empty.tsv")).empty());
}

TEST(ParallelFiles, OneRecord) {
  testing_util::TempDir dir;
  std::ofstream(dir.File("one.tsv")) << "7\t0\t2\tl0_a l0_b\tl2_x l2_y l2_z\t0-0:1,1-2:0.5\n";
  const auto pairs = LoadParallel(dir.File("one.tsv"));
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_EQ(pairs[0].pair_id, 7);
  EXPECT_EQ(pairs[0].src.size(), 2u);
  EXPECT_EQ(pairs[0].tgt.size(), 3u);
  EXPECT_EQ(pairs[0].tgt.lang, 2);
  EXPECT_EQ(pairs[0].gold_links[1], (ScoredLink{1, 2, 0.5}));
}

TEST(ParallelFiles, EmptyLinksFieldAllowed) {
  const auto p = ParseParallelRecord("1\t0\t1\ta\tb\t");
  EXPECT_TRUE(p.gold_links.empty());
}

TEST(ParallelFiles, GeneratedCorpusRoundTrips) {
  testing_util::TempDir dir;
  CorpusConfig c;
  c.languages = {{1, 60, 1000}};
  c.reorder_prob = 0.3;
  c.fertility_prob = 0.3;
  auto pairs = Flatten(GenerateCorpus(c, 2));
  ASSERT_EQ(pairs.size(), 1000u);
  pairs[3].gold_links[0].score = 0.1234567890123456789;
  pairs[4].gold_links[0].score = 1e-300;
  SaveParallel(pairs, dir.File("c.tsv"));
  EXPECT_EQ(LoadParallel(dir.File("c.tsv")), pairs);
}

TEST(ParallelFiles, MalformedLineReportsLineNumber) {
  testing_util::TempDir dir;
  std::ofstream(dir.File("bad.tsv")) << "1\t0\t1\ta\tb\t0-0:1\n"
                                     << "2\t0\t1\ta\tb\t0-x:1\n";
  try {
    LoadParallel(dir.File("bad.tsv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  std::ofstream(dir.File("short.tsv")) << "1\t0\t1\ta\n";
  EXPECT_THROW(LoadParallel(dir.File("short.tsv")), Error);
  std::ofstream(dir.File("oob.tsv")) << "1\t0\t1\ta\tb\t0-3:1\n";
  EXPECT_THROW(LoadParallel(dir.File("oob.tsv")), Error);
}

TEST(ParallelFiles, MissingFileIsNotFound) {
  try {
    LoadParallel("/nonexistent/corpus.tsv");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNotFound);
  }
}

}  // namespace
