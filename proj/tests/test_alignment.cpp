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

#include "alignment.hpp"
#include "error.hpp"
#include "test_helpers.hpp"

using namespace wacse;

namespace {

ParallelPair MakePair(std::vector<std::string> src, std::vector<std::string> tgt,
                      std::vector<ScoredLink> links, int64_t id = 0) {
  ParallelPair p;
  p.pair_id = id;
  p.src = {0, std::move(src)};
  p.tgt = {1, std::move(tgt)};
  p.gold_links = std::move(links);
  return p;
}

std::vector<ParallelPair> IdentityCipher(int pairs, int vocab, uint64_t seed) {
  CorpusConfig c;
  c.languages = {{1, vocab, pairs}};
  return Flatten(GenerateCorpus(c, seed));
}

TEST(WordAlign, GoldIdentity) {
  const auto pair = MakePair({"a", "b", "c"}, {"x", "y", "z"},
                             {{0, 0, 1.0}, {1, 1, 1.0}, {2, 2, 1.0}});
  const auto dicts = WordAlign(pair, GoldProvider{});
  std::map<int, AlignmentDict::Target> expected{{0, {0, 1.0}}, {1, {1, 1.0}}, {2, {2, 1.0}}};
  EXPECT_EQ(dicts.forward.links, expected);
  EXPECT_EQ(dicts.backward.links, expected);
  EXPECT_EQ(dicts.forward.which, AlignDirection::kForward);
  EXPECT_EQ(dicts.backward.which, AlignDirection::kBackward);
  EXPECT_EQ(dicts.backward.src_lang, 1);
  EXPECT_EQ(dicts.forward.Lookup(1)->index, 1);
  EXPECT_FALSE(dicts.forward.Lookup(5).has_value());
}

TEST(WordAlign, FertilityTieBreaksToLowestTarget) {
  const auto pair = MakePair({"a", "b"}, {"x1", "x2", "y"},
                             {{0, 1, 1.0}, {0, 0, 1.0}, {1, 2, 1.0}});
  const auto dicts = WordAlign(pair, GoldProvider{});
  EXPECT_EQ(dicts.forward.links.at(0).index, 0);
  EXPECT_EQ(dicts.forward.links.at(1).index, 2);
  EXPECT_EQ(dicts.backward.links.at(0).index, 0);
  EXPECT_EQ(dicts.backward.links.at(1).index, 0);
  EXPECT_EQ(dicts.backward.links.at(2).index, 1);
}

TEST(WordAlign, HighestScoreWinsBeforeIndex) {
  const auto dict = BuildDict({{0, 0, 0.5}, {0, 2, 0.8}, {0, 1, 0.8}}, 0, 1,
                              AlignDirection::kForward, 1, 3);
  EXPECT_EQ(dict.links.at(0), (AlignmentDict::Target{1, 0.8}));
  EXPECT_THROW(BuildDict({{0, 3, 1.0}}, 0, 1, AlignDirection::kForward, 1, 3), Error);
}

TEST(WordAlign, GoldProviderNeedsLinks) {
  EXPECT_THROW(WordAlign(MakePair({"a"}, {"b"}, {}), GoldProvider{}), Error);
}

TEST(WordAlign, ThresholdAppliesBeforeDictionary) {
  const auto pair = MakePair({"a"}, {"x", "y"}, {{0, 0, 0.85}, {0, 1, 0.95}});
  EXPECT_EQ(WordAlign(pair, GoldProvider{}, 0.9).forward.links.at(0).index, 1);
  EXPECT_TRUE(WordAlign(pair, GoldProvider{}, 0.96).forward.empty());
}

TEST(FilterByThreshold, Examples) {
  AlignmentDict d;
  d.links = {{0, {0, 0.95}}, {1, {1, 0.85}}};
  const auto kept = FilterByThreshold(d, 0.9);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept.links.at(0).score, 0.95);
  EXPECT_EQ(FilterByThreshold(d, 0.0), d);
  AlignmentDict gold;
  gold.links = {{0, {0, 1.0}}, {1, {1, 1.0}}};
  EXPECT_EQ(FilterByThreshold(gold, kDefaultAlignmentThreshold), gold);
  EXPECT_EQ(FilterByThreshold(d, 0.85).size(), 2u);
  EXPECT_THROW(FilterByThreshold(d, 1.5), Error);
  EXPECT_THROW(FilterByThreshold(d, -0.1), Error);
}

TEST(Ibm1, SingleWordPair) {
  const auto model = TrainIbm1({MakePair({"a"}, {"x"}, {})}, 1);
  EXPECT_DOUBLE_EQ(model.table.Prob("a", "x"), 1.0);
  ASSERT_EQ(model.log_likelihood.size(), 1u);
}

TEST(Ibm1, TwoWordCipherConverges) {
  std::vector<ParallelPair> pairs;
  for (int i = 0; i < 10; ++i) {
    pairs.push_back(MakePair({"a", "b"}, {"x", "y"}, {}));
    pairs.push_back(MakePair({"a"}, {"x"}, {}));
    pairs.push_back(MakePair({"b"}, {"y"}, {}));
  }
  const auto model = TrainIbm1(pairs, 20);
  EXPECT_GT(model.table.Prob("a", "x"), 0.9);
  EXPECT_GT(model.table.Prob("b", "y"), 0.9);
  ASSERT_EQ(model.log_likelihood.size(), 20u);
  for (size_t i = 1; i < model.log_likelihood.size(); ++i) {
    EXPECT_GE(model.log_likelihood[i], model.log_likelihood[i - 1] - 1e-12);
  }
}

TEST(Ibm1, MoreIterationsNeverLowerLikelihood) {
  const auto pairs = IdentityCipher(100, 20, 3);
  const double one = TrainIbm1(pairs, 1).log_likelihood.back();
  const double two = TrainIbm1(pairs, 2).log_likelihood.back();
  EXPECT_GE(two, one);
}

TEST(Ibm1, RowsNormalized) {
  const auto model = TrainIbm1(
      Flatten(GenerateCorpus(testing_util::SmallCorpusConfig(), 3)), 5);
  for (const auto& [src, row] : model.table.rows()) {
    EXPECT_NEAR(model.table.RowSum(src), 1.0, 1e-9) << src;
  }
}

TEST(Ibm1, Errors) {
  EXPECT_THROW(TrainIbm1({}, 5), Error);
  EXPECT_THROW(TrainIbm1({MakePair({"a"}, {"x"}, {})}, 0), Error);
}

TEST(Ibm1, RecoversIdentityCipher) {
  const auto pairs = IdentityCipher(500, 60, 8);
  const auto provider = MakeIbm1Provider(pairs, 20);
  size_t gold = 0, hit = 0;
  for (const auto& p : pairs) {
    const auto dicts = WordAlign(p, provider, kDefaultAlignmentThreshold);
    for (const auto& l : p.gold_links) {
      ++gold;
      const auto t = dicts.forward.Lookup(l.src);
      hit += t && t->index == l.tgt;
    }
  }
  EXPECT_GE(static_cast<double>(hit) / static_cast<double>(gold), 0.95);
}

TEST(AlignIbm1, DeterministicTableScoresOne) {
  TranslationTable t;
  t.mutable_rows()["a"] = {{"x", 1.0}};
  t.mutable_rows()["b"] = {{"y", 1.0}};
  const auto links = AlignIbm1(t, MakePair({"a", "b"}, {"y", "x"}, {}));
  ASSERT_EQ(links.size(), 2u);
  EXPECT_EQ(links[0], (ScoredLink{0, 1, 1.0}));
  EXPECT_EQ(links[1], (ScoredLink{1, 0, 1.0}));
}

TEST(AlignIbm1, UniformTableFiltersOut) {
  TranslationTable t;
  t.mutable_rows()["a"] = {{"w", 0.25}, {"x", 0.25}, {"y", 0.25}, {"z", 0.25}};
  const auto pair = MakePair({"a"}, {"w", "x", "y", "z"}, {});
  const auto links = AlignIbm1(t, pair);
  ASSERT_EQ(links.size(), 1u);
  EXPECT_DOUBLE_EQ(links[0].score, 0.25);
  EXPECT_EQ(links[0].tgt, 0);
  EXPECT_TRUE(FilterLinks(links, 0.9).empty());
}

TEST(AlignIbm1, UnknownWordsYieldNoLink) {
  TranslationTable t;
  t.mutable_rows()["a"] = {{"x", 1.0}};
  const auto links = AlignIbm1(t, MakePair({"a", "q"}, {"x", "r"}, {}));
  ASSERT_EQ(links.size(), 1u);
  EXPECT_EQ(links[0].src, 0);
}

TEST(AlignIbm1, HeldOutPairsMatchGold) {
  const auto pairs = IdentityCipher(600, 40, 5);
  const std::vector<ParallelPair> train(pairs.begin(), pairs.begin() + 500);
  const auto model = TrainIbm1(train, 20);
  size_t gold = 0, hit = 0;
  for (size_t i = 500; i < pairs.size(); ++i) {
    for (const auto& l : AlignIbm1(model.table, pairs[i])) {
      hit += l.src == l.tgt;
    }
    gold += pairs[i].gold_links.size();
  }
  EXPECT_GE(static_cast<double>(hit) / static_cast<double>(gold), 0.95);
}

TEST(AlignmentFiles, RoundTripAndFormat) {
  testing_util::TempDir dir;
  AlignmentMap m;
  m[3] = {{0, 1, {{0, 0, 1.0}, {1, 2, 0.5}}}, {1, 0, {{0, 0, 1.0}}}};
  m[9] = {{0, 2, {}}};
  SaveAlignments(m, dir.File("a.tsv"));
  EXPECT_EQ(LoadAlignments(dir.File("a.tsv")), m);
  std::ifstream in(dir.File("a.tsv"));
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, "3\t0\xE2\x86\x92" "1\t0-0:1 1-2:0.5");
}

TEST(AlignmentFiles, EmptyFileAndAsciiArrow) {
  testing_util::TempDir dir;
  std::ofstream(dir.File("e.tsv")).close();
  EXPECT_TRUE(LoadAlignments(dir.File("e.tsv")).empty());
  std::ofstream(dir.File("ascii.tsv")) << "5\t0->1\t0-1:0.7\n";
  const auto m = LoadAlignments(dir.File("ascii.tsv"));
  EXPECT_EQ(m.at(5)[0].links[0], (ScoredLink{0, 1, 0.7}));
}

TEST(AlignmentFiles, MalformedLineNumber) {
  testing_util::TempDir dir;
  std::ofstream(dir.File("bad.tsv")) << "1\t0->1\t0-0:1\n2\t0=1\t0-0:1\n";
  try {
    LoadAlignments(dir.File("bad.tsv"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  EXPECT_THROW(LoadAlignments(dir.File("missing.tsv")), Error);
}

TEST(Providers, FileProviderDerivesMissingReverse) {
  FileProvider file;
  file.alignments[0] = {{0, 1, {{0, 1, 0.95}, {1, 0, 0.5}}}};
  const auto pair = MakePair({"a", "b"}, {"x", "y"}, {});
  const auto dicts = WordAlign(pair, file, 0.9);
  EXPECT_EQ(dicts.forward.links.size(), 1u);
  EXPECT_EQ(dicts.backward.links.at(1).index, 0);
  const auto unknown = WordAlign(MakePair({"a"}, {"x"}, {}, 42), file);
  EXPECT_TRUE(unknown.forward.empty());
}

TEST(Providers, AlignCorpusGoldEqualsGoldLinks) {
  const auto pairs = Flatten(GenerateCorpus(testing_util::SmallCorpusConfig(), 2));
  const auto m = AlignCorpus(pairs, GoldProvider{}, kDefaultAlignmentThreshold);
  ASSERT_EQ(m.size(), pairs.size());
  for (const auto& p : pairs) {
    ASSERT_EQ(m.at(p.pair_id).size(), 1u);
    EXPECT_EQ(m.at(p.pair_id)[0].links, p.gold_links);
    EXPECT_EQ(m.at(p.pair_id)[0].src_lang, p.src.lang);
    EXPECT_EQ(m.at(p.pair_id)[0].tgt_lang, p.tgt.lang);
  }
}

TEST(Providers, Ibm1WritesBothDirections) {
  const auto pairs = IdentityCipher(50, 15, 1);
  const auto m = AlignCorpus(pairs, MakeIbm1Provider(pairs, 5), 0.0);
  ASSERT_EQ(m.at(0).size(), 2u);
  EXPECT_EQ(m.at(0)[1].src_lang, 1);
}

}  // namespace
