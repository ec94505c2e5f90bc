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

#include "run_config.hpp"

#include <gtest/gtest.h>

#include <fstream>

#include "error.hpp"
#include "test_helpers.hpp"

namespace wacse {
namespace {

ErrorKind KindOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::kRuntime;
}

TEST(RunConfig, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  EXPECT_EQ(c.train.weights, (LossWeights{0.8, 0.1, 0.1}));
  EXPECT_EQ(c.train.threshold, 0.9);
  EXPECT_EQ(c.encoder.max_seq_len, 32);
  EXPECT_EQ(c.provider, ProviderKind::kGold);
  EXPECT_EQ(c.corpus.languages.size(), 2u);
}

TEST(RunConfig, JsonRoundTrip) {
  RunConfig c;
  c.corpus.languages = {{3, 40, 70}};
  c.corpus_seed = 17;
  c.encoder.model_dim = 16;
  c.encoder.heads = 2;
  c.train.weights = {0.5, 0.25, 0.25};
  c.train.awp_mode = AwpMode::kExact;
  c.train.use_language_embedding = true;
  c.provider = ProviderKind::kIbm1;
  c.eval.mining_mode = MiningMode::kCosine;
  c.output_dir = "runs/x";
  const nlohmann::json j = RunConfigToJson(c);
  const RunConfig back = RunConfigFromJson(j);
  EXPECT_EQ(RunConfigToJson(back), j);
  EXPECT_EQ(back.corpus.languages.size(), 1u);
  EXPECT_EQ(back.corpus.languages[0].lang, 3);
  EXPECT_EQ(back.train.awp_mode, AwpMode::kExact);
  EXPECT_EQ(back.encoder, c.encoder);
}

TEST(RunConfig, MissingKeysKeepDefaults) {
  const RunConfig c = RunConfigFromJson(
      nlohmann::json::parse(R"({"train": {"steps": 7, "eval_every": 7}})"));
  EXPECT_EQ(c.train.steps, 7);
  EXPECT_EQ(c.train.batch_size, RunConfig().train.batch_size);
  EXPECT_EQ(c.corpus.languages.size(), 2u);
}

TEST(RunConfig, RejectsUnknownKeysAndBadValues) {
  auto parse = [](const char* text) {
    return [text] { RunConfigFromJson(nlohmann::json::parse(text)); };
  };
  EXPECT_EQ(KindOf(parse(R"({"bogus": 1})")), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(parse(R"({"train": {"stpes": 1}})")), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(parse(R"({"provider": "oracle"})")), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(parse(R"({"train": {"awp_mode": "lazy"}})")), ErrorKind::kConfig);
  EXPECT_EQ(KindOf(parse(R"({"train": {"weights": [1, 2]}})")), ErrorKind::kConfig);

  RunConfig c;
  c.dev_fraction = 1.0;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
  c = RunConfig();
  c.encoder.heads = 3;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
  c = RunConfig();
  c.provider = ProviderKind::kFile;
  EXPECT_EQ(KindOf([&] { c.Validate(); }), ErrorKind::kConfig);
}

TEST(RunConfig, LoadFromFile) {
  testing_util::TempDir dir;
  {
    std::ofstream out(dir.File("c.json"));
    out << R"({"corpus": {"seed": 5}, "train": {"lr": 0.002}})";
  }
  const RunConfig c = LoadRunConfig(dir.File("c.json"));
  EXPECT_EQ(c.corpus_seed, 5u);
  EXPECT_EQ(c.train.lr, 0.002);
  EXPECT_EQ(KindOf([&] { LoadRunConfig(dir.File("missing.json")); }), ErrorKind::kNotFound);
  {
    std::ofstream out(dir.File("bad.json"));
    out << "{not json";
  }
  EXPECT_EQ(KindOf([&] { LoadRunConfig(dir.File("bad.json")); }), ErrorKind::kConfig);
}

TEST(RunConfig, ShippedDeskConfigIsValid) {
  const RunConfig c = LoadRunConfig(WACSE_SOURCE_DIR "/configs/desk.json");
  EXPECT_NO_THROW(c.Validate());
  EXPECT_LE(c.train.steps, 2000);
  EXPECT_EQ(c.train.weights, (LossWeights{0.8, 0.1, 0.1}));
  EXPECT_EQ(c.train.threshold, 0.9);
}

TEST(RunConfig, ParseWeightsAndProviders) {
  EXPECT_EQ(ParseWeights("1,0,0"), (LossWeights{1.0, 0.0, 0.0}));
  EXPECT_EQ(ParseWeights("0.8,0.1,0.1"), (LossWeights{0.8, 0.1, 0.1}));
  EXPECT_EQ(KindOf([] { ParseWeights("1,0"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ParseWeights("1,x,0"); }), ErrorKind::kConfig);
  EXPECT_EQ(KindOf([] { ParseWeights("1,-1,0"); }), ErrorKind::kConfig);
  for (auto k : {ProviderKind::kGold, ProviderKind::kIbm1, ProviderKind::kFile}) {
    EXPECT_EQ(ParseProviderKind(ProviderKindName(k)), k);
  }
  EXPECT_EQ(KindOf([] { ParseProviderKind("fast_align"); }), ErrorKind::kConfig);
}

TEST(RunConfig, MakeProviderFollowsKind) {
  const auto pairs = Flatten(GenerateCorpus(testing_util::SmallCorpusConfig(), 1));
  RunConfig c;
  const auto gold = MakeProvider(c, pairs);
  EXPECT_EQ(WordAlign(pairs[0], gold).forward,
            WordAlign(pairs[0], GoldProvider{}).forward);

  c.provider = ProviderKind::kIbm1;
  c.ibm1_iterations = 5;
  const auto ibm1 = MakeProvider(c, pairs);
  EXPECT_FALSE(WordAlign(pairs[0], ibm1).forward.empty());

  c.provider = ProviderKind::kFile;
  c.alignments_path = "/nonexistent/links.txt";
  EXPECT_EQ(KindOf([&] { MakeProvider(c, pairs); }), ErrorKind::kNotFound);
}

}  // namespace
}  // namespace wacse
