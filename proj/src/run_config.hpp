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

#ifndef WACSE_RUN_CONFIG_HPP_
#define WACSE_RUN_CONFIG_HPP_

// One JSON document describing a whole run: corpus, encoder, training,
// alignment provider and evaluation settings.

#include <string>

#include "json.hpp"

#include "corpus.hpp"
#include "encoder.hpp"
#include "evaluation.hpp"
#include "trainer.hpp"

namespace wacse {

enum class ProviderKind { kGold, kIbm1, kFile };

ProviderKind ParseProviderKind(const std::string& text);
std::string ProviderKindName(ProviderKind kind);

struct RunConfig {
  // One high-resource and one low-resource pair unless configured.
  CorpusConfig corpus{.languages = {{1, 100, 1000}, {2, 100, 50}}};
  uint64_t corpus_seed = 1;
  double dev_fraction = 0.1;
  EncoderConfig encoder;
  int split_chars = 8;
  TrainConfig train;
  ProviderKind provider = ProviderKind::kGold;
  int ibm1_iterations = 20;
  std::string alignments_path;  // for ProviderKind::kFile
  EvalOptions eval;
  std::string output_dir;

  // Checks every nested invariant; throws ConfigError.
  void Validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig RunConfigFromJson(const nlohmann::json& j);
nlohmann::json RunConfigToJson(const RunConfig& config);
RunConfig LoadRunConfig(const std::string& path);

// The configured alignment provider; ibm1 tables are trained on `pairs`.
AlignmentProvider MakeProvider(const RunConfig& config,
                               const std::vector<ParallelPair>& pairs);

// Parses "A,B,G".
LossWeights ParseWeights(const std::string& text);

}  // namespace wacse

#endif  // WACSE_RUN_CONFIG_HPP_
