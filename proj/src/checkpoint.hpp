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

#ifndef WACSE_CHECKPOINT_HPP_
#define WACSE_CHECKPOINT_HPP_

// Checkpoint container: a magic line, a little-endian u64 header length, a
// JSON header (encoder config, vocabulary, tensor table, free-form
// metadata), then every tensor as row-major little-endian doubles in header
// order.

#include <string>

#include "json.hpp"

#include "encoder.hpp"
#include "tokenizer.hpp"

namespace wacse {

struct Model {
  Tokenizer tokenizer;
  Encoder encoder;
};

nlohmann::json EncoderConfigToJson(const EncoderConfig& config);
EncoderConfig EncoderConfigFromJson(const nlohmann::json& j);

void SaveCheckpoint(const Model& model, const std::string& path,
                    const nlohmann::json& metadata = nlohmann::json::object());
Model LoadCheckpoint(const std::string& path,
                     nlohmann::json* metadata = nullptr);

}  // namespace wacse

#endif  // WACSE_CHECKPOINT_HPP_
