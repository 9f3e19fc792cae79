//
// Copyright 2026 The dfpricing Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#ifndef DFPRICING_MODEL_IO_H_
#define DFPRICING_MODEL_IO_H_

#include <filesystem>

#include "json.hpp"

#include "dfpricing/pricing.h"
#include "dfpricing/trainer.h"

namespace dfpricing {

inline constexpr int kModelFormatVersion = 1;

nlohmann::json NetworkToJson(const NetworkParams& params);
NetworkParams NetworkFromJson(const nlohmann::json& j);

// Versioned document: kind discriminator, protected-level order, and per
// ensemble member the network blocks (row-major arrays) plus training
// metadata. Doubles are written in shortest round-trip form, so a reload is
// bit-exact.
nlohmann::json ModelToJson(const FittedModel& model, const TrainConfig& config);
// Throws kData on schema or version mismatch.
FittedModel ModelFromJson(const nlohmann::json& j);

void SaveModel(const std::filesystem::path& path, const FittedModel& model,
               const TrainConfig& config);
FittedModel LoadModel(const std::filesystem::path& path);

}  // namespace dfpricing

#endif  // DFPRICING_MODEL_IO_H_
