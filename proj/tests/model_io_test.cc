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

#include <filesystem>
#include <vector>

#include "doctest.h"
#include "dfpricing/error.h"
#include "dfpricing/model_io.h"
#include "dfpricing/portfolio.h"
#include "dfpricing/pricing.h"

namespace dfpricing {
namespace {

FitOptions QuickOptions() {
  FitOptions options;
  options.hidden_dims = {5, 4};
  options.train.max_epochs = 3;
  options.train.patience = 2;
  options.train.ensemble_size = 2;
  return options;
}

std::vector<PortfolioRecord> SmallPortfolio() {
  PopulationConfig config;
  config.n = 800;
  config.seed = 5;
  MaskSpec mask;
  mask.base_rate = 0.3;
  mask.seed = 6;
  return ApplyMask(SamplePortfolio(config), mask);
}

void CheckSamePrices(const FittedModel& a, const FittedModel& b) {
  REQUIRE(a.kind() == b.kind());
  REQUIRE(a.ensemble().size() == b.ensemble().size());
  for (std::size_t m = 0; m < a.ensemble().size(); ++m) {
    const auto& na = a.ensemble().members()[m].networks;
    const auto& nb = b.ensemble().members()[m].networks;
    REQUIRE(na.size() == nb.size());
    for (std::size_t n = 0; n < na.size(); ++n) {
      CHECK(na[n].spec() == nb[n].spec());
      const auto va = na[n].values();
      const auto vb = nb[n].values();
      CHECK(std::vector<double>(va.begin(), va.end()) ==
            std::vector<double>(vb.begin(), vb.end()));
    }
  }
  for (int age : {15, 33, 80}) {
    for (bool smoker : {false, true}) {
      CHECK(PriceBestEstimates(a, {age, smoker}) ==
            PriceBestEstimates(b, {age, smoker}));
    }
  }
}

TEST_CASE("fitted models survive a JSON round trip bit for bit") {
  const auto records = SmallPortfolio();
  const FitOptions options = QuickOptions();
  const auto dir = std::filesystem::temp_directory_path() / "dfpricing_io";
  std::filesystem::create_directories(dir);

  const FittedModel pv = FitPlainVanilla(records, options);
  const FittedModel mt = FitMultiTaskY(records, options);
  for (const FittedModel* model : {&pv, &mt}) {
    const auto path =
        dir / (std::string(ModelKindName(model->kind())) + ".json");
    SaveModel(path, *model, options.train);
    const FittedModel loaded = LoadModel(path);
    CheckSamePrices(*model, loaded);
    CHECK(loaded.levels().names == model->levels().names);
  }
  const FittedModel loaded = LoadModel(dir / "multi_task_y.json");
  CHECK(PriceUnawareness(loaded, {40, true}) ==
        PriceUnawareness(mt, {40, true}));
  std::filesystem::remove_all(dir);
}

TEST_CASE("model documents are validated on load") {
  const auto records = SmallPortfolio();
  const FitOptions options = QuickOptions();
  const FittedModel pv = FitPlainVanilla(records, options);
  const nlohmann::json good = ModelToJson(pv, options.train);

  nlohmann::json wrong_version = good;
  wrong_version["version"] = kModelFormatVersion + 1;
  CHECK_THROWS_AS(ModelFromJson(wrong_version), Error);
  try {
    ModelFromJson(wrong_version);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kData);
  }

  nlohmann::json wrong_kind = good;
  wrong_kind["kind"] = "no_such_kind";
  CHECK_THROWS_AS(ModelFromJson(wrong_kind), Error);

  CHECK_THROWS_AS(ModelFromJson(nlohmann::json::object()), Error);
  CHECK_THROWS_AS(LoadModel("/nonexistent/model.json"), Error);
}

}  // namespace
}  // namespace dfpricing
