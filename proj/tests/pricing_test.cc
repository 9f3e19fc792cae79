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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dfpricing/error.h"
#include "dfpricing/pricing.h"

namespace dfpricing {
namespace {

// Constant multi-task model: heads mu = (0.5, 0.3), class logits giving
// p = (0.8, 0.2) everywhere.
FittedModel ConstantMultiTask(double female = 0.5, double male = 0.3,
                              double p_female = 0.8) {
  Objective objective;
  objective.kind = ObjectiveKind::kMultiTaskY;
  objective.num_levels = 2;
  const auto specs = objective.NetworkSpecs(2, std::vector<std::size_t>{3});
  FittedNetwork member;
  member.objective = objective;
  NetworkParams price(specs[0]);
  price.price_readout(0)(0) = std::log(female);
  price.price_readout(1)(0) = std::log(male);
  NetworkParams cls(specs[1]);
  cls.class_readout(0)(0) = std::log(p_female / (1.0 - p_female));
  member.networks = {price, cls};
  return FittedModel(ModelKind::kMultiTaskY, ProtectedLevels{},
                     NaggingEnsemble({member}));
}

TEST_CASE("feature encoding") {
  CHECK(EncodeFeatures({15, false}) == std::vector<double>{-1.0, 0.0});
  CHECK(EncodeFeatures({80, true}) == std::vector<double>{1.0, 1.0});
  CHECK(EncodeFeatures({47, true})[0] == doctest::Approx(-1.0 + 64.0 / 65.0));
  CHECK(EncodeFeaturesWithFemale({30, false}, true).size() == 3);
  CHECK(EncodeFeaturesWithFemale({30, false}, true)[2] == 1.0);
}

TEST_CASE("model kind names round trip") {
  for (ModelKind k :
       {ModelKind::kPlainVanilla, ModelKind::kMultiOutput, ModelKind::kMultiTaskY,
        ModelKind::kMultiTaskMuhat, ModelKind::kUnawarenessAux}) {
    CHECK(ParseModelKind(ModelKindName(k)) == k);
  }
  CHECK_THROWS_AS(ParseModelKind("gbm"), Error);
}

TEST_CASE("multi-task price notions on a constant model") {
  const FittedModel model = ConstantMultiTask();
  const Covariates x{33, true};
  CHECK(model.output_count() == 5);
  CHECK(PriceBestEstimate(model, x, 0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(PriceBestEstimate(model, x, 1) == doctest::Approx(0.3).epsilon(1e-14));
  const auto p = ClassProbabilities(model, x);
  CHECK(p[0] == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(PriceUnawareness(model, x) == doctest::Approx(0.46).epsilon(1e-14));

  const PricingMeasure star = UserMeasure({0.45, 0.55});
  CHECK(PriceDiscriminationFree(model, x, star) ==
        doctest::Approx(0.39).epsilon(1e-14));
  CHECK_THROWS_AS(PriceBestEstimate(model, x, 2), Error);
}

TEST_CASE("discrimination-free price is a convex combination of the heads") {
  const std::vector<double> heads{0.61, 0.35};
  for (double w = 0.0; w <= 1.0; w += 0.05) {
    const double price = DiscriminationFreeFromHeads(heads, UserMeasure({w, 1 - w}));
    CHECK(price >= 0.35);
    CHECK(price <= 0.61);
    CHECK(price == doctest::Approx(0.61 * w + 0.35 * (1 - w)).epsilon(1e-14));
  }
  // Degenerate measures give the head itself.
  CHECK(DiscriminationFreeFromHeads(heads, UserMeasure({1.0, 0.0})) == 0.61);
  CHECK(DiscriminationFreeFromHeads(heads, UserMeasure({0.0, 1.0})) == 0.35);
  CHECK_THROWS_AS(DiscriminationFreeFromHeads(heads, UserMeasure({0.5, 0.6})),
                  Error);
  CHECK_THROWS_AS(DiscriminationFreeFromHeads(heads, UserMeasure({-0.1, 1.1})),
                  Error);
  CHECK_THROWS_AS(
      DiscriminationFreeFromHeads(heads, UserMeasure({0.2, 0.3, 0.5})), Error);
}

TEST_CASE("pricing measures") {
  std::vector<PortfolioRecord> records(10);
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].gender = i < 3 ? Gender::kFemale
                        : i < 8 ? Gender::kMale
                                : Gender::kMissing;
  }
  const PricingMeasure empirical = EstimateMeasureEmpirical(records);
  CHECK(empirical.provenance == MeasureProvenance::kEmpirical);
  CHECK(empirical.probabilities[0] == doctest::Approx(3.0 / 8.0));
  CHECK(empirical.probabilities[1] == doctest::Approx(5.0 / 8.0));

  const PricingMeasure from_model =
      EstimateMeasureMultiTask(ConstantMultiTask(), records);
  CHECK(from_model.provenance == MeasureProvenance::kMultiTaskEstimate);
  CHECK(from_model.probabilities[0] == doctest::Approx(0.8).epsilon(1e-14));

  for (auto& r : records) r.gender = Gender::kMissing;
  CHECK_THROWS_AS(EstimateMeasureEmpirical(records), Error);
}

TEST_CASE("price table matches direct evaluation") {
  const FittedModel model = ConstantMultiTask(0.42, 0.27, 0.35);
  const PriceTable table(model);
  for (int age : {15, 44, 80}) {
    for (bool s : {false, true}) {
      const PricePoint& point = table.at(age, s);
      CHECK(point.best_estimates == PriceBestEstimates(model, {age, s}));
      CHECK(point.probabilities == ClassProbabilities(model, {age, s}));
      CHECK(point.unawareness == PriceUnawareness(model, {age, s}));
    }
  }
  CHECK_THROWS_AS(table.at(14, false), Error);
}

TEST_CASE("model kind must match the network heads") {
  const FittedModel mt = ConstantMultiTask();
  CHECK_THROWS_AS(FittedModel(ModelKind::kMultiOutput, ProtectedLevels{},
                              mt.ensemble()),
                  Error);
  CHECK_THROWS_AS(
      FittedModel(ModelKind::kMultiTaskY, ProtectedLevels{{"a", "b", "c"}},
                  mt.ensemble()),
      Error);
}

std::vector<PortfolioRecord> SmallPortfolio() {
  PopulationConfig config;
  config.n = 2000;
  config.seed = 5;
  return ApplyMask(SamplePortfolio(config), {MaskMode::kMcar, 0.4, 0.0, 5});
}

FitOptions QuickOptions() {
  FitOptions options;
  options.hidden_dims = {6, 4};
  options.train.max_epochs = 4;
  options.train.ensemble_size = 2;
  return options;
}

TEST_CASE("training views drop or keep missing genders by model kind") {
  const auto records = SmallPortfolio();
  std::size_t known = 0;
  for (const auto& r : records) known += r.gender != Gender::kMissing;
  const ProtectedLevels levels;
  const TrainingData plain =
      BuildTrainingData(records, ModelKind::kPlainVanilla, levels);
  CHECK(plain.size() == known);
  CHECK(plain.input_dim == 3);
  CHECK(BuildTrainingData(records, ModelKind::kMultiOutput, levels).size() ==
        known);
  const TrainingData mt =
      BuildTrainingData(records, ModelKind::kMultiTaskY, levels);
  CHECK(mt.size() == records.size());
  CHECK(mt.input_dim == 2);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK((records[i].gender == Gender::kMissing) ==
          (mt.level[i] == kLevelMissing));
    CHECK(mt.response[i] == records[i].claims);
  }
}

TEST_CASE("fitted models expose every price notion") {
  const auto records = SmallPortfolio();
  const FitOptions options = QuickOptions();

  const FittedModel pv = FitPlainVanilla(records, options);
  CHECK(pv.output_count() == 1);
  CHECK(PriceBestEstimates(pv, {30, true}).size() == 2);
  CHECK_THROWS_AS(PriceUnawareness(pv, {30, true}), Error);
  CHECK_THROWS_AS(ClassProbabilities(pv, {30, true}), Error);

  const FittedModel mo = FitMultiOutput(records, options);
  CHECK(mo.output_count() == 2);

  const FittedModel mt = FitMultiTaskY(records, options);
  const PricingMeasure measure = EstimateMeasureMultiTask(mt, records);
  double mean_p = 0.0;
  for (const auto& r : records) {
    mean_p += ClassProbabilities(mt, {r.age, r.smoker})[0];
  }
  mean_p /= static_cast<double>(records.size());
  CHECK(measure.probabilities[0] == doctest::Approx(mean_p).epsilon(1e-12));

  const FittedModel aux = FitUnawarenessAux(records, options);
  CHECK(aux.output_count() == 1);
  CHECK(PriceUnawareness(aux, {30, true}) > 0.0);
  const FittedModel muhat = FitMultiTaskMuhat(records, options, aux);
  CHECK(muhat.kind() == ModelKind::kMultiTaskMuhat);
  CHECK(muhat.output_count() == 5);
  for (int age : {20, 50, 75}) {
    const double u = PriceUnawareness(muhat, {age, false});
    const auto be = PriceBestEstimates(muhat, {age, false});
    CHECK(u >= std::min(be[0], be[1]));
    CHECK(u <= std::max(be[0], be[1]));
  }
  CHECK_THROWS_AS(FitMultiTaskMuhat(records, options, mo), Error);
}

TEST_CASE("complete-case fits need every level") {
  auto records = SmallPortfolio();
  for (auto& r : records) {
    if (r.gender == Gender::kMale) r.gender = Gender::kMissing;
  }
  CHECK_THROWS_AS(FitMultiOutput(records, QuickOptions()), Error);
  for (auto& r : records) r.gender = Gender::kMissing;
  CHECK_THROWS_AS(FitPlainVanilla(records, QuickOptions()), Error);
}

}  // namespace
}  // namespace dfpricing
