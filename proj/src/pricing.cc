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

#include "dfpricing/pricing.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "dfpricing/error.h"

namespace dfpricing {

std::string_view ModelKindName(ModelKind kind) {
  switch (kind) {
    case ModelKind::kPlainVanilla:
      return "plain_vanilla";
    case ModelKind::kMultiOutput:
      return "multi_output";
    case ModelKind::kMultiTaskY:
      return "multi_task_y";
    case ModelKind::kMultiTaskMuhat:
      return "multi_task_muhat";
    case ModelKind::kUnawarenessAux:
      return "unawareness_aux";
  }
  return "unknown";
}

ModelKind ParseModelKind(std::string_view name) {
  for (ModelKind kind :
       {ModelKind::kPlainVanilla, ModelKind::kMultiOutput,
        ModelKind::kMultiTaskY, ModelKind::kMultiTaskMuhat,
        ModelKind::kUnawarenessAux}) {
    if (ModelKindName(kind) == name) return kind;
  }
  Fail(ErrorCode::kInvalidInput, "unknown model kind '" + std::string(name) + "'");
}

void ProtectedLevels::Validate() const {
  if (names.size() < 2) {
    Fail(ErrorCode::kInvalidInput, "need at least two protected levels");
  }
  std::set<std::string> seen(names.begin(), names.end());
  if (seen.size() != names.size()) {
    Fail(ErrorCode::kInvalidInput, "protected levels must be distinct");
  }
}

std::size_t ProtectedLevels::IndexOf(Gender gender) const {
  if (gender == Gender::kMissing) {
    Fail(ErrorCode::kInvalidInput, "missing gender has no level");
  }
  const std::string wanted = gender == Gender::kFemale ? "female" : "male";
  const auto it = std::find(names.begin(), names.end(), wanted);
  if (it == names.end()) {
    Fail(ErrorCode::kInvalidInput, "level '" + wanted + "' is not defined");
  }
  return static_cast<std::size_t>(it - names.begin());
}

std::vector<double> EncodeFeatures(Covariates x) {
  if (x.age < kMinAge || x.age > kMaxAge) {
    Fail(ErrorCode::kInvalidInput, "age outside [15, 80]",
         "age " + std::to_string(x.age));
  }
  const double scaled =
      2.0 * (x.age - kMinAge) / static_cast<double>(kMaxAge - kMinAge) - 1.0;
  return {scaled, x.smoker ? 1.0 : 0.0};
}

std::vector<double> EncodeFeaturesWithFemale(Covariates x, bool female) {
  std::vector<double> f = EncodeFeatures(x);
  f.push_back(female ? 1.0 : 0.0);
  return f;
}

FittedModel::FittedModel(ModelKind kind, ProtectedLevels levels,
                         NaggingEnsemble ensemble)
    : kind_(kind), levels_(std::move(levels)), ensemble_(std::move(ensemble)) {
  levels_.Validate();
  const std::size_t k = levels_.size();
  const std::size_t heads = ensemble_.num_price_heads();
  const std::size_t classes = ensemble_.num_class_heads();
  bool ok = false;
  switch (kind_) {
    case ModelKind::kPlainVanilla:
    case ModelKind::kUnawarenessAux:
      ok = heads == 1 && classes == 0;
      break;
    case ModelKind::kMultiOutput:
      ok = heads == k && classes == 0;
      break;
    case ModelKind::kMultiTaskY:
    case ModelKind::kMultiTaskMuhat:
      ok = heads == k && classes == k;
      break;
  }
  if (!ok) {
    Fail(ErrorCode::kInvalidInput, "network heads do not match model kind",
         std::string(ModelKindName(kind_)));
  }
  if (kind_ == ModelKind::kPlainVanilla && k != 2) {
    Fail(ErrorCode::kInvalidInput, "plain-vanilla dummy coding needs K = 2");
  }
}

std::size_t FittedModel::output_count() const {
  switch (kind_) {
    case ModelKind::kPlainVanilla:
    case ModelKind::kUnawarenessAux:
      return 1;
    case ModelKind::kMultiOutput:
      return levels_.size();
    case ModelKind::kMultiTaskY:
    case ModelKind::kMultiTaskMuhat:
      return 2 * levels_.size() + 1;
  }
  return 0;
}

TrainingData BuildTrainingData(std::span<const PortfolioRecord> records,
                               ModelKind kind, const ProtectedLevels& levels) {
  levels.Validate();
  TrainingData data;
  const bool with_gender = kind == ModelKind::kPlainVanilla;
  const bool complete_only =
      kind == ModelKind::kPlainVanilla || kind == ModelKind::kMultiOutput;
  data.input_dim = with_gender ? 3 : 2;
  for (const PortfolioRecord& r : records) {
    const bool missing = r.gender == Gender::kMissing;
    if (missing && complete_only) continue;
    const Covariates x{r.age, r.smoker};
    const int level =
        missing ? kLevelMissing : static_cast<int>(levels.IndexOf(r.gender));
    const std::vector<double> f =
        with_gender ? EncodeFeaturesWithFemale(x, level == 0)
                    : EncodeFeatures(x);
    data.features.insert(data.features.end(), f.begin(), f.end());
    data.response.push_back(r.claims);
    data.level.push_back(level);
  }
  return data;
}

namespace {

void RequireEveryLevel(const TrainingData& data, const ProtectedLevels& levels) {
  std::vector<std::size_t> counts(levels.size(), 0);
  for (int d : data.level) {
    if (d != kLevelMissing) ++counts[static_cast<std::size_t>(d)];
  }
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (counts[k] == 0) {
      Fail(ErrorCode::kData, "no complete-case records for level",
           levels.names[k]);
    }
  }
}

FittedModel FitWith(ModelKind kind, Objective objective, TrainingData data,
                    const FitOptions& options, const ProtectedLevels& levels) {
  const auto specs = objective.NetworkSpecs(data.input_dim, options.hidden_dims);
  auto members =
      TrainEnsemble(specs, data, objective, options.train, options.jobs);
  return FittedModel(kind, levels, NaggingEnsemble(std::move(members)));
}

Objective MultiTaskObjective(ObjectiveKind kind, const FitOptions& options,
                             const ProtectedLevels& levels) {
  Objective o;
  o.kind = kind;
  o.num_levels = levels.size();
  o.aux_direction = options.aux_direction;
  return o;
}

}  // namespace

FittedModel FitPlainVanilla(std::span<const PortfolioRecord> records,
                            const FitOptions& options,
                            const ProtectedLevels& levels) {
  TrainingData data =
      BuildTrainingData(records, ModelKind::kPlainVanilla, levels);
  if (data.size() == 0) {
    Fail(ErrorCode::kData, "no complete-case records (all genders missing)");
  }
  if (levels.size() != 2) {
    Fail(ErrorCode::kInvalidInput, "plain-vanilla dummy coding needs K = 2");
  }
  Objective objective;
  return FitWith(ModelKind::kPlainVanilla, objective, std::move(data), options,
                 levels);
}

FittedModel FitMultiOutput(std::span<const PortfolioRecord> records,
                           const FitOptions& options,
                           const ProtectedLevels& levels) {
  TrainingData data = BuildTrainingData(records, ModelKind::kMultiOutput, levels);
  RequireEveryLevel(data, levels);
  Objective objective;
  objective.kind = ObjectiveKind::kMultiOutput;
  objective.num_levels = levels.size();
  return FitWith(ModelKind::kMultiOutput, objective, std::move(data), options,
                 levels);
}

FittedModel FitMultiTaskY(std::span<const PortfolioRecord> records,
                          const FitOptions& options,
                          const ProtectedLevels& levels) {
  TrainingData data = BuildTrainingData(records, ModelKind::kMultiTaskY, levels);
  if (data.size() == 0) Fail(ErrorCode::kData, "portfolio is empty");
  RequireEveryLevel(data, levels);
  return FitWith(ModelKind::kMultiTaskY,
                 MultiTaskObjective(ObjectiveKind::kMultiTaskY, options, levels),
                 std::move(data), options, levels);
}

FittedModel FitUnawarenessAux(std::span<const PortfolioRecord> records,
                              const FitOptions& options,
                              const ProtectedLevels& levels) {
  TrainingData data =
      BuildTrainingData(records, ModelKind::kUnawarenessAux, levels);
  if (data.size() == 0) Fail(ErrorCode::kData, "portfolio is empty");
  Objective objective;
  return FitWith(ModelKind::kUnawarenessAux, objective, std::move(data),
                 options, levels);
}

FittedModel FitMultiTaskMuhat(std::span<const PortfolioRecord> records,
                              const FitOptions& options,
                              const FittedModel& aux,
                              const ProtectedLevels& levels) {
  if (aux.kind() != ModelKind::kUnawarenessAux) {
    Fail(ErrorCode::kInvalidInput,
         "auxiliary model must be a plain network on x only",
         std::string(ModelKindName(aux.kind())));
  }
  const auto& aux_spec =
      aux.ensemble().members().front().networks.front().spec();
  if (aux_spec.input_dim != 2) {
    Fail(ErrorCode::kInvalidInput, "auxiliary model input does not match x");
  }
  TrainingData data =
      BuildTrainingData(records, ModelKind::kMultiTaskMuhat, levels);
  if (data.size() == 0) Fail(ErrorCode::kData, "portfolio is empty");
  RequireEveryLevel(data, levels);
  const PriceTable aux_prices(aux);
  data.aux.reserve(records.size());
  for (const PortfolioRecord& r : records) {
    data.aux.push_back(aux_prices.at(r.age, r.smoker).unawareness);
  }
  return FitWith(
      ModelKind::kMultiTaskMuhat,
      MultiTaskObjective(ObjectiveKind::kMultiTaskAux, options, levels),
      std::move(data), options, levels);
}

double PriceBestEstimate(const FittedModel& model, Covariates x,
                         std::size_t level) {
  if (level >= model.levels().size()) {
    Fail(ErrorCode::kInvalidInput, "unknown protected level",
         "level " + std::to_string(level));
  }
  switch (model.kind()) {
    case ModelKind::kPlainVanilla:
      return model.ensemble().PredictPrice(
          EncodeFeaturesWithFemale(x, level == 0), 0);
    case ModelKind::kUnawarenessAux:
      Fail(ErrorCode::kInvalidInput,
           "the auxiliary model has no best-estimate prices");
    default:
      return model.ensemble().PredictPrice(EncodeFeatures(x), level);
  }
}

std::vector<double> PriceBestEstimates(const FittedModel& model, Covariates x) {
  if (model.kind() == ModelKind::kPlainVanilla) {
    std::vector<double> out(model.levels().size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = PriceBestEstimate(model, x, k);
    }
    return out;
  }
  if (model.kind() == ModelKind::kUnawarenessAux) {
    Fail(ErrorCode::kInvalidInput,
         "the auxiliary model has no best-estimate prices");
  }
  return model.ensemble().PredictPrices(EncodeFeatures(x));
}

std::vector<double> ClassProbabilities(const FittedModel& model, Covariates x) {
  if (!model.multi_task()) {
    Fail(ErrorCode::kInvalidInput, "model has no classifier",
         std::string(ModelKindName(model.kind())));
  }
  return model.ensemble().PredictClass(EncodeFeatures(x));
}

double PriceUnawareness(const FittedModel& model, Covariates x) {
  if (model.kind() == ModelKind::kUnawarenessAux) {
    return model.ensemble().PredictPrice(EncodeFeatures(x), 0);
  }
  if (!model.multi_task()) {
    Fail(ErrorCode::kInvalidInput,
         "unawareness price needs a multi-task model",
         std::string(ModelKindName(model.kind())));
  }
  const std::vector<double> heads = PriceBestEstimates(model, x);
  const std::vector<double> p = ClassProbabilities(model, x);
  double price = 0.0;
  for (std::size_t k = 0; k < heads.size(); ++k) price += heads[k] * p[k];
  return price;
}

void PricingMeasure::Validate() const {
  if (probabilities.empty()) {
    Fail(ErrorCode::kInvalidInput, "pricing measure is empty");
  }
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      Fail(ErrorCode::kInvalidInput, "measure entries must lie in [0, 1]");
    }
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    Fail(ErrorCode::kInvalidInput, "measure must sum to one");
  }
}

PricingMeasure UserMeasure(std::vector<double> probabilities) {
  PricingMeasure m{std::move(probabilities), MeasureProvenance::kUserSupplied};
  m.Validate();
  return m;
}

double DiscriminationFreeFromHeads(std::span<const double> heads,
                                   const PricingMeasure& measure) {
  measure.Validate();
  if (heads.size() != measure.probabilities.size()) {
    Fail(ErrorCode::kInvalidInput, "measure dimension does not match levels");
  }
  double price = 0.0;
  for (std::size_t k = 0; k < heads.size(); ++k) {
    price += heads[k] * measure.probabilities[k];
  }
  const auto [lo, hi] = std::minmax_element(heads.begin(), heads.end());
  return std::clamp(price, *lo, *hi);
}

double PriceDiscriminationFree(const FittedModel& model, Covariates x,
                               const PricingMeasure& measure) {
  return DiscriminationFreeFromHeads(PriceBestEstimates(model, x), measure);
}

PricingMeasure EstimateMeasureEmpirical(
    std::span<const PortfolioRecord> records, const ProtectedLevels& levels) {
  levels.Validate();
  std::vector<double> counts(levels.size(), 0.0);
  double known = 0.0;
  for (const PortfolioRecord& r : records) {
    if (r.gender == Gender::kMissing) continue;
    counts[levels.IndexOf(r.gender)] += 1.0;
    known += 1.0;
  }
  if (known == 0.0) {
    Fail(ErrorCode::kData, "no record carries the protected attribute");
  }
  for (double& c : counts) c /= known;
  return {std::move(counts), MeasureProvenance::kEmpirical};
}

PricingMeasure EstimateMeasureMultiTask(
    const FittedModel& model, std::span<const PortfolioRecord> records) {
  if (records.empty()) Fail(ErrorCode::kData, "portfolio is empty");
  const PriceTable table(model);
  std::vector<double> sum(model.levels().size(), 0.0);
  for (const PortfolioRecord& r : records) {
    const auto& p = table.at(r.age, r.smoker).probabilities;
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += p[k];
  }
  for (double& s : sum) s /= static_cast<double>(records.size());
  // Averages of probability vectors can drift from one by rounding.
  const double total = std::accumulate(sum.begin(), sum.end(), 0.0);
  for (double& s : sum) s /= total;
  return {std::move(sum), MeasureProvenance::kMultiTaskEstimate};
}

namespace {

std::size_t CellIndex(int age, bool smoker) {
  if (age < kMinAge || age > kMaxAge) {
    Fail(ErrorCode::kInvalidInput, "age outside [15, 80]",
         "age " + std::to_string(age));
  }
  return static_cast<std::size_t>(age - kMinAge) * 2 + (smoker ? 1 : 0);
}

}  // namespace

PriceTable::PriceTable(const FittedModel& model) : points_(kAgeCount * 2) {
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      const Covariates x{age, smoker};
      PricePoint& point = points_[CellIndex(age, smoker)];
      if (model.kind() == ModelKind::kUnawarenessAux) {
        point.unawareness = PriceUnawareness(model, x);
        continue;
      }
      point.best_estimates = PriceBestEstimates(model, x);
      if (model.multi_task()) {
        point.probabilities = ClassProbabilities(model, x);
        point.unawareness = 0.0;
        for (std::size_t k = 0; k < point.best_estimates.size(); ++k) {
          point.unawareness += point.best_estimates[k] * point.probabilities[k];
        }
      }
    }
  }
}

const PricePoint& PriceTable::at(int age, bool smoker) const {
  return points_[CellIndex(age, smoker)];
}

}  // namespace dfpricing
