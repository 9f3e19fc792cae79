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

#ifndef DFPRICING_PRICING_H_
#define DFPRICING_PRICING_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpricing/objective.h"
#include "dfpricing/portfolio.h"
#include "dfpricing/trainer.h"

namespace dfpricing {

enum class ModelKind {
  kPlainVanilla,     // one price head on (x, d)
  kMultiOutput,      // K price heads on x
  kMultiTaskY,       // K price heads + K-class softmax, unawareness vs Y
  kMultiTaskMuhat,   // as above, unawareness vs a frozen auxiliary model
  kUnawarenessAux,   // one price head on x; the auxiliary model
};

std::string_view ModelKindName(ModelKind kind);
// Throws kInvalidInput for unknown names.
ModelKind ParseModelKind(std::string_view name);

// Ordered protected levels; head k binds to names[k].
struct ProtectedLevels {
  std::vector<std::string> names{"female", "male"};

  std::size_t size() const { return names.size(); }
  void Validate() const;
  // Index of the level carrying a record's gender. Throws for kMissing or a
  // name that is not among the levels.
  std::size_t IndexOf(Gender gender) const;
};

struct Covariates {
  int age = kMinAge;
  bool smoker = false;
};

// Age is min-max scaled from [15, 80] to [-1, 1]; smoker and female are
// 0/1 dummies.
std::vector<double> EncodeFeatures(Covariates x);
std::vector<double> EncodeFeaturesWithFemale(Covariates x, bool female);

struct FitOptions {
  std::vector<std::size_t> hidden_dims{20, 15, 10};
  TrainConfig train;
  AuxDirection aux_direction = AuxDirection::kAuxAsTruth;
  std::size_t jobs = 1;
};

class FittedModel {
 public:
  FittedModel(ModelKind kind, ProtectedLevels levels, NaggingEnsemble ensemble);

  ModelKind kind() const { return kind_; }
  const ProtectedLevels& levels() const { return levels_; }
  const NaggingEnsemble& ensemble() const { return ensemble_; }

  bool multi_task() const {
    return kind_ == ModelKind::kMultiTaskY || kind_ == ModelKind::kMultiTaskMuhat;
  }
  // 1 for plain models, K for multi-output, 2K + 1 for multi-task.
  std::size_t output_count() const;

 private:
  ModelKind kind_;
  ProtectedLevels levels_;
  NaggingEnsemble ensemble_;
};

// Training views; exposed for tests and gradient checks.
TrainingData BuildTrainingData(std::span<const PortfolioRecord> records,
                               ModelKind kind, const ProtectedLevels& levels);

// Complete-case fit on (x, d). Throws kData if no record has a gender.
FittedModel FitPlainVanilla(std::span<const PortfolioRecord> records,
                            const FitOptions& options,
                            const ProtectedLevels& levels = {});
// Throws kData naming any level without complete-case records.
FittedModel FitMultiOutput(std::span<const PortfolioRecord> records,
                           const FitOptions& options,
                           const ProtectedLevels& levels = {});
FittedModel FitMultiTaskY(std::span<const PortfolioRecord> records,
                          const FitOptions& options,
                          const ProtectedLevels& levels = {});
// Plain network on x only, gender ignored.
FittedModel FitUnawarenessAux(std::span<const PortfolioRecord> records,
                              const FitOptions& options,
                              const ProtectedLevels& levels = {});
FittedModel FitMultiTaskMuhat(std::span<const PortfolioRecord> records,
                              const FitOptions& options,
                              const FittedModel& aux,
                              const ProtectedLevels& levels = {});

double PriceBestEstimate(const FittedModel& model, Covariates x,
                         std::size_t level);
std::vector<double> PriceBestEstimates(const FittedModel& model, Covariates x);
// Multi-task kinds only.
std::vector<double> ClassProbabilities(const FittedModel& model, Covariates x);
// sum_k mu(x, d_k) p_k(x) for multi-task kinds; the network output for the
// auxiliary kind. Throws kInvalidInput for other kinds.
double PriceUnawareness(const FittedModel& model, Covariates x);

enum class MeasureProvenance { kEmpirical, kMultiTaskEstimate, kUserSupplied };

struct PricingMeasure {
  std::vector<double> probabilities;
  MeasureProvenance provenance = MeasureProvenance::kUserSupplied;

  // Entries in [0, 1] summing to one within 1e-12.
  void Validate() const;
};

PricingMeasure UserMeasure(std::vector<double> probabilities);

double PriceDiscriminationFree(const FittedModel& model, Covariates x,
                               const PricingMeasure& measure);
// Convex combination of given head prices.
double DiscriminationFreeFromHeads(std::span<const double> heads,
                                   const PricingMeasure& measure);

// Level frequencies among records with known gender. Throws kData if none.
PricingMeasure EstimateMeasureEmpirical(
    std::span<const PortfolioRecord> records,
    const ProtectedLevels& levels = {});
// (1/n) sum_i p(X_i) over all records, masked or not.
PricingMeasure EstimateMeasureMultiTask(
    const FittedModel& model, std::span<const PortfolioRecord> records);

// Every price notion evaluated once per (age, smoker) cell.
struct PricePoint {
  std::vector<double> best_estimates;
  std::vector<double> probabilities;  // empty unless multi-task
  double unawareness = 0.0;           // 0 unless available
};

class PriceTable {
 public:
  explicit PriceTable(const FittedModel& model);

  const PricePoint& at(int age, bool smoker) const;

 private:
  std::vector<PricePoint> points_;
};

}  // namespace dfpricing

#endif  // DFPRICING_PRICING_H_
