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

#ifndef DFPRICING_EXPERIMENT_H_
#define DFPRICING_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dfpricing/objective.h"
#include "dfpricing/portfolio.h"
#include "dfpricing/pricing.h"
#include "dfpricing/trainer.h"

namespace dfpricing {

enum class MeasureChoice { kEmpirical, kMultiTask, kExplicit };

struct MeasureSelection {
  MeasureChoice choice = MeasureChoice::kEmpirical;
  std::vector<double> probabilities;  // kExplicit only
};

// A named masking of the simulated portfolio.
struct Scenario {
  std::string label = "full";
  MaskMode mode = MaskMode::kMcar;
  double base_rate = 0.0;
  double m_rate = 0.0;  // kMnar only
};

struct SweepConfig {
  std::vector<double> mcar_rates{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  double mnar_base_rate = 0.7;
  std::vector<double> mnar_m_rates{0.7, 0.8, 0.9};
  // Empty: the experiment seed only.
  std::vector<std::uint64_t> seeds;
  // 0: training.ensemble_size.
  std::size_t ensemble_size = 0;
  // Pricing measures of the naive and the multi-task model.
  MeasureSelection naive_measure{MeasureChoice::kEmpirical, {}};
  MeasureSelection multitask_measure{MeasureChoice::kMultiTask, {}};
};

struct ExperimentConfig {
  // Where the config came from; carried into error messages.
  std::string source = "<defaults>";
  std::uint64_t seed = 1;
  PopulationConfig population;
  std::vector<std::size_t> hidden_dims{20, 15, 10};
  TrainConfig training;
  AuxDirection aux_direction = AuxDirection::kAuxAsTruth;
  std::vector<Scenario> scenarios{Scenario{}};
  SweepConfig sweep;
  MeasureSelection pricing_measure;
  std::filesystem::path output_dir = "out";
  std::size_t jobs = 1;

  // Throws kConfig with the offending key path.
  void Validate() const;
  // Throws kConfig for unknown labels.
  const Scenario& FindScenario(std::string_view label) const;
};

// Nested key-value (YAML) text. Unknown keys are rejected. Throws kConfig.
ExperimentConfig ParseExperimentConfig(std::string_view text,
                                       std::string source);
ExperimentConfig LoadExperimentConfig(const std::filesystem::path& path);

// Canonical point label, e.g. "dropout-b0.70-m0.90"; MCAR writes m = b.
std::string MaskLabel(MaskMode mode, double base_rate, double m_rate);
MaskSpec ScenarioMask(const Scenario& scenario, std::uint64_t base_seed);
// Population of a given base seed; `n` and the marginals come from config.
PopulationConfig PopulationFor(const ExperimentConfig& config,
                               std::uint64_t base_seed);
FitOptions FitOptionsFor(const ExperimentConfig& config, ModelKind kind,
                         std::string_view point_label, std::uint64_t base_seed,
                         std::size_t ensemble_size);

FittedModel FitModel(ModelKind kind, std::span<const PortfolioRecord> records,
                     const FitOptions& options, const FitOptions& aux_options);

// Scores of one fitted model on the (unmasked, oracle-carrying) portfolio.
// NaN marks a notion the model does not provide.
struct ModelScores {
  double kl_best_estimate = 0.0;
  double kl_unawareness = 0.0;
  double kl_discrimination_free = 0.0;
  // Discrimination-free price against the true lambda*(x).
  double kl_to_true_discrimination_free = 0.0;
  std::vector<double> measure;
};

// `reference` is P* of the true discrimination-free price.
ModelScores ScoreModel(const FittedModel& model,
                       std::span<const PortfolioRecord> portfolio,
                       const PricingMeasure& measure,
                       const PricingMeasure& reference);

// Resolves a measure selection against a model and the portfolio it was
// fitted on. Throws kConfig if the choice needs a multi-task model.
PricingMeasure ResolveMeasure(const MeasureSelection& selection,
                              const FittedModel& model,
                              std::span<const PortfolioRecord> fitted_on,
                              std::string_view config_path);

// Pipeline steps; all artifacts go below config.output_dir.
struct SimulateResult {
  std::filesystem::path portfolio_csv;
  std::filesystem::path oracle_csv;
  std::size_t records = 0;
};
SimulateResult RunSimulate(const ExperimentConfig& config);

// The oracle portfolio written by RunSimulate. Throws kData if absent.
std::vector<PortfolioRecord> LoadSimulatedPortfolio(
    const ExperimentConfig& config);

struct FitArtifact {
  ModelKind kind;
  std::filesystem::path model_path;
  std::filesystem::path log_path;
};
std::vector<FitArtifact> RunFit(const ExperimentConfig& config,
                                std::span<const ModelKind> kinds,
                                std::string_view scenario);

std::filesystem::path ModelPath(const ExperimentConfig& config,
                                std::string_view scenario, ModelKind kind);

// Price table over all (age, smoker) cells of a fitted model.
std::filesystem::path RunPrice(const ExperimentConfig& config, ModelKind kind,
                               std::string_view scenario);

struct SweepPoint {
  MaskMode mode = MaskMode::kMcar;
  std::uint64_t seed = 0;
  std::string label;
  double base_rate = 0.0;
  double m_rate = 0.0;
  double actual_dropout = 0.0;
  double subportfolio_dropout = 0.0;
  double empirical_female = 0.0;
  double multitask_female = 0.0;
  ModelScores naive;
  ModelScores multitask;
  std::string status = "ok";
};

std::vector<SweepPoint> RunSweep(const ExperimentConfig& config, MaskMode mode);

struct ReportResult {
  std::vector<std::filesystem::path> written;
  std::vector<std::string> missing;
};
// Throws kData naming the missing artifacts after writing what it can.
ReportResult RunReport(const ExperimentConfig& config);

}  // namespace dfpricing

#endif  // DFPRICING_EXPERIMENT_H_
