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

#include "dfpricing/evaluation.h"

#include <string>

#include "dfpricing/error.h"
#include "dfpricing/losses.h"

namespace dfpricing {

double KlPointwise(double lambda_true, double mu_est) {
  return PoissonKl(lambda_true, mu_est);
}

double KlPortfolio(std::span<const PortfolioRecord> records,
                   const RecordPriceFn& price_fn) {
  if (records.empty()) Fail(ErrorCode::kData, "portfolio is empty");
  double total = 0.0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    try {
      total += KlPointwise(records[i].true_lambda, price_fn(records[i]));
    } catch (const Error& e) {
      Fail(e.code(), e.what(), "record " + std::to_string(i));
    }
  }
  return total / static_cast<double>(records.size());
}

std::size_t ReferenceCellIndex(int age, bool smoker, Gender gender) {
  if (age < kMinAge || age > kMaxAge || gender == Gender::kMissing) {
    Fail(ErrorCode::kInvalidInput, "cell outside the covariate space");
  }
  return (static_cast<std::size_t>(age - kMinAge) * 2 + (smoker ? 1 : 0)) * 2 +
         static_cast<std::size_t>(gender);
}

std::vector<ReferenceCell> TrueReferencePrices(const PopulationConfig& config,
                                               const PricingMeasure& measure) {
  config.Validate();
  measure.Validate();
  if (measure.probabilities.size() != 2) {
    Fail(ErrorCode::kInvalidInput, "pricing measure must cover two genders");
  }
  std::vector<ReferenceCell> cells(kCellCount);
  for (int age = kMinAge; age <= kMaxAge; ++age) {
    for (bool smoker : {false, true}) {
      const auto conditional = AnalyticConditionalGender(config, age, smoker);
      const double female = TrueFrequency(age, smoker, Gender::kFemale);
      const double male = TrueFrequency(age, smoker, Gender::kMale);
      const double unaware = conditional[0] * female + conditional[1] * male;
      const double df = measure.probabilities[0] * female +
                        measure.probabilities[1] * male;
      const double p_x = config.AgeProbability(age) *
                         (smoker ? config.p_smoker : 1.0 - config.p_smoker);
      for (Gender g : {Gender::kFemale, Gender::kMale}) {
        ReferenceCell& c = cells[ReferenceCellIndex(age, smoker, g)];
        c.age = age;
        c.smoker = smoker;
        c.gender = g;
        c.probability = p_x * conditional[static_cast<std::size_t>(g)];
        c.best_estimate = g == Gender::kFemale ? female : male;
        c.unawareness = unaware;
        c.discrimination_free = df;
      }
    }
  }
  return cells;
}

double CellKl(std::span<const ReferenceCell> cells,
              std::span<const double> weights, PriceNotion notion) {
  if (cells.size() != weights.size()) {
    Fail(ErrorCode::kInvalidInput, "one weight per cell required");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (weights[c] == 0.0) continue;
    const ReferenceCell& cell = cells[c];
    double price = cell.best_estimate;
    if (notion == PriceNotion::kUnawareness) price = cell.unawareness;
    if (notion == PriceNotion::kDiscriminationFree) {
      price = cell.discrimination_free;
    }
    total += weights[c] * KlPointwise(cell.best_estimate, price);
  }
  return total;
}

std::vector<double> EmpiricalCellWeights(
    std::span<const PortfolioRecord> records) {
  if (records.empty()) Fail(ErrorCode::kData, "portfolio is empty");
  std::vector<double> counts(kCellCount, 0.0);
  for (const PortfolioRecord& r : records) {
    counts[ReferenceCellIndex(r.age, r.smoker, r.gender)] += 1.0;
  }
  for (double& c : counts) c /= static_cast<double>(records.size());
  return counts;
}

double TrueMeanFrequency(const PopulationConfig& config) {
  const auto cells = TrueReferencePrices(config, UserMeasure({0.5, 0.5}));
  double mean = 0.0;
  for (const ReferenceCell& c : cells) mean += c.probability * c.best_estimate;
  return mean;
}

Decomposition DiscriminationDecomposition(double kl_unawareness,
                                          double kl_discrimination_free) {
  if (!(kl_unawareness > 0.0)) {
    Fail(ErrorCode::kDomain, "unawareness KL must be > 0 to normalize");
  }
  return {100.0, 100.0 * kl_discrimination_free / kl_unawareness};
}

}  // namespace dfpricing
