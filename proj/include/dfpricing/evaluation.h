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

#ifndef DFPRICING_EVALUATION_H_
#define DFPRICING_EVALUATION_H_

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dfpricing/portfolio.h"
#include "dfpricing/pricing.h"

namespace dfpricing {

// mu - lambda - lambda log(mu / lambda). Throws kDomain for non-positive
// arguments.
double KlPointwise(double lambda_true, double mu_est);

using RecordPriceFn = std::function<double(const PortfolioRecord&)>;

// Mean pointwise KL between each record's true_lambda and price_fn(record).
// Errors carry the record index.
double KlPortfolio(std::span<const PortfolioRecord> records,
                   const RecordPriceFn& price_fn);

// One covariate cell of the true model.
struct ReferenceCell {
  int age = kMinAge;
  bool smoker = false;
  Gender gender = Gender::kFemale;
  double probability = 0.0;   // population probability of the cell
  double best_estimate = 0.0; // lambda(x, d)
  double unawareness = 0.0;   // lambda(x) = sum_k lambda(x, d_k) P(d_k | x)
  double discrimination_free = 0.0;  // lambda*(x) = sum_k lambda(x, d_k) P*(d_k)
};

// All 264 cells, exactly; `measure` is P* over (female, male).
std::vector<ReferenceCell> TrueReferencePrices(const PopulationConfig& config,
                                               const PricingMeasure& measure);

std::size_t ReferenceCellIndex(int age, bool smoker, Gender gender);

enum class PriceNotion { kBestEstimate, kUnawareness, kDiscriminationFree };

// KL of the true-model `notion` against lambda(x, d), aggregated over cells
// with the given weights (population probabilities, or empirical counts
// normalized to one).
double CellKl(std::span<const ReferenceCell> cells,
              std::span<const double> weights, PriceNotion notion);

// Empirical cell weights of a portfolio, indexed like ReferenceCellIndex.
std::vector<double> EmpiricalCellWeights(
    std::span<const PortfolioRecord> records);

double TrueMeanFrequency(const PopulationConfig& config);

struct Decomposition {
  double unawareness_percent = 100.0;
  double discrimination_free_percent = 0.0;
};

// Normalizes the unawareness KL to 100%. Throws kDomain for a zero base.
Decomposition DiscriminationDecomposition(double kl_unawareness,
                                          double kl_discrimination_free);

}  // namespace dfpricing

#endif  // DFPRICING_EVALUATION_H_
