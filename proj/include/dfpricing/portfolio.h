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

#ifndef DFPRICING_PORTFOLIO_H_
#define DFPRICING_PORTFOLIO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace dfpricing {

inline constexpr int kMinAge = 15;
inline constexpr int kMaxAge = 80;
inline constexpr std::size_t kAgeCount = kMaxAge - kMinAge + 1;
// ages x smoker x gender
inline constexpr std::size_t kCellCount = kAgeCount * 2 * 2;

// Female is protected level 0, male level 1.
enum class Gender { kFemale = 0, kMale = 1, kMissing = 2 };

// Weights proportional to a triangle on [14, 81] with its apex at 45.
std::vector<double> TriangularAgeDistribution();

struct PopulationConfig {
  std::size_t n = 100000;
  double p_female = 0.45;
  double p_smoker = 0.3;
  double p_female_given_smoker = 0.8;
  std::vector<double> age_distribution = TriangularAgeDistribution();
  std::uint64_t seed = 1;

  // Throws kConfig.
  void Validate() const;
  // Total probability: (p_female - p_female_given_smoker p_smoker) /
  // (1 - p_smoker).
  double FemaleGivenNonSmoker() const;
  double AgeProbability(int age) const;
};

struct PortfolioRecord {
  int age = kMinAge;
  bool smoker = false;
  Gender gender = Gender::kFemale;
  int claims = 0;
  // Oracle-only; never part of the training view.
  double true_lambda = 0.0;

  friend bool operator==(const PortfolioRecord&,
                         const PortfolioRecord&) = default;
};

// Independent draws; every record has its own random substreams for age,
// smoker, gender and claims.
std::vector<PortfolioRecord> SamplePortfolio(const PopulationConfig& config);

// lambda_1 + lambda_2 + lambda_3 of the synthetic health world. Throws
// kInvalidInput for ages outside [15, 80] or a missing gender.
double TrueFrequency(int age, bool smoker, Gender gender);

// (P(female | x), P(male | x)); age is independent of (smoker, gender).
std::array<double, 2> AnalyticConditionalGender(const PopulationConfig& config,
                                                int age, bool smoker);

enum class MaskMode { kMcar, kMnar };

// Young smokers, the sub-portfolio with an elevated drop-out rate.
bool InElevatedSubportfolio(int age, bool smoker);

struct MaskSpec {
  MaskMode mode = MaskMode::kMcar;
  double base_rate = 0.0;
  double m_rate = 0.0;
  std::uint64_t seed = 1;

  void Validate() const;
  double RateFor(const PortfolioRecord& record) const;
};

// Sets gender to kMissing with the per-record rate. Each record draws one
// uniform from its own stream, so equal rates give identical masks in both
// modes.
std::vector<PortfolioRecord> ApplyMask(std::span<const PortfolioRecord> records,
                                       const MaskSpec& spec);

double MissingShare(std::span<const PortfolioRecord> records);

// CSV: id,age,smoker,gender,claims[,true_lambda]; gender in {F,M,NA}.
void WritePortfolioCsv(const std::filesystem::path& path,
                       std::span<const PortfolioRecord> records,
                       bool with_oracle);
// Reads either layout. Without the oracle column true_lambda is set to 0.
std::vector<PortfolioRecord> ReadPortfolioCsv(const std::filesystem::path& path);

}  // namespace dfpricing

#endif  // DFPRICING_PORTFOLIO_H_
