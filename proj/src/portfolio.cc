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

#include "dfpricing/portfolio.h"

#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "dfpricing/error.h"
#include "dfpricing/rng.h"

namespace dfpricing {

namespace {

enum Stream : std::uint64_t {
  kAgeStream = 1,
  kSmokerStream = 2,
  kGenderStream = 3,
  kClaimsStream = 4,
  kMaskStream = 5,
};

SplitMix64 RecordStream(std::uint64_t seed, std::size_t index, Stream stream) {
  return SplitMix64(MixSeed(seed, index, stream));
}

constexpr double kAlpha0 = -40.0;
constexpr double kAlpha1 = 38.5;
constexpr double kAlpha2 = 38.5;
constexpr double kGamma0 = -2.0;
constexpr double kGamma1 = 0.004;
constexpr double kGamma2 = 0.1;
constexpr double kGamma3 = 0.2;
constexpr double kDelta0 = -2.0;
constexpr double kDelta1 = 0.01;

}  // namespace

std::vector<double> TriangularAgeDistribution() {
  constexpr double kLeft = kMinAge - 1;
  constexpr double kRight = kMaxAge + 1;
  constexpr double kApex = 45;
  std::vector<double> w(kAgeCount);
  for (std::size_t i = 0; i < kAgeCount; ++i) {
    const double age = kMinAge + static_cast<double>(i);
    w[i] = age <= kApex ? (age - kLeft) / (kApex - kLeft)
                        : (kRight - age) / (kRight - kApex);
  }
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
  return w;
}

void PopulationConfig::Validate() const {
  if (n == 0) Fail(ErrorCode::kConfig, "n must be >= 1", "population.n");
  auto check_probability = [](double p, const char* path) {
    if (!(p >= 0.0 && p <= 1.0)) {
      Fail(ErrorCode::kConfig, "probability must lie in [0, 1]", path);
    }
  };
  check_probability(p_female, "population.p_female");
  check_probability(p_smoker, "population.p_smoker");
  check_probability(p_female_given_smoker, "population.p_female_given_smoker");
  if (p_smoker >= 1.0) {
    Fail(ErrorCode::kConfig, "p_smoker must be < 1", "population.p_smoker");
  }
  if (p_female_given_smoker * p_smoker > p_female + 1e-15) {
    Fail(ErrorCode::kConfig,
         "p_female_given_smoker * p_smoker exceeds p_female",
         "population.p_female_given_smoker");
  }
  if (FemaleGivenNonSmoker() > 1.0 + 1e-15) {
    Fail(ErrorCode::kConfig, "implied P(female | non-smoker) exceeds 1",
         "population.p_female");
  }
  if (age_distribution.size() != kAgeCount) {
    Fail(ErrorCode::kConfig, "age distribution needs 66 entries (ages 15..80)",
         "population.age_distribution");
  }
  double total = 0.0;
  for (double w : age_distribution) {
    if (!(w >= 0.0)) {
      Fail(ErrorCode::kConfig, "age probabilities must be >= 0",
           "population.age_distribution");
    }
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    Fail(ErrorCode::kConfig, "age probabilities must sum to 1",
         "population.age_distribution");
  }
}

double PopulationConfig::FemaleGivenNonSmoker() const {
  return (p_female - p_female_given_smoker * p_smoker) / (1.0 - p_smoker);
}

double PopulationConfig::AgeProbability(int age) const {
  if (age < kMinAge || age > kMaxAge) return 0.0;
  return age_distribution[static_cast<std::size_t>(age - kMinAge)];
}

double TrueFrequency(int age, bool smoker, Gender gender) {
  if (age < kMinAge || age > kMaxAge) {
    Fail(ErrorCode::kInvalidInput, "age outside [15, 80]",
         "age " + std::to_string(age));
  }
  if (gender == Gender::kMissing) {
    Fail(ErrorCode::kInvalidInput, "true frequency needs a known gender");
  }
  const bool female = gender == Gender::kFemale;
  const double x1 = age;
  const double log1 = kAlpha0 + kAlpha1 * (age >= 20 && age <= 40 && female) +
                      kAlpha2 * (age >= 60 && !female);
  const double log2 = kGamma0 + kGamma1 * x1 + kGamma2 * smoker +
                      kGamma3 * female;
  const double log3 = kDelta0 + kDelta1 * x1;
  return std::exp(log1) + std::exp(log2) + std::exp(log3);
}

std::array<double, 2> AnalyticConditionalGender(const PopulationConfig& config,
                                                int age, bool smoker) {
  (void)age;
  const double f =
      smoker ? config.p_female_given_smoker : config.FemaleGivenNonSmoker();
  return {f, 1.0 - f};
}

std::vector<PortfolioRecord> SamplePortfolio(const PopulationConfig& config) {
  config.Validate();
  std::vector<double> cdf(kAgeCount);
  std::partial_sum(config.age_distribution.begin(),
                   config.age_distribution.end(), cdf.begin());
  const double p_female_non_smoker = config.FemaleGivenNonSmoker();

  std::vector<PortfolioRecord> records(config.n);
  for (std::size_t i = 0; i < config.n; ++i) {
    PortfolioRecord& r = records[i];
    auto age_stream = RecordStream(config.seed, i, kAgeStream);
    const double u = UniformUnit(age_stream) * cdf.back();
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    r.age = kMinAge + static_cast<int>(it - cdf.begin());

    auto smoker_stream = RecordStream(config.seed, i, kSmokerStream);
    r.smoker = UniformUnit(smoker_stream) < config.p_smoker;

    auto gender_stream = RecordStream(config.seed, i, kGenderStream);
    const double p_f =
        r.smoker ? config.p_female_given_smoker : p_female_non_smoker;
    r.gender = UniformUnit(gender_stream) < p_f ? Gender::kFemale : Gender::kMale;

    r.true_lambda = TrueFrequency(r.age, r.smoker, r.gender);
    auto claims_stream = RecordStream(config.seed, i, kClaimsStream);
    std::poisson_distribution<int> claims(r.true_lambda);
    r.claims = claims(claims_stream);
  }
  return records;
}

bool InElevatedSubportfolio(int age, bool smoker) {
  return smoker && age <= 45;
}

void MaskSpec::Validate() const {
  if (!(base_rate >= 0.0 && base_rate <= 1.0)) {
    Fail(ErrorCode::kConfig, "base_rate must lie in [0, 1]", "mask.base_rate");
  }
  if (mode == MaskMode::kMnar && !(m_rate >= 0.0 && m_rate <= 1.0)) {
    Fail(ErrorCode::kConfig, "m_rate must lie in [0, 1]", "mask.m_rate");
  }
}

double MaskSpec::RateFor(const PortfolioRecord& record) const {
  if (mode == MaskMode::kMnar &&
      InElevatedSubportfolio(record.age, record.smoker)) {
    return m_rate;
  }
  return base_rate;
}

std::vector<PortfolioRecord> ApplyMask(std::span<const PortfolioRecord> records,
                                       const MaskSpec& spec) {
  spec.Validate();
  std::vector<PortfolioRecord> out(records.begin(), records.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].gender == Gender::kMissing) {
      Fail(ErrorCode::kInvalidInput, "records are already masked",
           "record " + std::to_string(i));
    }
    auto stream = RecordStream(spec.seed, i, kMaskStream);
    if (UniformUnit(stream) < spec.RateFor(out[i])) {
      out[i].gender = Gender::kMissing;
    }
  }
  return out;
}

double MissingShare(std::span<const PortfolioRecord> records) {
  if (records.empty()) return 0.0;
  std::size_t missing = 0;
  for (const PortfolioRecord& r : records) {
    missing += r.gender == Gender::kMissing;
  }
  return static_cast<double>(missing) / static_cast<double>(records.size());
}

namespace {

const char* GenderCode(Gender g) {
  switch (g) {
    case Gender::kFemale:
      return "F";
    case Gender::kMale:
      return "M";
    case Gender::kMissing:
      return "NA";
  }
  return "NA";
}

}  // namespace

void WritePortfolioCsv(const std::filesystem::path& path,
                       std::span<const PortfolioRecord> records,
                       bool with_oracle) {
  std::ofstream out(path, std::ios::binary);
  if (!out) Fail(ErrorCode::kIo, "cannot open for writing", path.string());
  out << "id,age,smoker,gender,claims" << (with_oracle ? ",true_lambda" : "")
      << '\n';
  out.precision(17);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PortfolioRecord& r = records[i];
    out << i << ',' << r.age << ',' << (r.smoker ? 1 : 0) << ','
        << GenderCode(r.gender) << ',' << r.claims;
    if (with_oracle) out << ',' << r.true_lambda;
    out << '\n';
  }
  if (!out) Fail(ErrorCode::kIo, "write failed", path.string());
}

std::vector<PortfolioRecord> ReadPortfolioCsv(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) Fail(ErrorCode::kIo, "cannot open for reading", path.string());
  std::string line;
  if (!std::getline(in, line)) {
    Fail(ErrorCode::kData, "missing header", path.string());
  }
  bool with_oracle = false;
  if (line == "id,age,smoker,gender,claims,true_lambda") {
    with_oracle = true;
  } else if (line != "id,age,smoker,gender,claims") {
    Fail(ErrorCode::kData, "unexpected header '" + line + "'", path.string());
  }
  std::vector<PortfolioRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != (with_oracle ? 6u : 5u)) {
      Fail(ErrorCode::kData, "wrong number of fields", where);
    }
    PortfolioRecord r;
    try {
      r.age = std::stoi(fields[1]);
      r.claims = std::stoi(fields[4]);
      if (with_oracle) r.true_lambda = std::stod(fields[5]);
    } catch (const std::exception&) {
      Fail(ErrorCode::kData, "malformed number", where);
    }
    if (r.age < kMinAge || r.age > kMaxAge || r.claims < 0) {
      Fail(ErrorCode::kData, "age or claims out of range", where);
    }
    if (fields[2] == "1") {
      r.smoker = true;
    } else if (fields[2] != "0") {
      Fail(ErrorCode::kData, "smoker must be 0 or 1", where);
    }
    if (fields[3] == "F") {
      r.gender = Gender::kFemale;
    } else if (fields[3] == "M") {
      r.gender = Gender::kMale;
    } else if (fields[3] == "NA") {
      r.gender = Gender::kMissing;
    } else {
      Fail(ErrorCode::kData, "gender must be F, M or NA", where);
    }
    records.push_back(r);
  }
  return records;
}

}  // namespace dfpricing
