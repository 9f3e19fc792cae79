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
#include <filesystem>
#include <fstream>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "dfpricing/error.h"
#include "dfpricing/portfolio.h"

namespace dfpricing {
namespace {

// Independent restatement of the synthetic world.
double Lambda(int a, bool smoker, bool female) {
  const double l1 = std::exp(-40.0 + 38.5 * (a >= 20 && a <= 40 && female) +
                             38.5 * (a >= 60 && !female));
  const double l2 =
      std::exp(-2.0 + 0.004 * a + 0.1 * smoker + 0.2 * female);
  const double l3 = std::exp(-2.0 + 0.01 * a);
  return l1 + l2 + l3;
}

Gender G(bool female) { return female ? Gender::kFemale : Gender::kMale; }

TEST_CASE("true frequency at reference points") {
  CHECK(TrueFrequency(30, true, Gender::kFemale) ==
        doctest::Approx(0.611788782406).epsilon(1e-11));
  CHECK(TrueFrequency(30, true, Gender::kMale) ==
        doctest::Approx(0.351321671321).epsilon(1e-11));
  CHECK(TrueFrequency(65, false, Gender::kMale) ==
        doctest::Approx(0.657890821411).epsilon(1e-11));
  // Indicator boundaries.
  CHECK(TrueFrequency(40, false, Gender::kFemale) ==
        doctest::Approx(0.619006720434).epsilon(1e-11));
  CHECK(TrueFrequency(41, false, Gender::kFemale) ==
        doctest::Approx(0.398683128106).epsilon(1e-11));
  CHECK(TrueFrequency(60, false, Gender::kMale) ==
        doctest::Approx(0.641771987913).epsilon(1e-11));
  CHECK(TrueFrequency(59, false, Gender::kMale) ==
        doctest::Approx(0.415501342047).epsilon(1e-11));
  for (int a = kMinAge; a <= kMaxAge; ++a) {
    for (bool s : {false, true}) {
      for (bool f : {false, true}) {
        CHECK(TrueFrequency(a, s, G(f)) ==
              doctest::Approx(Lambda(a, s, f)).epsilon(1e-14));
      }
    }
  }
  CHECK_THROWS_AS(TrueFrequency(14, false, Gender::kMale), Error);
  CHECK_THROWS_AS(TrueFrequency(81, false, Gender::kMale), Error);
  CHECK_THROWS_AS(TrueFrequency(30, false, Gender::kMissing), Error);
}

TEST_CASE("population marginals") {
  PopulationConfig config;
  CHECK(config.FemaleGivenNonSmoker() == doctest::Approx(0.3).epsilon(1e-14));
  const auto smoker = AnalyticConditionalGender(config, 33, true);
  const auto non = AnalyticConditionalGender(config, 70, false);
  CHECK(smoker[0] == doctest::Approx(0.8));
  CHECK(smoker[1] == doctest::Approx(0.2));
  CHECK(non[0] == doctest::Approx(0.3));
  CHECK(non[1] == doctest::Approx(0.7));

  const auto ages = TriangularAgeDistribution();
  REQUIRE(ages.size() == kAgeCount);
  CHECK(std::accumulate(ages.begin(), ages.end(), 0.0) ==
        doctest::Approx(1.0).epsilon(1e-14));
  const std::size_t peak = 45 - kMinAge;
  for (std::size_t i = 0; i < ages.size(); ++i) {
    if (i != peak) CHECK(ages[i] < ages[peak]);
  }
  CHECK(ages[0] / ages[peak] == doctest::Approx(1.0 / 31.0));
  CHECK(ages[kAgeCount - 1] / ages[peak] == doctest::Approx(1.0 / 36.0));
}

TEST_CASE("population configuration validation names the field") {
  PopulationConfig config;
  config.p_female_given_smoker = 1.2;
  try {
    config.Validate();
    FAIL("expected a config error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfig);
    CHECK(e.context() == "population.p_female_given_smoker");
  }
  config = PopulationConfig{};
  config.p_female = 0.1;  // implies a negative P(female | non-smoker)
  CHECK_THROWS_AS(config.Validate(), Error);
  config = PopulationConfig{};
  config.age_distribution.pop_back();
  CHECK_THROWS_AS(config.Validate(), Error);
  config = PopulationConfig{};
  config.n = 0;
  CHECK_THROWS_AS(config.Validate(), Error);
}

TEST_CASE("sampled portfolio matches the population within sampling error") {
  PopulationConfig config;
  config.n = 1000000;
  config.seed = 11;
  const auto records = SamplePortfolio(config);
  REQUIRE(records.size() == config.n);
  const double n = static_cast<double>(config.n);

  double female = 0, smoker = 0, female_smoker = 0, claims = 0;
  std::vector<double> age_count(kAgeCount, 0.0);
  for (const auto& r : records) {
    female += r.gender == Gender::kFemale;
    smoker += r.smoker;
    female_smoker += r.smoker && r.gender == Gender::kFemale;
    claims += r.claims;
    age_count[r.age - kMinAge] += 1;
    CHECK(r.true_lambda == Lambda(r.age, r.smoker, r.gender == Gender::kFemale));
  }
  auto within = [n](double share, double p) {
    return std::abs(share - p) < 4.0 * std::sqrt(p * (1 - p) / n);
  };
  CHECK(within(female / n, 0.45));
  CHECK(within(smoker / n, 0.3));
  CHECK(std::abs(female_smoker / smoker - 0.8) <
        4.0 * std::sqrt(0.16 / smoker));
  CHECK(within(age_count[45 - kMinAge] / n, config.AgeProbability(45)));
  CHECK(within(age_count[0] / n, config.AgeProbability(15)));

  // E[Y] = sum over cells of P(cell) lambda(cell); Var[Y] = E[lambda] +
  // Var[lambda].
  double mean = 0.0, second = 0.0;
  for (int a = kMinAge; a <= kMaxAge; ++a) {
    for (bool s : {false, true}) {
      const double ps = s ? 0.3 : 0.7;
      const double pf = s ? 0.8 : 0.3;
      for (bool f : {false, true}) {
        const double w = config.AgeProbability(a) * ps * (f ? pf : 1 - pf);
        const double l = Lambda(a, s, f);
        mean += w * l;
        second += w * l * l;
      }
    }
  }
  const double var = mean + second - mean * mean;
  CHECK(mean == doctest::Approx(0.459539).epsilon(1e-5));
  CHECK(std::abs(claims / n - mean) < 3.0 * std::sqrt(var / n));
}

TEST_CASE("sampling is deterministic in the seed") {
  PopulationConfig config;
  config.n = 2000;
  const auto a = SamplePortfolio(config);
  CHECK(a == SamplePortfolio(config));
  config.seed = 2;
  CHECK(a != SamplePortfolio(config));
}

TEST_CASE("masks hit the requested rates") {
  PopulationConfig config;
  config.n = 200000;
  const auto records = SamplePortfolio(config);

  MaskSpec mcar{MaskMode::kMcar, 0.5, 0.0, 3};
  const auto masked = ApplyMask(records, mcar);
  CHECK(std::abs(MissingShare(masked) - 0.5) <
        4.0 * std::sqrt(0.25 / config.n));
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (masked[i].gender != Gender::kMissing) {
      CHECK(masked[i] == records[i]);
    } else {
      CHECK(masked[i].claims == records[i].claims);
    }
  }

  MaskSpec mnar{MaskMode::kMnar, 0.7, 0.9, 3};
  const auto mn = ApplyMask(records, mnar);
  double in = 0, in_missing = 0, out = 0, out_missing = 0;
  for (const auto& r : mn) {
    const bool m = r.gender == Gender::kMissing;
    if (InElevatedSubportfolio(r.age, r.smoker)) {
      ++in;
      in_missing += m;
    } else {
      ++out;
      out_missing += m;
    }
  }
  CHECK(std::abs(in_missing / in - 0.9) < 4.0 * std::sqrt(0.09 / in));
  CHECK(std::abs(out_missing / out - 0.7) < 4.0 * std::sqrt(0.21 / out));

  CHECK(InElevatedSubportfolio(45, true));
  CHECK_FALSE(InElevatedSubportfolio(46, true));
  CHECK_FALSE(InElevatedSubportfolio(20, false));
}

TEST_CASE("MNAR with equal rates reproduces the MCAR mask") {
  PopulationConfig config;
  config.n = 5000;
  const auto records = SamplePortfolio(config);
  const auto a = ApplyMask(records, {MaskMode::kMcar, 0.7, 0.0, 9});
  const auto b = ApplyMask(records, {MaskMode::kMnar, 0.7, 0.7, 9});
  CHECK(a == b);
  CHECK(a == ApplyMask(records, {MaskMode::kMcar, 0.7, 0.0, 9}));
  CHECK(a != ApplyMask(records, {MaskMode::kMcar, 0.7, 0.0, 10}));
  CHECK(ApplyMask(records, {MaskMode::kMcar, 0.0, 0.0, 9}) == records);
  CHECK(MissingShare(ApplyMask(records, {MaskMode::kMcar, 1.0, 0.0, 9})) ==
        1.0);
  CHECK_THROWS_AS(ApplyMask(a, {MaskMode::kMcar, 0.5, 0.0, 1}), Error);
  CHECK_THROWS_AS(ApplyMask(records, {MaskMode::kMcar, 1.5, 0.0, 1}), Error);
  CHECK_THROWS_AS(ApplyMask(records, {MaskMode::kMnar, 0.5, -0.1, 1}), Error);
}

TEST_CASE("portfolio CSV round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "dfpricing_csv";
  std::filesystem::create_directories(dir);
  PopulationConfig config;
  config.n = 500;
  const auto records =
      ApplyMask(SamplePortfolio(config), {MaskMode::kMcar, 0.3, 0.0, 1});

  WritePortfolioCsv(dir / "oracle.csv", records, true);
  CHECK(ReadPortfolioCsv(dir / "oracle.csv") == records);

  WritePortfolioCsv(dir / "plain.csv", records, false);
  const auto plain = ReadPortfolioCsv(dir / "plain.csv");
  REQUIRE(plain.size() == records.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    CHECK(plain[i].true_lambda == 0.0);
    CHECK(plain[i].gender == records[i].gender);
    CHECK(plain[i].claims == records[i].claims);
  }

  auto expect = [&](const std::string& body, ErrorCode code) {
    std::ofstream(dir / "bad.csv") << body;
    try {
      ReadPortfolioCsv(dir / "bad.csv");
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == code);
    }
  };
  expect("", ErrorCode::kData);
  expect("id,age,smoker,gender,claims\n0,30,1,X,0\n", ErrorCode::kData);
  expect("id,age,smoker,gender,claims\n0,30,2,F,0\n", ErrorCode::kData);
  expect("id,age,smoker,gender,claims\n0,99,1,F,0\n", ErrorCode::kData);
  expect("id,age,smoker,gender,claims\n0,30,1,F\n", ErrorCode::kData);
  CHECK_THROWS_AS(ReadPortfolioCsv(dir / "missing.csv"), Error);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace dfpricing
