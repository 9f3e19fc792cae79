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
#include "dfpricing/losses.h"

namespace dfpricing {
namespace {

TEST_CASE("Poisson deviance") {
  CHECK(PoissonDeviance(1.0, 1.0) == 0.0);
  CHECK(PoissonDeviance(0.0, 0.5) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(PoissonDeviance(2.0, 1.0) ==
        doctest::Approx(0.772589).epsilon(1e-6));
  CHECK(PoissonDeviance(2.0, 1.0) ==
        doctest::Approx(2.0 * (-1.0 + 2.0 * std::log(2.0))).epsilon(1e-15));
  CHECK_THROWS_AS(PoissonDeviance(1.0, 0.0), Error);
  CHECK_THROWS_AS(PoissonDeviance(1.0, -1.0), Error);
}

TEST_CASE("Poisson deviance is non-negative and zero only at mu = y") {
  for (int y = 0; y <= 5; ++y) {
    for (double mu = 0.05; mu < 8.0; mu += 0.05) {
      const double d = PoissonDeviance(y, mu);
      CHECK(d >= 0.0);
      if (std::abs(mu - y) > 1e-9) CHECK(d > 0.0);
    }
  }
}

TEST_CASE("cross-entropy") {
  const std::vector<double> sure{1.0 - 1e-12, 1e-12};
  CHECK(CrossEntropy(0, sure) == doctest::Approx(0.0));
  const std::vector<double> p{0.8, 0.2};
  CHECK(CrossEntropy(0, p) == doctest::Approx(0.223144).epsilon(1e-6));
  const std::vector<double> half{0.5, 0.5};
  const std::vector<double> second{0.0, 1.0};
  CHECK(CrossEntropy(second, half) == doctest::Approx(0.693147).epsilon(1e-6));

  const std::vector<double> zero{1.0, 0.0};
  CHECK_THROWS_AS(CrossEntropy(1, zero), Error);
  const std::vector<double> bad_sum{0.5, 0.6};
  CHECK_THROWS_AS(CrossEntropy(0, bad_sum), Error);
  const std::vector<double> not_onehot{1.0, 1.0};
  CHECK_THROWS_AS(CrossEntropy(not_onehot, half), Error);
}

TEST_CASE("Poisson KL") {
  CHECK(PoissonKl(0.5, 0.5) == 0.0);
  CHECK(PoissonKl(1.0, 2.0) == doctest::Approx(2.0 - 1.0 - std::log(2.0)));
  CHECK(PoissonKl(1.0, 2.0) == doctest::Approx(0.306853).epsilon(1e-6));
  CHECK_THROWS_AS(PoissonKl(0.0, 1.0), Error);
}

}  // namespace
}  // namespace dfpricing
