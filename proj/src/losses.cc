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

#include "dfpricing/losses.h"

#include <cmath>
#include <numeric>

#include "dfpricing/error.h"

namespace dfpricing {

double PoissonDeviance(double y, double mu) {
  if (!(mu > 0.0) || !std::isfinite(mu)) {
    Fail(ErrorCode::kDomain, "Poisson deviance requires mu > 0");
  }
  if (!(y >= 0.0)) Fail(ErrorCode::kDomain, "Poisson deviance requires y >= 0");
  const double log_term = y > 0.0 ? y * std::log(mu / y) : 0.0;
  return 2.0 * (mu - y - log_term);
}

double CrossEntropy(std::size_t observed, std::span<const double> p) {
  if (observed >= p.size()) {
    Fail(ErrorCode::kInvalidInput, "observed class out of range");
  }
  const double total = std::accumulate(p.begin(), p.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    Fail(ErrorCode::kDomain, "probabilities do not sum to one");
  }
  if (!(p[observed] > 0.0)) {
    Fail(ErrorCode::kDomain, "zero probability at the observed class");
  }
  return -std::log(p[observed]);
}

double CrossEntropy(std::span<const double> onehot, std::span<const double> p) {
  if (onehot.size() != p.size()) {
    Fail(ErrorCode::kInvalidInput, "one-hot and probability lengths differ");
  }
  std::size_t observed = onehot.size();
  for (std::size_t k = 0; k < onehot.size(); ++k) {
    if (onehot[k] == 1.0 && observed == onehot.size()) {
      observed = k;
    } else if (onehot[k] != 0.0) {
      Fail(ErrorCode::kInvalidInput, "not a valid one-hot vector");
    }
  }
  if (observed == onehot.size()) {
    Fail(ErrorCode::kInvalidInput, "not a valid one-hot vector");
  }
  return CrossEntropy(observed, p);
}

double PoissonKl(double truth, double estimate) {
  if (!(truth > 0.0) || !(estimate > 0.0)) {
    Fail(ErrorCode::kDomain, "Poisson KL requires positive intensities");
  }
  return estimate - truth - truth * std::log(estimate / truth);
}

}  // namespace dfpricing
