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

#ifndef DFPRICING_LOSSES_H_
#define DFPRICING_LOSSES_H_

#include <cstddef>
#include <span>

namespace dfpricing {

// Poisson unit deviance 2 (mu - y - y log(mu / y)), with y log(y) := 0 at
// y = 0. Throws kDomain for mu <= 0 or y < 0.
double PoissonDeviance(double y, double mu);

// -log p[observed]. `p` must be strictly positive and sum to one.
double CrossEntropy(std::size_t observed, std::span<const double> p);

// One-hot overload; the vector must contain exactly one 1 and zeros elsewhere.
double CrossEntropy(std::span<const double> onehot, std::span<const double> p);

// Kullback-Leibler divergence between Poisson laws with means `truth` and
// `estimate`: estimate - truth - truth log(estimate / truth).
double PoissonKl(double truth, double estimate);

}  // namespace dfpricing

#endif  // DFPRICING_LOSSES_H_
