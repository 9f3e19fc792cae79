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

#ifndef DFPRICING_NADAM_H_
#define DFPRICING_NADAM_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace dfpricing {

struct NadamConfig {
  double step = 0.002;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  // Momentum warm-up schedule mu_t = beta1 (1 - 0.5 * 0.96^(t * decay)).
  // Zero gives the constant-momentum variant.
  double schedule_decay = 0.004;

  void Validate() const;
};

// Nesterov-accelerated Adam with the momentum schedule used by Keras. One
// instance updates one flat parameter block.
class NadamOptimizer {
 public:
  NadamOptimizer(NadamConfig config, std::size_t size);

  // Applies one update; all blocks sharing a step counter must call Step
  // once per iteration.
  void Step(std::span<double> params, std::span<const double> gradient);

  std::int64_t iterations() const { return iterations_; }

 private:
  NadamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  double m_schedule_ = 1.0;
  std::int64_t iterations_ = 0;
};

}  // namespace dfpricing

#endif  // DFPRICING_NADAM_H_
