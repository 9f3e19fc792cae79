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

#include "dfpricing/nadam.h"

#include <cmath>

#include "dfpricing/error.h"

namespace dfpricing {

void NadamConfig::Validate() const {
  if (!(step > 0.0)) Fail(ErrorCode::kConfig, "must be > 0", "training.nadam.step");
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    Fail(ErrorCode::kConfig, "betas must lie in [0, 1)", "training.nadam");
  }
  if (!(epsilon > 0.0)) Fail(ErrorCode::kConfig, "must be > 0", "training.nadam.epsilon");
  if (!(schedule_decay >= 0.0)) {
    Fail(ErrorCode::kConfig, "must be >= 0", "training.nadam.schedule_decay");
  }
}

NadamOptimizer::NadamOptimizer(NadamConfig config, std::size_t size)
    : config_(config), m_(size, 0.0), v_(size, 0.0) {
  config_.Validate();
}

void NadamOptimizer::Step(std::span<double> params,
                          std::span<const double> gradient) {
  if (params.size() != m_.size() || gradient.size() != m_.size()) {
    Fail(ErrorCode::kInvalidInput, "optimizer block size mismatch");
  }
  ++iterations_;
  const double t = static_cast<double>(iterations_);
  const double b1 = config_.beta1;
  const double b2 = config_.beta2;
  const double momentum_t =
      b1 * (1.0 - 0.5 * std::pow(0.96, t * config_.schedule_decay));
  const double momentum_next =
      b1 * (1.0 - 0.5 * std::pow(0.96, (t + 1.0) * config_.schedule_decay));
  const double schedule_new = m_schedule_ * momentum_t;
  const double schedule_next = schedule_new * momentum_next;
  m_schedule_ = schedule_new;
  const double v_correction = 1.0 - std::pow(b2, t);

  for (std::size_t j = 0; j < m_.size(); ++j) {
    const double g = gradient[j];
    const double g_hat = g / (1.0 - schedule_new);
    m_[j] = b1 * m_[j] + (1.0 - b1) * g;
    v_[j] = b2 * v_[j] + (1.0 - b2) * g * g;
    const double m_hat = m_[j] / (1.0 - schedule_next);
    const double v_hat = v_[j] / v_correction;
    const double m_bar = (1.0 - momentum_t) * g_hat + momentum_next * m_hat;
    params[j] -= config_.step * m_bar / (std::sqrt(v_hat) + config_.epsilon);
  }
}

}  // namespace dfpricing
