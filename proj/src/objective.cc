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

#include "dfpricing/objective.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfpricing/error.h"

namespace dfpricing {

std::vector<NetworkSpec> Objective::NetworkSpecs(
    std::size_t input_dim, std::span<const std::size_t> hidden_dims) const {
  NetworkSpec base;
  base.input_dim = input_dim;
  base.hidden_dims.assign(hidden_dims.begin(), hidden_dims.end());
  switch (kind) {
    case ObjectiveKind::kPoisson:
      base.num_price_heads = 1;
      return {base};
    case ObjectiveKind::kMultiOutput:
      base.num_price_heads = num_levels;
      return {base};
    case ObjectiveKind::kMultiTaskY:
    case ObjectiveKind::kMultiTaskAux: {
      NetworkSpec price = base;
      price.num_price_heads = num_levels;
      NetworkSpec classifier = base;
      classifier.num_class_heads = num_levels;
      return {price, classifier};
    }
  }
  return {};
}

void TrainingData::Validate(const Objective& objective) const {
  if (size() == 0) Fail(ErrorCode::kInvalidInput, "training data is empty");
  if (features.size() != size() * input_dim) {
    Fail(ErrorCode::kInvalidInput, "feature matrix has the wrong size");
  }
  for (double y : response) {
    if (!(y >= 0.0) || !std::isfinite(y)) {
      Fail(ErrorCode::kInvalidInput, "responses must be finite and >= 0");
    }
  }
  if (objective.kind == ObjectiveKind::kPoisson) return;
  if (level.size() != size()) {
    Fail(ErrorCode::kInvalidInput, "level vector has the wrong size");
  }
  for (int d : level) {
    if (d != kLevelMissing &&
        (d < 0 || static_cast<std::size_t>(d) >= objective.num_levels)) {
      Fail(ErrorCode::kInvalidInput, "protected level out of range");
    }
  }
  if (objective.kind == ObjectiveKind::kMultiTaskAux) {
    if (aux.size() != size()) {
      Fail(ErrorCode::kInvalidInput, "auxiliary predictions missing");
    }
    for (double a : aux) {
      if (!(a > 0.0)) {
        Fail(ErrorCode::kInvalidInput, "auxiliary predictions must be > 0");
      }
    }
  }
}

ObjectiveEvaluator::ObjectiveEvaluator(Objective objective)
    : objective_(objective) {
  if (objective_.num_levels == 0) {
    Fail(ErrorCode::kInvalidInput, "objective needs at least one level");
  }
  if (objective_.kind != ObjectiveKind::kPoisson && objective_.num_levels < 2) {
    Fail(ErrorCode::kInvalidInput, "multi-level objectives need K >= 2");
  }
}

double ObjectiveEvaluator::Loss(std::span<const NetworkParams> networks,
                                const TrainingData& data,
                                std::span<const std::size_t> indices) {
  return Evaluate(networks, data, indices, {}, false);
}

double ObjectiveEvaluator::Gradients(std::span<const NetworkParams> networks,
                                     const TrainingData& data,
                                     std::span<const std::size_t> indices,
                                     std::span<NetworkParams> gradients) {
  if (gradients.size() != networks.size()) {
    Fail(ErrorCode::kInvalidInput, "one gradient per network required");
  }
  return Evaluate(networks, data, indices, gradients, true);
}

namespace {

double Deviance(double y, double mu) {
  const double log_term = y > 0.0 ? y * std::log(mu / y) : 0.0;
  return 2.0 * (mu - y - log_term);
}

}  // namespace

double ObjectiveEvaluator::Evaluate(std::span<const NetworkParams> networks,
                                    const TrainingData& data,
                                    std::span<const std::size_t> indices,
                                    std::span<NetworkParams> gradients,
                                    bool want_gradients) {
  if (indices.empty()) Fail(ErrorCode::kInvalidInput, "empty batch");
  if (networks.size() != objective_.network_count()) {
    Fail(ErrorCode::kInvalidInput, "wrong number of networks for objective");
  }
  const auto batch = static_cast<Eigen::Index>(indices.size());
  const auto dim = static_cast<Eigen::Index>(data.input_dim);
  inputs_.resize(dim, batch);
  for (Eigen::Index b = 0; b < batch; ++b) {
    const auto row = data.row(indices[static_cast<std::size_t>(b)]);
    for (Eigen::Index j = 0; j < dim; ++j) inputs_(j, b) = row[j];
  }

  const auto levels = static_cast<Eigen::Index>(objective_.num_levels);
  const bool multi_task = objective_.multi_task();
  ForwardBatch(networks[0], inputs_, price_cache_);
  if (multi_task) ForwardBatch(networks[1], inputs_, class_cache_);

  const Eigen::MatrixXd& eta = price_cache_.price_logits;
  d_price_.setZero(eta.rows(), batch);
  if (multi_task) d_class_.setZero(levels, batch);

  const double scale = 1.0 / static_cast<double>(batch);
  double total = 0.0;
  std::vector<double> mu(static_cast<std::size_t>(levels));
  std::vector<double> p(static_cast<std::size_t>(levels));
  for (Eigen::Index b = 0; b < batch; ++b) {
    const std::size_t i = indices[static_cast<std::size_t>(b)];
    const double y = data.response[i];
    switch (objective_.kind) {
      case ObjectiveKind::kPoisson: {
        const double m = std::exp(eta(0, b));
        total += Deviance(y, m);
        d_price_(0, b) = 2.0 * (m - y) * scale;
        break;
      }
      case ObjectiveKind::kMultiOutput: {
        const int d = data.level[i];
        if (d == kLevelMissing) break;
        const double m = std::exp(eta(d, b));
        total += Deviance(y, m);
        d_price_(d, b) = 2.0 * (m - y) * scale;
        break;
      }
      case ObjectiveKind::kMultiTaskY:
      case ObjectiveKind::kMultiTaskAux: {
        const int d = data.level[i];
        const auto s = class_cache_.class_logits.col(b);
        const double top = s.maxCoeff();
        double norm = 0.0;
        for (Eigen::Index k = 0; k < levels; ++k) {
          p[k] = std::exp(s(k) - top);
          norm += p[k];
        }
        double unaware = 0.0;
        for (Eigen::Index k = 0; k < levels; ++k) {
          p[k] /= norm;
          mu[k] = std::exp(eta(k, b));
          unaware += mu[k] * p[k];
        }
        if (d != kLevelMissing) {
          total += Deviance(y, mu[d]);
          d_price_(d, b) += 2.0 * (mu[d] - y) * scale;
          total += -(s(d) - top - std::log(norm));
          for (Eigen::Index k = 0; k < levels; ++k) {
            d_class_(k, b) += (p[k] - (k == d ? 1.0 : 0.0)) * scale;
          }
        }
        double d_unaware = 0.0;
        if (objective_.kind == ObjectiveKind::kMultiTaskY) {
          total += Deviance(y, unaware);
          d_unaware = 2.0 * (1.0 - y / unaware);
        } else {
          const double aux = data.aux[i];
          if (objective_.aux_direction == AuxDirection::kAuxAsTruth) {
            total += unaware - aux - aux * std::log(unaware / aux);
            d_unaware = 1.0 - aux / unaware;
          } else {
            total += aux - unaware - unaware * std::log(aux / unaware);
            d_unaware = std::log(unaware / aux);
          }
        }
        d_unaware *= scale;
        for (Eigen::Index k = 0; k < levels; ++k) {
          d_price_(k, b) += d_unaware * mu[k] * p[k];
          d_class_(k, b) += d_unaware * p[k] * (mu[k] - unaware);
        }
        break;
      }
    }
  }
  const double mean = total * scale;
  if (!std::isfinite(mean)) {
    Fail(ErrorCode::kNumeric, "non-finite loss", "objective");
  }
  if (!want_gradients) return mean;

  for (std::size_t n = 0; n < networks.size(); ++n) {
    if (gradients[n].spec() != networks[n].spec()) {
      Fail(ErrorCode::kInvalidInput, "gradient layout does not match network");
    }
    gradients[n].SetZero();
  }
  BackwardBatch(networks[0], price_cache_, d_price_, none_, gradients[0]);
  if (multi_task) {
    BackwardBatch(networks[1], class_cache_, none_, d_class_, gradients[1]);
  }
  return mean;
}

GradientReport CheckGradients(std::span<const NetworkParams> networks,
                              const TrainingData& data,
                              std::span<const std::size_t> indices,
                              const Objective& objective, double step,
                              double floor) {
  ObjectiveEvaluator evaluator(objective);
  std::vector<NetworkParams> analytic(networks.begin(), networks.end());
  evaluator.Gradients(networks, data, indices, analytic);

  std::vector<NetworkParams> probe(networks.begin(), networks.end());
  GradientReport report;
  for (std::size_t n = 0; n < probe.size(); ++n) {
    auto values = probe[n].values();
    std::vector<double> errors(values.size());
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double saved = values[j];
      values[j] = saved + step;
      const double up = evaluator.Loss(probe, data, indices);
      values[j] = saved - step;
      const double down = evaluator.Loss(probe, data, indices);
      values[j] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double exact = analytic[n].values()[j];
      const double denom =
          std::max({std::abs(exact), std::abs(numeric), floor});
      errors[j] = std::abs(exact - numeric) / denom;
      report.max_relative_error = std::max(report.max_relative_error, errors[j]);
    }
    report.relative_errors.push_back(std::move(errors));
  }
  return report;
}

}  // namespace dfpricing
