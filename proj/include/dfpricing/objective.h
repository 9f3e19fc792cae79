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

#ifndef DFPRICING_OBJECTIVE_H_
#define DFPRICING_OBJECTIVE_H_

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dfpricing/network.h"

namespace dfpricing {

// The training objectives. Per record i with level D_i (possibly missing):
//   kPoisson       L(Y_i, mu(X_i))
//   kMultiOutput   sum_k L(Y_i, mu_k(X_i)) 1{D_i = k}
//   kMultiTaskY    sum_k L(Y_i, mu_k) 1{D_i = k} + CE(D_i, p) 1{D_i != NA}
//                    + L(Y_i, sum_k mu_k p_k)
//   kMultiTaskAux  as kMultiTaskY with the last term replaced by the Poisson
//                    KL between sum_k mu_k p_k and a frozen auxiliary price.
// L is the Poisson deviance. Multi-task objectives use two networks: the
// first carries K price heads, the second a K-class softmax head.
enum class ObjectiveKind { kPoisson, kMultiOutput, kMultiTaskY, kMultiTaskAux };

// Which intensity occupies the "true" slot of the auxiliary KL term.
enum class AuxDirection { kAuxAsTruth, kModelAsTruth };

struct Objective {
  ObjectiveKind kind = ObjectiveKind::kPoisson;
  std::size_t num_levels = 1;
  AuxDirection aux_direction = AuxDirection::kAuxAsTruth;

  bool multi_task() const {
    return kind == ObjectiveKind::kMultiTaskY ||
           kind == ObjectiveKind::kMultiTaskAux;
  }
  std::size_t network_count() const { return multi_task() ? 2 : 1; }

  // Network layouts required by this objective.
  std::vector<NetworkSpec> NetworkSpecs(
      std::size_t input_dim, std::span<const std::size_t> hidden_dims) const;
};

inline constexpr int kLevelMissing = -1;

// Training-facing view of a data set: encoded features, responses, protected
// levels (kLevelMissing for NA) and, for kMultiTaskAux, frozen auxiliary
// predictions.
struct TrainingData {
  std::size_t input_dim = 0;
  std::vector<double> features;  // row-major, size() x input_dim
  std::vector<double> response;
  std::vector<int> level;
  std::vector<double> aux;

  std::size_t size() const { return response.size(); }
  std::span<const double> row(std::size_t i) const {
    return {features.data() + i * input_dim, input_dim};
  }

  // Throws kInvalidInput if the fields are inconsistent with `objective`.
  void Validate(const Objective& objective) const;
};

// Evaluates the mean objective over a set of record indices and its exact
// backpropagation gradient. Holds scratch buffers, so one instance must not
// be shared between threads.
class ObjectiveEvaluator {
 public:
  explicit ObjectiveEvaluator(Objective objective);

  const Objective& objective() const { return objective_; }

  double Loss(std::span<const NetworkParams> networks, const TrainingData& data,
              std::span<const std::size_t> indices);

  // Overwrites `gradients` (one per network) with d(mean loss)/d(theta) and
  // returns the mean loss.
  double Gradients(std::span<const NetworkParams> networks,
                   const TrainingData& data,
                   std::span<const std::size_t> indices,
                   std::span<NetworkParams> gradients);

 private:
  double Evaluate(std::span<const NetworkParams> networks,
                  const TrainingData& data,
                  std::span<const std::size_t> indices,
                  std::span<NetworkParams> gradients, bool want_gradients);

  Objective objective_;
  Eigen::MatrixXd inputs_;
  ForwardCache price_cache_;
  ForwardCache class_cache_;
  Eigen::MatrixXd d_price_;
  Eigen::MatrixXd d_class_;
  Eigen::MatrixXd none_;
};

struct GradientReport {
  double max_relative_error = 0.0;
  // Per network, one entry per parameter in NetworkParams layout.
  std::vector<std::vector<double>> relative_errors;
};

// Compares backpropagation against central finite differences of the mean
// loss. Relative error is |a - n| / max(|a|, |n|, floor).
GradientReport CheckGradients(std::span<const NetworkParams> networks,
                              const TrainingData& data,
                              std::span<const std::size_t> indices,
                              const Objective& objective, double step = 1e-5,
                              double floor = 1e-7);

}  // namespace dfpricing

#endif  // DFPRICING_OBJECTIVE_H_
