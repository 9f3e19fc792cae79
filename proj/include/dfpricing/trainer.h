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

#ifndef DFPRICING_TRAINER_H_
#define DFPRICING_TRAINER_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dfpricing/nadam.h"
#include "dfpricing/network.h"
#include "dfpricing/objective.h"

namespace dfpricing {

struct TrainConfig {
  std::size_t batch_size = 50;
  std::size_t max_epochs = 500;
  std::size_t patience = 25;
  double validation_fraction = 0.2;
  NadamConfig nadam;
  std::uint64_t seed = 1;
  std::size_t ensemble_size = 10;

  // Throws kConfig.
  void Validate() const;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
  double best_validation_loss = 0.0;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::size_t best_epoch = 0;
  bool stopped_early = false;

  std::size_t epochs_run() const { return epochs.size(); }
};

struct FittedNetwork {
  Objective objective;
  std::vector<NetworkParams> networks;
  std::uint64_t init_seed = 0;
  TrainHistory history;
  double best_validation_loss = 0.0;
};

struct DataSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Seeded uniform shuffle, then the last `validation_fraction` of the
// permutation is held out. Both parts are non-empty.
DataSplit SplitData(std::size_t n, double validation_fraction,
                    std::uint64_t seed);

// Observer invoked after every epoch with the current (not best) parameters.
using EpochCallback =
    std::function<void(const EpochRecord&, std::span<const NetworkParams>)>;

// Mini-batch Nadam with early stopping on the validation loss. The split is
// drawn from `config.seed`; initialization and shuffling from a stream
// derived from (config.seed, member_index). Returns the parameters of the
// best validation epoch. Throws kTraining, with the epoch, on divergence.
FittedNetwork Train(std::span<const NetworkSpec> specs,
                    const TrainingData& data, const Objective& objective,
                    const TrainConfig& config, std::size_t member_index = 0,
                    const EpochCallback& on_epoch = {});

// `config.ensemble_size` members sharing the split and differing in their
// initialization stream. Members train on up to `jobs` threads; the result
// does not depend on `jobs`.
std::vector<FittedNetwork> TrainEnsemble(std::span<const NetworkSpec> specs,
                                         const TrainingData& data,
                                         const Objective& objective,
                                         const TrainConfig& config,
                                         std::size_t jobs = 1);

// Nagging predictor: member predictions averaged on the price scale, and on
// the probability scale (then renormalized) for the classifier.
class NaggingEnsemble {
 public:
  // Throws kInvalidInput for an empty list or members of different layouts.
  explicit NaggingEnsemble(std::vector<FittedNetwork> members);

  std::size_t size() const { return members_.size(); }
  const std::vector<FittedNetwork>& members() const { return members_; }

  std::size_t num_price_heads() const;
  std::size_t num_class_heads() const;

  double PredictPrice(std::span<const double> x, std::size_t head) const;
  std::vector<double> PredictPrices(std::span<const double> x) const;
  std::vector<double> PredictClass(std::span<const double> x) const;

 private:
  std::vector<FittedNetwork> members_;
  std::size_t price_network_ = 0;
  std::size_t class_network_ = 0;
  bool has_class_ = false;
};

}  // namespace dfpricing

#endif  // DFPRICING_TRAINER_H_
