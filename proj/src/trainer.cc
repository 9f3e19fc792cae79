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

#include "dfpricing/trainer.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "dfpricing/error.h"
#include "dfpricing/parallel.h"
#include "dfpricing/rng.h"

namespace dfpricing {

namespace {

constexpr std::uint64_t kSplitStream = 0x5311;
constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kShuffleStream = 0x5a0f;
constexpr std::size_t kEvalChunk = 2048;

double MeanLoss(ObjectiveEvaluator& evaluator,
                std::span<const NetworkParams> networks,
                const TrainingData& data, std::span<const std::size_t> indices) {
  double total = 0.0;
  for (std::size_t start = 0; start < indices.size(); start += kEvalChunk) {
    const auto chunk =
        indices.subspan(start, std::min(kEvalChunk, indices.size() - start));
    total += evaluator.Loss(networks, data, chunk) *
             static_cast<double>(chunk.size());
  }
  return total / static_cast<double>(indices.size());
}

void InitializeIntercepts(std::vector<NetworkParams>& networks,
                          const TrainingData& data,
                          std::span<const std::size_t> train) {
  double sum = 0.0;
  for (std::size_t i : train) sum += data.response[i];
  const double mean = sum / static_cast<double>(train.size());
  if (!(mean > 0.0)) return;
  for (NetworkParams& net : networks) {
    for (std::size_t k = 0; k < net.spec().num_price_heads; ++k) {
      net.price_readout(k)(0) = std::log(mean);
    }
  }
}

}  // namespace

void TrainConfig::Validate() const {
  if (batch_size < 1) Fail(ErrorCode::kConfig, "must be >= 1", "training.batch_size");
  if (max_epochs < 1) Fail(ErrorCode::kConfig, "must be >= 1", "training.max_epochs");
  if (patience < 1) Fail(ErrorCode::kConfig, "must be >= 1", "training.patience");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    Fail(ErrorCode::kConfig, "must lie in (0, 1)",
         "training.validation_fraction");
  }
  if (ensemble_size < 1) Fail(ErrorCode::kConfig, "must be >= 1", "training.ensemble_size");
  nadam.Validate();
}

DataSplit SplitData(std::size_t n, double validation_fraction,
                    std::uint64_t seed) {
  if (n < 2) Fail(ErrorCode::kInvalidInput, "need at least two records to split");
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 engine(MixSeed(seed, kSplitStream));
  std::shuffle(order.begin(), order.end(), engine);
  auto held_out = static_cast<std::size_t>(
      std::llround(validation_fraction * static_cast<double>(n)));
  held_out = std::clamp<std::size_t>(held_out, 1, n - 1);
  DataSplit split;
  split.train.assign(order.begin(), order.end() - held_out);
  split.validation.assign(order.end() - held_out, order.end());
  return split;
}

FittedNetwork Train(std::span<const NetworkSpec> specs,
                    const TrainingData& data, const Objective& objective,
                    const TrainConfig& config, std::size_t member_index,
                    const EpochCallback& on_epoch) {
  config.Validate();
  data.Validate(objective);
  if (specs.size() != objective.network_count()) {
    Fail(ErrorCode::kInvalidInput, "wrong number of network specs");
  }
  for (const NetworkSpec& spec : specs) {
    if (spec.input_dim != data.input_dim) {
      Fail(ErrorCode::kInvalidInput, "network input_dim does not match data");
    }
  }

  const DataSplit split =
      SplitData(data.size(), config.validation_fraction, config.seed);
  const std::uint64_t member_seed = MixSeed(config.seed, member_index);

  FittedNetwork fitted;
  fitted.objective = objective;
  fitted.init_seed = MixSeed(member_seed, kInitStream);
  for (std::size_t n = 0; n < specs.size(); ++n) {
    fitted.networks.push_back(
        InitializeGlorot(specs[n], MixSeed(fitted.init_seed, n)));
  }
  InitializeIntercepts(fitted.networks, data, split.train);

  std::vector<NetworkParams> current = fitted.networks;
  std::vector<NetworkParams> grads = fitted.networks;
  std::vector<NadamOptimizer> optimizers;
  for (const NetworkParams& net : current) {
    optimizers.emplace_back(config.nadam, net.size());
  }

  ObjectiveEvaluator evaluator(objective);
  SplitMix64 shuffle_engine(MixSeed(member_seed, kShuffleStream));
  std::vector<std::size_t> order = split.train;
  double best = std::numeric_limits<double>::infinity();
  std::size_t since_best = 0;

  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_engine);
    EpochRecord record;
    record.epoch = epoch;
    try {
      double loss_sum = 0.0;
      std::size_t batches = 0;
      for (std::size_t start = 0; start < order.size();
           start += config.batch_size) {
        const auto batch = std::span<const std::size_t>(order).subspan(
            start, std::min(config.batch_size, order.size() - start));
        loss_sum += evaluator.Gradients(current, data, batch, grads);
        ++batches;
        for (std::size_t n = 0; n < current.size(); ++n) {
          optimizers[n].Step(current[n].values(), grads[n].values());
        }
      }
      record.train_loss = loss_sum / static_cast<double>(batches);
      record.validation_loss =
          MeanLoss(evaluator, current, data, split.validation);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNumeric) throw;
      Fail(ErrorCode::kTraining,
           std::string("training diverged: ") + e.what(),
           "epoch " + std::to_string(epoch));
    }
    if (!std::isfinite(record.train_loss) ||
        !std::isfinite(record.validation_loss)) {
      Fail(ErrorCode::kTraining, "training diverged: non-finite loss",
           "epoch " + std::to_string(epoch));
    }
    if (record.validation_loss < best) {
      best = record.validation_loss;
      fitted.networks = current;
      fitted.history.best_epoch = epoch;
      since_best = 0;
    } else {
      ++since_best;
    }
    record.best_validation_loss = best;
    fitted.history.epochs.push_back(record);
    if (on_epoch) on_epoch(record, current);
    if (since_best >= config.patience) {
      fitted.history.stopped_early = true;
      break;
    }
  }
  fitted.best_validation_loss = best;
  return fitted;
}

std::vector<FittedNetwork> TrainEnsemble(std::span<const NetworkSpec> specs,
                                         const TrainingData& data,
                                         const Objective& objective,
                                         const TrainConfig& config,
                                         std::size_t jobs) {
  config.Validate();
  std::vector<std::vector<FittedNetwork>> slots(config.ensemble_size);
  ParallelFor(config.ensemble_size, jobs, [&](std::size_t m) {
    slots[m].push_back(Train(specs, data, objective, config, m));
  });
  std::vector<FittedNetwork> members;
  members.reserve(slots.size());
  for (auto& slot : slots) members.push_back(std::move(slot.front()));
  return members;
}

NaggingEnsemble::NaggingEnsemble(std::vector<FittedNetwork> members)
    : members_(std::move(members)) {
  if (members_.empty()) {
    Fail(ErrorCode::kInvalidInput, "nagging ensemble needs at least one member");
  }
  const FittedNetwork& first = members_.front();
  for (const FittedNetwork& m : members_) {
    if (m.networks.size() != first.networks.size()) {
      Fail(ErrorCode::kInvalidInput, "ensemble members differ in layout");
    }
    for (std::size_t n = 0; n < m.networks.size(); ++n) {
      if (m.networks[n].spec() != first.networks[n].spec()) {
        Fail(ErrorCode::kInvalidInput, "ensemble members differ in layout");
      }
    }
  }
  for (std::size_t n = 0; n < first.networks.size(); ++n) {
    if (first.networks[n].spec().num_class_heads > 0 && !has_class_) {
      class_network_ = n;
      has_class_ = true;
    }
  }
  for (std::size_t n = first.networks.size(); n-- > 0;) {
    if (first.networks[n].spec().num_price_heads > 0) price_network_ = n;
  }
}

std::size_t NaggingEnsemble::num_price_heads() const {
  return members_.front().networks[price_network_].spec().num_price_heads;
}

std::size_t NaggingEnsemble::num_class_heads() const {
  return has_class_
             ? members_.front().networks[class_network_].spec().num_class_heads
             : 0;
}

double NaggingEnsemble::PredictPrice(std::span<const double> x,
                                     std::size_t head) const {
  if (head >= num_price_heads()) {
    Fail(ErrorCode::kInvalidInput, "price head index out of range");
  }
  double sum = 0.0;
  for (const FittedNetwork& m : members_) {
    const NetworkParams& net = m.networks[price_network_];
    sum += PriceFromRepresentation(net, head, ForwardRepresentation(net, x));
  }
  return sum / static_cast<double>(members_.size());
}

std::vector<double> NaggingEnsemble::PredictPrices(
    std::span<const double> x) const {
  std::vector<double> out(num_price_heads(), 0.0);
  for (const FittedNetwork& m : members_) {
    const NetworkParams& net = m.networks[price_network_];
    const Eigen::VectorXd z = ForwardRepresentation(net, x);
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += PriceFromRepresentation(net, k, z);
    }
  }
  for (double& v : out) v /= static_cast<double>(members_.size());
  return out;
}

std::vector<double> NaggingEnsemble::PredictClass(
    std::span<const double> x) const {
  if (!has_class_) Fail(ErrorCode::kInvalidInput, "ensemble has no class head");
  std::vector<double> out(num_class_heads(), 0.0);
  for (const FittedNetwork& m : members_) {
    const NetworkParams& net = m.networks[class_network_];
    const auto p = ClassFromRepresentation(net, ForwardRepresentation(net, x));
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += p[k];
  }
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& v : out) v /= total;
  return out;
}

}  // namespace dfpricing
