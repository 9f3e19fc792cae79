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
#include "dfpricing/nadam.h"
#include "dfpricing/trainer.h"
#include "test_support.h"

namespace dfpricing {
namespace {

using testing::RandomData;

TEST_CASE("first Nadam step follows the scheduled-momentum formula") {
  NadamConfig config;
  NadamOptimizer opt(config, 3);
  std::vector<double> theta{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -1.5, 0.0};
  opt.Step(theta, g);

  const double mt = 0.9 * (1.0 - 0.5 * std::pow(0.96, 0.004));
  const double mn = 0.9 * (1.0 - 0.5 * std::pow(0.96, 0.008));
  const std::vector<double> start{1.0, -2.0, 0.5};
  for (std::size_t j = 0; j < 3; ++j) {
    const double m_hat = 0.1 * g[j] / (1.0 - mt * mn);
    const double v_hat = 0.001 * g[j] * g[j] / 0.001;
    const double m_bar = g[j] + mn * m_hat;
    const double expected =
        start[j] - 0.002 * m_bar / (std::sqrt(v_hat) + 1e-7);
    CHECK(theta[j] == doctest::Approx(expected).epsilon(1e-14));
  }
  CHECK(opt.iterations() == 1);
}

TEST_CASE("Nadam minimises a quadratic") {
  NadamConfig config;
  config.step = 0.01;
  NadamOptimizer opt(config, 2);
  std::vector<double> theta{3.0, -1.0};
  for (int it = 0; it < 5000; ++it) {
    const std::vector<double> g{2.0 * (theta[0] - 1.0),
                                20.0 * (theta[1] + 0.5)};
    opt.Step(theta, g);
  }
  CHECK(theta[0] == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(theta[1] == doctest::Approx(-0.5).epsilon(1e-3));
  std::vector<double> wrong(3);
  CHECK_THROWS_AS(opt.Step(wrong, wrong), Error);
  config.beta1 = 1.0;
  CHECK_THROWS_AS(NadamOptimizer(config, 1), Error);
}

TEST_CASE("split is a seeded partition") {
  const DataSplit a = SplitData(1000, 0.2, 7);
  const DataSplit b = SplitData(1000, 0.2, 7);
  CHECK(a.train == b.train);
  CHECK(a.validation.size() == 200);
  std::vector<int> seen(1000, 0);
  for (auto i : a.train) ++seen[i];
  for (auto i : a.validation) ++seen[i];
  for (int s : seen) CHECK(s == 1);
  CHECK(SplitData(1000, 0.2, 8).validation != a.validation);
}

TrainConfig SmallConfig() {
  TrainConfig config;
  config.max_epochs = 30;
  config.patience = 5;
  config.ensemble_size = 3;
  return config;
}

TEST_CASE("constant response is recovered") {
  TrainingData data = RandomData(1500, 2, 3, false);
  for (double& y : data.response) y = 0.35;
  Objective objective;
  const auto specs = objective.NetworkSpecs(2, std::vector<std::size_t>{8, 4});
  const FittedNetwork fit = Train(specs, data, objective, SmallConfig());
  for (std::size_t i = 0; i < 50; ++i) {
    const double mu =
        PredictHead(fit.networks[0], data.row(i), HeadSelector::Price(0))[0];
    CHECK(mu == doctest::Approx(0.35).epsilon(0.01));
  }
}

TEST_CASE("training is deterministic and independent of the job count") {
  const TrainingData data = RandomData(600, 2, 4, true);
  Objective objective;
  objective.kind = ObjectiveKind::kMultiTaskY;
  objective.num_levels = 2;
  const auto specs = objective.NetworkSpecs(2, std::vector<std::size_t>{5, 3});
  const TrainConfig config = SmallConfig();
  const auto serial = TrainEnsemble(specs, data, objective, config, 1);
  const auto threaded = TrainEnsemble(specs, data, objective, config, 3);
  REQUIRE(serial.size() == 3);
  for (std::size_t m = 0; m < serial.size(); ++m) {
    for (std::size_t n = 0; n < 2; ++n) {
      const auto a = serial[m].networks[n].values();
      const auto b = threaded[m].networks[n].values();
      CHECK(std::equal(a.begin(), a.end(), b.begin(), b.end()));
    }
  }
  CHECK(serial[0].init_seed != serial[1].init_seed);
}

TEST_CASE("early stopping restores the best validation parameters") {
  const TrainingData data = RandomData(400, 2, 5, false);
  Objective objective;
  const auto specs = objective.NetworkSpecs(2, std::vector<std::size_t>{6});
  TrainConfig config = SmallConfig();
  config.max_epochs = 200;
  config.patience = 3;
  std::vector<std::vector<double>> snapshots;
  const FittedNetwork fit =
      Train(specs, data, objective, config, 0,
            [&](const EpochRecord&, std::span<const NetworkParams> nets) {
              snapshots.emplace_back(nets[0].values().begin(),
                                     nets[0].values().end());
            });
  const TrainHistory& h = fit.history;
  REQUIRE(h.epochs_run() == snapshots.size());
  REQUIRE(h.best_epoch >= 1);  // epochs are numbered from 1
  double best = h.epochs[0].validation_loss;
  for (const EpochRecord& e : h.epochs) {
    best = std::min(best, e.validation_loss);
    CHECK(e.best_validation_loss == best);
  }
  CHECK(fit.best_validation_loss == best);
  CHECK(h.epochs[h.best_epoch - 1].validation_loss == best);
  if (h.stopped_early) {
    CHECK(h.epochs_run() == h.best_epoch + config.patience);
  }
  const auto restored = fit.networks[0].values();
  CHECK(std::equal(restored.begin(), restored.end(),
                   snapshots[h.best_epoch - 1].begin()));
}

TEST_CASE("divergence is reported as a training error with the epoch") {
  TrainingData data = RandomData(200, 2, 6, false);
  Objective objective;
  const auto specs = objective.NetworkSpecs(2, std::vector<std::size_t>{4});
  TrainConfig config = SmallConfig();
  config.nadam.step = 1e6;
  try {
    Train(specs, data, objective, config);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kTraining);
    CHECK(e.context().find("epoch") != std::string::npos);
  }
}

FittedNetwork ConstantMember(const NetworkSpec& spec, double mu) {
  FittedNetwork f;
  f.objective.kind = ObjectiveKind::kMultiOutput;
  f.objective.num_levels = spec.num_price_heads;
  NetworkParams p(spec);
  for (std::size_t k = 0; k < spec.num_price_heads; ++k) {
    p.price_readout(k)(0) = std::log(mu);
  }
  f.networks.push_back(std::move(p));
  return f;
}

TEST_CASE("nagging averages member predictions") {
  NetworkSpec spec;
  spec.input_dim = 2;
  spec.hidden_dims = {3};
  spec.num_price_heads = 2;
  const std::vector<double> x{0.2, -0.4};

  NaggingEnsemble pair({ConstantMember(spec, 0.4), ConstantMember(spec, 0.6)});
  CHECK(pair.PredictPrice(x, 1) == doctest::Approx(0.5).epsilon(1e-15));

  const FittedNetwork one = ConstantMember(spec, 0.37);
  NaggingEnsemble copies({one, one, one});
  NaggingEnsemble single({one});
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(copies.PredictPrice(x, k) ==
          doctest::Approx(single.PredictPrice(x, k)).epsilon(1e-15));
  }

  CHECK_THROWS_AS(NaggingEnsemble({}), Error);
  NetworkSpec other = spec;
  other.hidden_dims = {4};
  CHECK_THROWS_AS(NaggingEnsemble({one, ConstantMember(other, 0.3)}), Error);
}

TEST_CASE("training configuration validation") {
  TrainConfig config;
  config.batch_size = 0;
  CHECK_THROWS_AS(config.Validate(), Error);
  config = TrainConfig{};
  config.validation_fraction = 1.0;
  CHECK_THROWS_AS(config.Validate(), Error);
}

}  // namespace
}  // namespace dfpricing
