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
#include <random>
#include <vector>

#include "doctest.h"
#include "dfpricing/error.h"
#include "dfpricing/model_io.h"
#include "dfpricing/network.h"

namespace dfpricing {
namespace {

NetworkSpec Spec(std::size_t input, std::vector<std::size_t> hidden,
                 std::size_t price, std::size_t classes = 0) {
  NetworkSpec s;
  s.input_dim = input;
  s.hidden_dims = std::move(hidden);
  s.num_price_heads = price;
  s.num_class_heads = classes;
  return s;
}

// Straightforward loop re-evaluation of the affine + ReLU chain, reading
// parameters straight from the flat buffer layout.
std::vector<double> ReferenceRepresentation(const NetworkParams& params,
                                            const std::vector<double>& x) {
  const auto values = params.values();
  std::size_t offset = 0;
  std::vector<double> a = x;
  for (std::size_t q : params.spec().hidden_dims) {
    const std::size_t fan_in = a.size();
    std::vector<double> out(q);
    for (std::size_t r = 0; r < q; ++r) {
      double s = 0.0;
      for (std::size_t c = 0; c < fan_in; ++c) {
        s += values[offset + r * fan_in + c] * a[c];
      }
      s += values[offset + q * fan_in + r];
      out[r] = s > 0.0 ? s : 0.0;
    }
    offset += (fan_in + 1) * q;
    a = std::move(out);
  }
  return a;
}

TEST_CASE("parameter counts match the stated architectures") {
  CHECK(Spec(3, {20, 15, 10}, 1).ParameterCount() == 566);
  CHECK(Spec(2, {20, 15, 10}, 2).ParameterCount() == 557);
  CHECK(Spec(2, {20, 15, 10}, 0, 2).ParameterCount() == 557);
  CHECK(NetworkParams(Spec(3, {20, 15, 10}, 1)).size() == 566);
  CHECK(Spec(4, {3}, 2, 3).ParameterCount() == 5 * 3 + 4 * 5);
}

TEST_CASE("NetworkSpec validation") {
  CHECK_THROWS_AS(Spec(2, {}, 1).Validate(), Error);
  CHECK_THROWS_AS(Spec(2, {4, 0}, 1).Validate(), Error);
  CHECK_THROWS_AS(Spec(0, {4}, 1).Validate(), Error);
  CHECK_THROWS_AS(Spec(2, {4}, 0, 0).Validate(), Error);
  CHECK_THROWS_AS(Spec(2, {4}, 0, 1).Validate(), Error);
}

TEST_CASE("zero network maps to the zero representation") {
  NetworkParams params(Spec(3, {20, 15, 10}, 1));
  const std::vector<double> x{0.3, -1.2, 5.0};
  const Eigen::VectorXd z = ForwardRepresentation(params, x);
  CHECK(z.size() == 10);
  CHECK(z.isZero(0.0));
}

TEST_CASE("identity layer passes non-negative inputs through") {
  NetworkParams params(Spec(3, {3}, 1));
  params.weights(0).setIdentity();
  const std::vector<double> x{0.0, 1.5, 2.25};
  const Eigen::VectorXd z = ForwardRepresentation(params, x);
  for (int i = 0; i < 3; ++i) CHECK(z(i) == x[static_cast<std::size_t>(i)]);
}

TEST_CASE("forward pass agrees with a loop re-implementation") {
  const NetworkParams params = InitializeGlorot(Spec(3, {20, 15, 10}, 2), 99);
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<double> x{u(gen), u(gen), u(gen)};
    const Eigen::VectorXd z = ForwardRepresentation(params, x);
    const std::vector<double> ref = ReferenceRepresentation(params, x);
    for (std::size_t i = 0; i < ref.size(); ++i) {
      CHECK(std::abs(z(static_cast<Eigen::Index>(i)) - ref[i]) < 1e-12);
    }
  }
}

TEST_CASE("forward rejects wrong input length") {
  NetworkParams params(Spec(3, {4}, 1));
  const std::vector<double> x{1.0, 2.0};
  CHECK_THROWS_AS(ForwardRepresentation(params, x), Error);
}

TEST_CASE("heads") {
  NetworkParams params = InitializeGlorot(Spec(2, {5, 4}, 1, 2), 3);
  const std::vector<double> x{0.2, 1.0};

  SUBCASE("bias-only price readout under the log link") {
    params.price_readout(0).setZero();
    params.price_readout(0)(0) = std::log(0.5);
    CHECK(PredictHead(params, x, HeadSelector::Price(0))[0] ==
          doctest::Approx(0.5).epsilon(1e-15));
  }
  SUBCASE("equal class readouts give uniform probabilities") {
    params.class_readout(0) = params.class_readout(1);
    const auto p = PredictHead(params, x, HeadSelector::Class());
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(0.5));
  }
  SUBCASE("softmax of logits (1, 0)") {
    const std::vector<double> logits{1.0, 0.0};
    const auto p = Softmax(logits);
    CHECK(p[0] == doctest::Approx(0.731059).epsilon(1e-6));
    CHECK(p[1] == doctest::Approx(0.268941).epsilon(1e-6));
  }
  SUBCASE("invalid head index") {
    CHECK_THROWS_AS(PredictHead(params, x, HeadSelector::Price(1)), Error);
  }
}

TEST_CASE("softmax and price heads stay in range for random parameters") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const NetworkParams params = InitializeGlorot(Spec(2, {6, 4}, 2, 3), seed);
    const std::vector<double> x{u(gen), u(gen)};
    const auto p = PredictHead(params, x, HeadSelector::Class());
    double total = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
      total += v;
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
    CHECK(PredictHead(params, x, HeadSelector::Price(1))[0] > 0.0);
  }
}

TEST_CASE("forward batch flags the first non-finite layer") {
  NetworkParams params = InitializeGlorot(Spec(2, {3, 3}, 1), 1);
  params.bias(1)(0) = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd inputs = Eigen::MatrixXd::Ones(2, 4);
  ForwardCache cache;
  try {
    ForwardBatch(params, inputs, cache);
    FAIL("expected a numeric error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kNumeric);
    CHECK(e.context() == "hidden layer 2");
  }
}

TEST_CASE("network JSON round trip is bit-exact") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const NetworkParams params = InitializeGlorot(Spec(3, {7, 5}, 2, 2), seed);
    const nlohmann::json j = NetworkToJson(params);
    const NetworkParams back =
        NetworkFromJson(nlohmann::json::parse(j.dump()));
    CHECK(back.spec() == params.spec());
    const auto a = params.values();
    const auto b = back.values();
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

}  // namespace
}  // namespace dfpricing
