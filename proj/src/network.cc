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

#include "dfpricing/network.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "dfpricing/error.h"
#include "dfpricing/rng.h"

namespace dfpricing {

void NetworkSpec::Validate() const {
  if (input_dim == 0) Fail(ErrorCode::kInvalidInput, "input_dim must be >= 1");
  if (hidden_dims.empty()) {
    Fail(ErrorCode::kInvalidInput, "hidden_dims must be non-empty");
  }
  for (std::size_t q : hidden_dims) {
    if (q == 0) Fail(ErrorCode::kInvalidInput, "hidden layer width must be >= 1");
  }
  if (num_price_heads == 0 && num_class_heads == 0) {
    Fail(ErrorCode::kInvalidInput, "network has no readout heads");
  }
  if (num_class_heads == 1) {
    Fail(ErrorCode::kInvalidInput, "a classifier needs at least two classes");
  }
}

std::size_t NetworkSpec::ParameterCount() const {
  std::size_t total = 0;
  std::size_t fan_in = input_dim;
  for (std::size_t q : hidden_dims) {
    total += (fan_in + 1) * q;
    fan_in = q;
  }
  total += (fan_in + 1) * (num_price_heads + num_class_heads);
  return total;
}

NetworkParams::NetworkParams(NetworkSpec spec) : spec_(std::move(spec)) {
  spec_.Validate();
  std::size_t offset = 0;
  std::size_t fan_in = spec_.input_dim;
  for (std::size_t q : spec_.hidden_dims) {
    layer_offsets_.push_back(offset);
    offset += (fan_in + 1) * q;
    fan_in = q;
  }
  price_offset_ = offset;
  offset += (fan_in + 1) * spec_.num_price_heads;
  class_offset_ = offset;
  offset += (fan_in + 1) * spec_.num_class_heads;
  values_.assign(offset, 0.0);
}

namespace {

std::size_t FanIn(const NetworkSpec& spec, std::size_t layer) {
  return layer == 0 ? spec.input_dim : spec.hidden_dims[layer - 1];
}

void CheckLayer(const NetworkSpec& spec, std::size_t layer) {
  if (layer >= spec.depth()) {
    Fail(ErrorCode::kInvalidInput, "hidden layer index out of range");
  }
}

void CheckFinite(const Eigen::MatrixXd& m, const std::string& what) {
  if (!m.allFinite()) {
    Fail(ErrorCode::kNumeric, "non-finite value in forward pass", what);
  }
}

}  // namespace

MatrixMap NetworkParams::weights(std::size_t layer) {
  CheckLayer(spec_, layer);
  return MatrixMap(values_.data() + layer_offsets_[layer],
                   spec_.hidden_dims[layer], FanIn(spec_, layer));
}

ConstMatrixMap NetworkParams::weights(std::size_t layer) const {
  CheckLayer(spec_, layer);
  return ConstMatrixMap(values_.data() + layer_offsets_[layer],
                        spec_.hidden_dims[layer], FanIn(spec_, layer));
}

VectorMap NetworkParams::bias(std::size_t layer) {
  CheckLayer(spec_, layer);
  const std::size_t q = spec_.hidden_dims[layer];
  return VectorMap(values_.data() + layer_offsets_[layer] +
                       q * FanIn(spec_, layer),
                   q);
}

ConstVectorMap NetworkParams::bias(std::size_t layer) const {
  CheckLayer(spec_, layer);
  const std::size_t q = spec_.hidden_dims[layer];
  return ConstVectorMap(values_.data() + layer_offsets_[layer] +
                            q * FanIn(spec_, layer),
                        q);
}

VectorMap NetworkParams::price_readout(std::size_t head) {
  if (head >= spec_.num_price_heads) {
    Fail(ErrorCode::kInvalidInput, "price head index out of range");
  }
  const std::size_t len = spec_.representation_dim() + 1;
  return VectorMap(values_.data() + price_offset_ + head * len, len);
}

ConstVectorMap NetworkParams::price_readout(std::size_t head) const {
  if (head >= spec_.num_price_heads) {
    Fail(ErrorCode::kInvalidInput, "price head index out of range");
  }
  const std::size_t len = spec_.representation_dim() + 1;
  return ConstVectorMap(values_.data() + price_offset_ + head * len, len);
}

VectorMap NetworkParams::class_readout(std::size_t head) {
  if (head >= spec_.num_class_heads) {
    Fail(ErrorCode::kInvalidInput, "class head index out of range");
  }
  const std::size_t len = spec_.representation_dim() + 1;
  return VectorMap(values_.data() + class_offset_ + head * len, len);
}

ConstVectorMap NetworkParams::class_readout(std::size_t head) const {
  if (head >= spec_.num_class_heads) {
    Fail(ErrorCode::kInvalidInput, "class head index out of range");
  }
  const std::size_t len = spec_.representation_dim() + 1;
  return ConstVectorMap(values_.data() + class_offset_ + head * len, len);
}

void NetworkParams::SetZero() { std::fill(values_.begin(), values_.end(), 0.0); }

bool NetworkParams::AllFinite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

NetworkParams InitializeGlorot(const NetworkSpec& spec, std::uint64_t seed) {
  NetworkParams params(spec);
  SplitMix64 engine(seed);
  auto fill = [&engine](auto&& block, std::size_t fan_in, std::size_t fan_out) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index r = 0; r < block.rows(); ++r) {
      for (Eigen::Index c = 0; c < block.cols(); ++c) {
        block(r, c) = limit * (2.0 * UniformUnit(engine) - 1.0);
      }
    }
  };
  for (std::size_t layer = 0; layer < spec.depth(); ++layer) {
    auto w = params.weights(layer);
    fill(w, FanIn(spec, layer), spec.hidden_dims[layer]);
  }
  const std::size_t q = spec.representation_dim();
  for (std::size_t k = 0; k < spec.num_price_heads; ++k) {
    auto beta = params.price_readout(k).tail(q);
    fill(beta, q, spec.num_price_heads);
  }
  for (std::size_t k = 0; k < spec.num_class_heads; ++k) {
    auto alpha = params.class_readout(k).tail(q);
    fill(alpha, q, spec.num_class_heads);
  }
  return params;
}

Eigen::VectorXd ForwardRepresentation(const NetworkParams& params,
                                      std::span<const double> x) {
  const NetworkSpec& spec = params.spec();
  if (x.size() != spec.input_dim) {
    Fail(ErrorCode::kInvalidInput,
         "feature vector has length " + std::to_string(x.size()) +
             ", network expects " + std::to_string(spec.input_dim));
  }
  Eigen::VectorXd a = ConstVectorMap(x.data(), x.size());
  for (std::size_t layer = 0; layer < spec.depth(); ++layer) {
    a = (params.weights(layer) * a + params.bias(layer)).cwiseMax(0.0);
  }
  return a;
}

double PriceFromRepresentation(const NetworkParams& params, std::size_t head,
                               const Eigen::VectorXd& z) {
  const auto beta = params.price_readout(head);
  return std::exp(beta(0) + beta.tail(z.size()).dot(z));
}

std::vector<double> Softmax(std::span<const double> logits) {
  const double top = *std::max_element(logits.begin(), logits.end());
  std::vector<double> p(logits.size());
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    p[k] = std::exp(logits[k] - top);
    total += p[k];
  }
  for (double& v : p) v /= total;
  return p;
}

std::vector<double> ClassFromRepresentation(const NetworkParams& params,
                                            const Eigen::VectorXd& z) {
  const std::size_t k_count = params.spec().num_class_heads;
  if (k_count == 0) Fail(ErrorCode::kInvalidInput, "network has no class head");
  std::vector<double> logits(k_count);
  for (std::size_t k = 0; k < k_count; ++k) {
    const auto alpha = params.class_readout(k);
    logits[k] = alpha(0) + alpha.tail(z.size()).dot(z);
  }
  return Softmax(logits);
}

std::vector<double> PredictHead(const NetworkParams& params,
                                std::span<const double> x, HeadSelector head) {
  const Eigen::VectorXd z = ForwardRepresentation(params, x);
  if (head.kind == HeadSelector::Kind::kPrice) {
    return {PriceFromRepresentation(params, head.index, z)};
  }
  return ClassFromRepresentation(params, z);
}

void ForwardBatch(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                  ForwardCache& cache) {
  const NetworkSpec& spec = params.spec();
  if (static_cast<std::size_t>(inputs.rows()) != spec.input_dim) {
    Fail(ErrorCode::kInvalidInput, "batch input dimension mismatch");
  }
  cache.activations.resize(spec.depth() + 1);
  cache.activations[0] = inputs;
  for (std::size_t layer = 0; layer < spec.depth(); ++layer) {
    Eigen::MatrixXd& out = cache.activations[layer + 1];
    out.noalias() = params.weights(layer) * cache.activations[layer];
    out.colwise() += params.bias(layer);
    CheckFinite(out, "hidden layer " + std::to_string(layer + 1));
    out = out.cwiseMax(0.0);
  }
  const Eigen::MatrixXd& z = cache.activations.back();
  const Eigen::Index q = static_cast<Eigen::Index>(spec.representation_dim());
  auto readouts = [&](std::size_t count, auto get, Eigen::MatrixXd& logits,
                      const char* what) {
    logits.resize(static_cast<Eigen::Index>(count), z.cols());
    for (std::size_t k = 0; k < count; ++k) {
      const auto r = get(k);
      logits.row(static_cast<Eigen::Index>(k)).noalias() =
          r.tail(q).transpose() * z;
      logits.row(static_cast<Eigen::Index>(k)).array() += r(0);
    }
    CheckFinite(logits, what);
  };
  readouts(
      spec.num_price_heads,
      [&](std::size_t k) { return params.price_readout(k); },
      cache.price_logits, "price readout");
  readouts(
      spec.num_class_heads,
      [&](std::size_t k) { return params.class_readout(k); },
      cache.class_logits, "class readout");
}

void BackwardBatch(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& d_price_logits,
                   const Eigen::MatrixXd& d_class_logits,
                   NetworkParams& grad) {
  const NetworkSpec& spec = params.spec();
  const Eigen::MatrixXd& z = cache.activations.back();
  const Eigen::Index q = static_cast<Eigen::Index>(spec.representation_dim());

  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(q, z.cols());
  for (std::size_t k = 0; k < spec.num_price_heads; ++k) {
    const auto upstream = d_price_logits.row(static_cast<Eigen::Index>(k));
    auto g = grad.price_readout(k);
    g(0) += upstream.sum();
    g.tail(q).noalias() += z * upstream.transpose();
    delta.noalias() += params.price_readout(k).tail(q) * upstream;
  }
  for (std::size_t k = 0; k < spec.num_class_heads; ++k) {
    const auto upstream = d_class_logits.row(static_cast<Eigen::Index>(k));
    auto g = grad.class_readout(k);
    g(0) += upstream.sum();
    g.tail(q).noalias() += z * upstream.transpose();
    delta.noalias() += params.class_readout(k).tail(q) * upstream;
  }

  for (std::size_t layer = spec.depth(); layer-- > 0;) {
    const Eigen::MatrixXd& out = cache.activations[layer + 1];
    delta = (out.array() > 0.0).select(delta, 0.0);
    auto gw = grad.weights(layer);
    gw.noalias() += delta * cache.activations[layer].transpose();
    grad.bias(layer) += delta.rowwise().sum();
    if (layer > 0) {
      Eigen::MatrixXd next = params.weights(layer).transpose() * delta;
      delta.swap(next);
    }
  }
}

}  // namespace dfpricing
