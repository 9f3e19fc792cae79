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

#ifndef DFPRICING_NETWORK_H_
#define DFPRICING_NETWORK_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

namespace dfpricing {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMajorMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMajorMatrix>;
using VectorMap = Eigen::Map<Eigen::VectorXd>;
using ConstVectorMap = Eigen::Map<const Eigen::VectorXd>;

enum class Activation { kRelu };
enum class Link { kLog };

// Dense feed-forward architecture: `hidden_dims` ReLU layers followed by
// `num_price_heads` log-link readouts and, optionally, one softmax classifier
// with `num_class_heads` classes. Every readout acts on (1, z) where z is the
// last hidden layer.
struct NetworkSpec {
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_dims;
  Activation activation = Activation::kRelu;
  std::size_t num_price_heads = 0;
  std::size_t num_class_heads = 0;
  Link link = Link::kLog;

  // Throws kInvalidInput on an empty or zero-width layer, no heads at all,
  // or a single-class classifier.
  void Validate() const;

  std::size_t representation_dim() const { return hidden_dims.back(); }
  std::size_t depth() const { return hidden_dims.size(); }

  // Sum over hidden layers of (q_{j-1} + 1) q_j, plus q_m + 1 per readout.
  std::size_t ParameterCount() const;

  friend bool operator==(const NetworkSpec&, const NetworkSpec&) = default;
};

// Trainable parameters stored in one contiguous buffer. Layout: for each
// hidden layer a row-major (q_j x q_{j-1}) weight block then q_j biases;
// then the price readouts, then the class readouts, each of length q_m + 1
// with the intercept first. A gradient uses the same type and layout.
class NetworkParams {
 public:
  explicit NetworkParams(NetworkSpec spec);

  const NetworkSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  MatrixMap weights(std::size_t layer);
  ConstMatrixMap weights(std::size_t layer) const;
  VectorMap bias(std::size_t layer);
  ConstVectorMap bias(std::size_t layer) const;
  VectorMap price_readout(std::size_t head);
  ConstVectorMap price_readout(std::size_t head) const;
  VectorMap class_readout(std::size_t head);
  ConstVectorMap class_readout(std::size_t head) const;

  void SetZero();
  bool AllFinite() const;

 private:
  NetworkSpec spec_;
  std::vector<double> values_;
  std::vector<std::size_t> layer_offsets_;
  std::size_t price_offset_ = 0;
  std::size_t class_offset_ = 0;
};

// Glorot-uniform weights, zero biases and intercepts.
NetworkParams InitializeGlorot(const NetworkSpec& spec, std::uint64_t seed);

// z^(m:1)(x): the composition of all hidden layers.
Eigen::VectorXd ForwardRepresentation(const NetworkParams& params,
                                      std::span<const double> x);

struct HeadSelector {
  enum class Kind { kPrice, kClass };
  Kind kind = Kind::kPrice;
  std::size_t index = 0;

  static HeadSelector Price(std::size_t k) { return {Kind::kPrice, k}; }
  static HeadSelector Class() { return {Kind::kClass, 0}; }
};

// Price heads return a single positive value exp<beta_k, (1, z)>; the class
// head returns the softmax probability vector.
std::vector<double> PredictHead(const NetworkParams& params,
                                std::span<const double> x, HeadSelector head);

double PriceFromRepresentation(const NetworkParams& params, std::size_t head,
                               const Eigen::VectorXd& z);
std::vector<double> ClassFromRepresentation(const NetworkParams& params,
                                            const Eigen::VectorXd& z);

// Numerically stable softmax.
std::vector<double> Softmax(std::span<const double> logits);

// Column-major batch evaluation used by training. Columns are records.
struct ForwardCache {
  // activations[0] is the input; activations[j] the output of hidden layer j.
  std::vector<Eigen::MatrixXd> activations;
  Eigen::MatrixXd price_logits;  // num_price_heads x batch
  Eigen::MatrixXd class_logits;  // num_class_heads x batch
};

// Throws kNumeric, naming the layer, if any intermediate is non-finite.
void ForwardBatch(const NetworkParams& params, const Eigen::MatrixXd& inputs,
                  ForwardCache& cache);

// Accumulates into `grad` the gradient given upstream derivatives of the
// loss with respect to the price and class logits.
void BackwardBatch(const NetworkParams& params, const ForwardCache& cache,
                   const Eigen::MatrixXd& d_price_logits,
                   const Eigen::MatrixXd& d_class_logits,
                   NetworkParams& grad);

}  // namespace dfpricing

#endif  // DFPRICING_NETWORK_H_
