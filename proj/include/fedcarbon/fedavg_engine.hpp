#pragma once

// One-hidden-layer classifier (input -> tanh hidden -> softmax) trained with
// mini-batch SGD + momentum, plus sample-weighted FedAVG aggregation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "fedcarbon/data_partitioner.hpp"
#include "fedcarbon/dataset.hpp"

namespace fedcarbon {

struct ModelDims {
  std::size_t input = 0;
  std::size_t hidden = 0;
  std::size_t classes = 0;

  std::size_t parameter_count() const {
    return hidden * input + hidden + classes * hidden + classes;
  }
  friend bool operator==(const ModelDims&, const ModelDims&) = default;
};

/// All weights in one flat buffer: W1 (hidden x input), b1, W2 (classes x
/// hidden), b2.
class ModelParams {
 public:
  ModelParams() = default;
  explicit ModelParams(ModelDims dims);

  const ModelDims& dims() const { return dims_; }
  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

  std::span<double> w1() { return block(0, dims_.hidden * dims_.input); }
  std::span<double> b1() { return block(w1_end(), dims_.hidden); }
  std::span<double> w2() { return block(b1_end(), dims_.classes * dims_.hidden); }
  std::span<double> b2() { return block(w2_end(), dims_.classes); }
  std::span<const double> w1() const { return block(0, dims_.hidden * dims_.input); }
  std::span<const double> b1() const { return block(w1_end(), dims_.hidden); }
  std::span<const double> w2() const { return block(b1_end(), dims_.classes * dims_.hidden); }
  std::span<const double> b2() const { return block(w2_end(), dims_.classes); }

  bool all_finite() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

 private:
  std::size_t w1_end() const { return dims_.hidden * dims_.input; }
  std::size_t b1_end() const { return w1_end() + dims_.hidden; }
  std::size_t w2_end() const { return b1_end() + dims_.classes * dims_.hidden; }
  std::span<double> block(std::size_t off, std::size_t n) {
    return {values_.data() + off, n};
  }
  std::span<const double> block(std::size_t off, std::size_t n) const {
    return {values_.data() + off, n};
  }

  ModelDims dims_;
  std::vector<double> values_;
};

struct TrainConfig {
  double learning_rate = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  int local_epochs = 1;
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

/// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] per layer, biases included.
ModelParams init_params(ModelDims dims, std::uint64_t seed);

/// Softmax class probabilities, one row per input row.
Matrix forward(const ModelParams& params, const Matrix& inputs);

/// Mean cross-entropy over the listed samples.
double cross_entropy(const ModelParams& params, const Dataset& data,
                     std::span<const std::size_t> indices);

/// Gradient of cross_entropy with respect to every parameter.
ModelParams cross_entropy_gradient(const ModelParams& params,
                                   const Dataset& data,
                                   std::span<const std::size_t> indices);

struct LocalTrainResult {
  ModelParams params;
  std::size_t steps = 0;
};

/// Runs cfg.local_epochs passes over the shard. The momentum buffer starts at
/// zero on every call. Each epoch shuffles the shard with a seed derived from
/// (cfg.seed, epoch); inside a batch samples are visited in index order.
LocalTrainResult local_train(const ModelParams& params, const ClientShard& shard,
                             const Dataset& data, const TrainConfig& cfg);

struct ClientUpdate {
  ModelParams params;
  std::size_t num_samples = 0;
};

ModelParams fedavg_aggregate(std::span<const ClientUpdate> updates);

/// Fraction of samples whose argmax prediction (lowest index on ties) matches
/// the label.
double evaluate_accuracy(const ModelParams& params, const Dataset& test);

}  // namespace fedcarbon
