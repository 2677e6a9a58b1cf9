#include "fedcarbon/fedavg_engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fedcarbon/rng.hpp"

namespace fedcarbon {

ModelParams::ModelParams(ModelDims dims)
    : dims_(dims), values_(dims.parameter_count(), 0.0) {
  if (dims.input == 0 || dims.hidden == 0 || dims.classes < 2) {
    throw std::invalid_argument("model dims must be positive with >= 2 classes");
  }
}

bool ModelParams::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("learning_rate must be finite and >= 0");
  }
  if (!(momentum >= 0.0 && momentum < 1.0)) {
    throw std::invalid_argument("momentum must be in [0, 1)");
  }
  if (batch_size == 0) throw std::invalid_argument("batch_size must be >= 1");
  if (local_epochs < 1) throw std::invalid_argument("local_epochs must be >= 1");
}

ModelParams init_params(ModelDims dims, std::uint64_t seed) {
  ModelParams p(dims);
  Rng rng(derive_seed(seed, 0x1417u));
  const double l1 = 1.0 / std::sqrt(static_cast<double>(dims.input));
  const double l2 = 1.0 / std::sqrt(static_cast<double>(dims.hidden));
  for (auto& v : p.w1()) v = rng.uniform(-l1, l1);
  for (auto& v : p.b1()) v = rng.uniform(-l1, l1);
  for (auto& v : p.w2()) v = rng.uniform(-l2, l2);
  for (auto& v : p.b2()) v = rng.uniform(-l2, l2);
  return p;
}

namespace {

// Hidden activations and softmax output for one sample.
void forward_one(const ModelParams& p, std::span<const double> x,
                 std::span<double> hidden, std::span<double> probs) {
  const auto& d = p.dims();
  const auto w1 = p.w1();
  const auto b1 = p.b1();
  const auto w2 = p.w2();
  const auto b2 = p.b2();
  for (std::size_t h = 0; h < d.hidden; ++h) {
    double z = b1[h];
    const double* row = w1.data() + h * d.input;
    for (std::size_t i = 0; i < d.input; ++i) z += row[i] * x[i];
    hidden[h] = std::tanh(z);
  }
  double max_logit = -INFINITY;
  for (std::size_t k = 0; k < d.classes; ++k) {
    double z = b2[k];
    const double* row = w2.data() + k * d.hidden;
    for (std::size_t h = 0; h < d.hidden; ++h) z += row[h] * hidden[h];
    probs[k] = z;
    max_logit = std::max(max_logit, z);
  }
  double sum = 0.0;
  for (auto& v : probs) {
    v = std::exp(v - max_logit);
    sum += v;
  }
  for (auto& v : probs) v /= sum;
}

void check_data(const ModelParams& p, const Dataset& data) {
  if (data.features.cols != p.dims().input) {
    throw std::invalid_argument("feature dimension does not match the model");
  }
  if (data.features.rows != data.labels.size()) {
    throw std::invalid_argument("feature rows and labels differ in length");
  }
}

// Accumulates the gradient of the summed loss over `indices` into `grad`.
void accumulate_gradient(const ModelParams& p, const Dataset& data,
                         std::span<const std::size_t> indices,
                         ModelParams& grad, std::vector<double>& hidden,
                         std::vector<double>& probs) {
  const auto& d = p.dims();
  const auto w2 = p.w2();
  auto gw1 = grad.w1();
  auto gb1 = grad.b1();
  auto gw2 = grad.w2();
  auto gb2 = grad.b2();
  std::vector<double> dhidden(d.hidden);
  for (std::size_t idx : indices) {
    const auto x = data.features.row(idx);
    forward_one(p, x, hidden, probs);
    const auto label = static_cast<std::size_t>(data.labels[idx]);
    std::fill(dhidden.begin(), dhidden.end(), 0.0);
    for (std::size_t k = 0; k < d.classes; ++k) {
      const double dz = probs[k] - (k == label ? 1.0 : 0.0);
      gb2[k] += dz;
      double* grow = gw2.data() + k * d.hidden;
      const double* wrow = w2.data() + k * d.hidden;
      for (std::size_t h = 0; h < d.hidden; ++h) {
        grow[h] += dz * hidden[h];
        dhidden[h] += dz * wrow[h];
      }
    }
    for (std::size_t h = 0; h < d.hidden; ++h) {
      const double dz = dhidden[h] * (1.0 - hidden[h] * hidden[h]);
      gb1[h] += dz;
      double* grow = gw1.data() + h * d.input;
      for (std::size_t i = 0; i < d.input; ++i) grow[i] += dz * x[i];
    }
  }
}

}  // namespace

Matrix forward(const ModelParams& params, const Matrix& inputs) {
  const auto& d = params.dims();
  if (inputs.cols != d.input) {
    throw std::invalid_argument("input dimension does not match the model");
  }
  Matrix out(inputs.rows, d.classes);
  std::vector<double> hidden(d.hidden);
  for (std::size_t r = 0; r < inputs.rows; ++r) {
    forward_one(params, inputs.row(r), hidden, out.row(r));
  }
  return out;
}

double cross_entropy(const ModelParams& params, const Dataset& data,
                     std::span<const std::size_t> indices) {
  check_data(params, data);
  if (indices.empty()) throw std::invalid_argument("no samples");
  const auto& d = params.dims();
  std::vector<double> hidden(d.hidden), probs(d.classes);
  double total = 0.0;
  for (std::size_t idx : indices) {
    forward_one(params, data.features.row(idx), hidden, probs);
    total -= std::log(probs[static_cast<std::size_t>(data.labels[idx])]);
  }
  return total / static_cast<double>(indices.size());
}

ModelParams cross_entropy_gradient(const ModelParams& params,
                                   const Dataset& data,
                                   std::span<const std::size_t> indices) {
  check_data(params, data);
  if (indices.empty()) throw std::invalid_argument("no samples");
  const auto& d = params.dims();
  ModelParams grad(d);
  std::vector<double> hidden(d.hidden), probs(d.classes);
  accumulate_gradient(params, data, indices, grad, hidden, probs);
  const double scale = 1.0 / static_cast<double>(indices.size());
  for (auto& g : grad.values()) g *= scale;
  return grad;
}

LocalTrainResult local_train(const ModelParams& params, const ClientShard& shard,
                             const Dataset& data, const TrainConfig& cfg) {
  cfg.validate();
  check_data(params, data);
  if (shard.sample_indices.empty()) {
    throw std::invalid_argument("cannot train on an empty shard");
  }
  const auto& d = params.dims();
  LocalTrainResult result{params, 0};
  auto weights = result.params.values();
  std::vector<double> velocity(weights.size(), 0.0);
  ModelParams grad(d);
  std::vector<double> hidden(d.hidden), probs(d.classes);
  std::vector<std::size_t> order = shard.sample_indices;
  std::vector<std::size_t> batch;

  for (int epoch = 0; epoch < cfg.local_epochs; ++epoch) {
    Rng rng(derive_seed(cfg.seed, epoch));
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t end = std::min(order.size(), start + cfg.batch_size);
      batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                   order.begin() + static_cast<std::ptrdiff_t>(end));
      std::sort(batch.begin(), batch.end());

      auto g = grad.values();
      std::fill(g.begin(), g.end(), 0.0);
      accumulate_gradient(result.params, data, batch, grad, hidden, probs);
      const double scale = 1.0 / static_cast<double>(batch.size());
      for (std::size_t i = 0; i < weights.size(); ++i) {
        velocity[i] = cfg.momentum * velocity[i] + g[i] * scale;
        weights[i] -= cfg.learning_rate * velocity[i];
      }
      ++result.steps;
    }
  }
  return result;
}

ModelParams fedavg_aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) throw std::invalid_argument("no client updates");
  const ModelDims dims = updates.front().params.dims();
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (!(u.params.dims() == dims)) {
      throw std::invalid_argument("client updates have mismatched shapes");
    }
    total += u.num_samples;
  }
  if (total == 0) throw std::invalid_argument("client updates carry no samples");

  ModelParams out(dims);
  auto acc = out.values();
  for (const auto& u : updates) {
    const double weight =
        static_cast<double>(u.num_samples) / static_cast<double>(total);
    const auto v = u.params.values();
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weight * v[i];
  }
  return out;
}

double evaluate_accuracy(const ModelParams& params, const Dataset& test) {
  check_data(params, test);
  if (test.size() == 0) throw std::invalid_argument("empty test set");
  const auto& d = params.dims();
  std::vector<double> hidden(d.hidden), probs(d.classes);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < test.size(); ++i) {
    forward_one(params, test.features.row(i), hidden, probs);
    const auto best = static_cast<int>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    if (best == test.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(test.size());
}

}  // namespace fedcarbon
