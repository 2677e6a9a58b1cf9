#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fedcarbon {

/// Dense row-major matrix.
struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}

  std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
  std::span<const double> row(std::size_t i) const {
    return {data.data() + i * cols, cols};
  }
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

struct Dataset {
  Matrix features;
  std::vector<int> labels;
  int num_classes = 0;

  std::size_t size() const { return labels.size(); }
};

/// Gaussian blobs: one mean per class drawn uniformly from
/// [-separation, separation]^d, samples = mean + noise * N(0, I).
struct SyntheticSpec {
  int num_classes = 4;
  int num_features = 8;
  int train_per_class = 200;
  int test_per_class = 100;
  double separation = 1.0;
  double noise = 1.0;
  std::uint64_t seed = 0;
};

struct SyntheticData {
  Dataset train;
  Dataset test;
};

SyntheticData make_gaussian_clusters(const SyntheticSpec& spec);

}  // namespace fedcarbon
