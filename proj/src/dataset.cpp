#include "fedcarbon/dataset.hpp"

#include <stdexcept>

#include "fedcarbon/rng.hpp"

namespace fedcarbon {

namespace {

Dataset sample_split(const Matrix& means, int per_class, double noise,
                     Rng& rng) {
  const auto classes = means.rows;
  const auto dim = means.cols;
  Dataset ds;
  ds.num_classes = static_cast<int>(classes);
  ds.features = Matrix(classes * static_cast<std::size_t>(per_class), dim);
  ds.labels.reserve(ds.features.rows);
  std::size_t r = 0;
  for (std::size_t c = 0; c < classes; ++c) {
    for (int i = 0; i < per_class; ++i, ++r) {
      for (std::size_t j = 0; j < dim; ++j) {
        ds.features.at(r, j) = means.at(c, j) + noise * rng.normal();
      }
      ds.labels.push_back(static_cast<int>(c));
    }
  }
  return ds;
}

}  // namespace

SyntheticData make_gaussian_clusters(const SyntheticSpec& spec) {
  if (spec.num_classes < 2 || spec.num_features < 1 ||
      spec.train_per_class < 1 || spec.test_per_class < 1) {
    throw std::invalid_argument("synthetic dataset dimensions must be positive");
  }
  if (spec.noise < 0.0 || spec.separation < 0.0) {
    throw std::invalid_argument("noise and separation must be non-negative");
  }
  Rng rng(derive_seed(spec.seed, 0x5eedu));
  Matrix means(static_cast<std::size_t>(spec.num_classes),
               static_cast<std::size_t>(spec.num_features));
  for (auto& m : means.data) m = rng.uniform(-spec.separation, spec.separation);

  SyntheticData out;
  out.train = sample_split(means, spec.train_per_class, spec.noise, rng);
  out.test = sample_split(means, spec.test_per_class, spec.noise, rng);
  return out;
}

}  // namespace fedcarbon
