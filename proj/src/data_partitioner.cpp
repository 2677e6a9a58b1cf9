#include "fedcarbon/data_partitioner.hpp"

#include <algorithm>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

#include "fedcarbon/csv.hpp"
#include "fedcarbon/rng.hpp"

namespace fedcarbon {

std::vector<std::size_t> LabeledDatasetSpec::samples_per_class() const {
  std::vector<std::size_t> counts;
  counts.reserve(class_indices.size());
  for (const auto& idx : class_indices) counts.push_back(idx.size());
  return counts;
}

std::size_t LabeledDatasetSpec::total_samples() const {
  std::size_t total = 0;
  for (const auto& idx : class_indices) total += idx.size();
  return total;
}

LabeledDatasetSpec LabeledDatasetSpec::from_labels(std::span<const int> labels,
                                                   int num_classes) {
  if (num_classes < 1) throw ValidationError("num_classes must be >= 1");
  LabeledDatasetSpec spec;
  spec.num_classes = num_classes;
  spec.class_indices.resize(static_cast<std::size_t>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_classes) {
      throw ValidationError("label out of range at index " + std::to_string(i));
    }
    spec.class_indices[static_cast<std::size_t>(labels[i])].push_back(i);
  }
  return spec;
}

LabeledDatasetSpec LabeledDatasetSpec::from_counts(
    std::span<const std::size_t> counts) {
  if (counts.empty()) throw ValidationError("num_classes must be >= 1");
  LabeledDatasetSpec spec;
  spec.num_classes = static_cast<int>(counts.size());
  std::size_t next = 0;
  for (std::size_t count : counts) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), next);
    next += count;
    spec.class_indices.push_back(std::move(idx));
  }
  return spec;
}

namespace {

class ShardBuilder {
 public:
  ShardBuilder(int total_clients, int num_classes) {
    shards_.resize(static_cast<std::size_t>(total_clients));
    for (int c = 0; c < total_clients; ++c) {
      shards_[c].client_id = c;
      shards_[c].class_histogram.assign(static_cast<std::size_t>(num_classes),
                                        0);
    }
  }

  // Deals `samples` of class `cls` evenly over clients [first, first+count).
  // Remainders go one each to clients in ascending id order, continuing
  // from where the previous deal of this group stopped.
  void deal(std::span<const std::size_t> samples, int cls, int first,
            int count, int& cursor) {
    const std::size_t n = samples.size();
    const std::size_t per = n / static_cast<std::size_t>(count);
    std::size_t rem = n % static_cast<std::size_t>(count);
    if (rem != 0) uneven_ = true;
    std::size_t pos = 0;
    std::vector<std::size_t> take(static_cast<std::size_t>(count), per);
    for (; rem > 0; --rem) {
      ++take[static_cast<std::size_t>(cursor)];
      cursor = (cursor + 1) % count;
    }
    for (int k = 0; k < count; ++k) {
      auto& shard = shards_[static_cast<std::size_t>(first + k)];
      for (std::size_t j = 0; j < take[static_cast<std::size_t>(k)]; ++j) {
        shard.sample_indices.push_back(samples[pos++]);
      }
      shard.class_histogram[static_cast<std::size_t>(cls)] +=
          take[static_cast<std::size_t>(k)];
    }
  }

  Partition finish() && {
    for (auto& s : shards_) {
      std::sort(s.sample_indices.begin(), s.sample_indices.end());
    }
    return Partition{std::move(shards_), uneven_};
  }

 private:
  std::vector<ClientShard> shards_;
  bool uneven_ = false;
};

std::vector<std::size_t> shuffled_class(const LabeledDatasetSpec& spec, int cls,
                                        std::uint64_t seed) {
  std::vector<std::size_t> idx = spec.class_indices[static_cast<std::size_t>(cls)];
  Rng rng(derive_seed(seed, cls));
  rng.shuffle(std::span<std::size_t>(idx));
  return idx;
}

void check_common(const LabeledDatasetSpec& spec, int total_clients) {
  if (total_clients < 1) throw ValidationError("total_clients must be >= 1");
  if (spec.num_classes < 1 ||
      spec.class_indices.size() != static_cast<std::size_t>(spec.num_classes)) {
    throw ValidationError("dataset spec: class list length != num_classes");
  }
}

}  // namespace

Partition partition_iid(const LabeledDatasetSpec& spec, int total_clients,
                        std::uint64_t seed) {
  check_common(spec, total_clients);
  ShardBuilder builder(total_clients, spec.num_classes);
  int cursor = 0;
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto idx = shuffled_class(spec, c, seed);
    builder.deal(idx, c, 0, total_clients, cursor);
  }
  return std::move(builder).finish();
}

Partition partition_non_iid(const LabeledDatasetSpec& spec, int total_clients,
                            std::uint64_t seed) {
  check_common(spec, total_clients);
  if (total_clients % 2 != 0) {
    throw ValidationError("non-IID partitioning needs an even client count");
  }
  if (spec.num_classes % 2 != 0) {
    throw ValidationError("non-IID partitioning needs an even class count");
  }
  const int half_clients = total_clients / 2;
  const int half_classes = spec.num_classes / 2;
  ShardBuilder builder(total_clients, spec.num_classes);
  int shared_cursor = 0;
  int group_cursor[2] = {0, 0};
  for (int c = 0; c < spec.num_classes; ++c) {
    const auto idx = shuffled_class(spec, c, seed);
    const std::size_t shared = idx.size() / 2;
    const std::span<const std::size_t> all(idx);
    builder.deal(all.first(shared), c, 0, total_clients, shared_cursor);
    const int group = c < half_classes ? 0 : 1;
    builder.deal(all.subspan(shared), c, group * half_clients, half_clients,
                 group_cursor[group]);
  }
  return std::move(builder).finish();
}

void write_shard_dump(std::ostream& out, std::span<const ClientShard> shards) {
  out << "client_id,class,count\n";
  for (const auto& s : shards) {
    for (std::size_t c = 0; c < s.class_histogram.size(); ++c) {
      out << s.client_id << ',' << c << ',' << s.class_histogram[c] << '\n';
    }
  }
}

}  // namespace fedcarbon
