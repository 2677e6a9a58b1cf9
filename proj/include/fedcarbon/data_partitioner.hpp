#pragma once

// Splits a labeled dataset into per-client shards.
//
// IID: every client receives the same number of samples of every class.
// Non-IID: half of each class is spread IID over all clients, the other half
// of classes [0, C/2) goes to clients [0, T/2) and the rest of classes
// [C/2, C) goes to clients [T/2, T).
//
// Counts are deterministic; which concrete sample lands where depends on the
// seed.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fedcarbon {

struct LabeledDatasetSpec {
  int num_classes = 0;
  /// class_indices[c] lists the dataset indices of class c.
  std::vector<std::vector<std::size_t>> class_indices;

  std::vector<std::size_t> samples_per_class() const;
  std::size_t total_samples() const;

  /// Groups indices 0..labels.size()-1 by label. Labels must be in range.
  static LabeledDatasetSpec from_labels(std::span<const int> labels,
                                        int num_classes);
  /// Contiguous index blocks: class 0 gets [0, counts[0]), class 1 the next
  /// counts[1] indices and so on.
  static LabeledDatasetSpec from_counts(std::span<const std::size_t> counts);
};

struct ClientShard {
  int client_id = 0;
  std::vector<std::size_t> sample_indices;  // ascending
  std::vector<std::size_t> class_histogram;

  std::size_t size() const { return sample_indices.size(); }
};

struct Partition {
  std::vector<ClientShard> shards;
  /// Set when some class count was not divisible and remainders had to be
  /// dealt out unevenly.
  bool uneven_remainder = false;
};

Partition partition_iid(const LabeledDatasetSpec& spec, int total_clients,
                        std::uint64_t seed);

/// Throws ValidationError for odd total_clients or odd num_classes.
Partition partition_non_iid(const LabeledDatasetSpec& spec, int total_clients,
                            std::uint64_t seed);

/// `client_id,class,count` rows for inspection.
void write_shard_dump(std::ostream& out, std::span<const ClientShard> shards);

}  // namespace fedcarbon
