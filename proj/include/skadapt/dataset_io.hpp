// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <span>
#include <vector>

#include "skadapt/skeleton.hpp"

namespace skadapt {

// JSONL datasets: one object per line,
//   {"label": int|null, "domain": "source"|"target", "subject": int,
//    "view": int, "frames": [[[x,y,z] x J] x bodies] x T}
// A missing "label" key reads as an absent label.

std::vector<SkeletonSequence> read_jsonl(std::istream& in);
void write_jsonl(std::span<const SkeletonSequence> dataset, std::ostream& out);

std::vector<SkeletonSequence> load_jsonl(const std::filesystem::path& path);
void save_jsonl(std::span<const SkeletonSequence> dataset, const std::filesystem::path& path);

/// Partition of a target-domain set into the unlabeled adaptation part and
/// the labeled held-out test part.
struct TargetSplit {
  std::vector<SkeletonSequence> train;  // labels removed, domain = Target
  std::vector<SkeletonSequence> test;   // labels kept, domain = Target
  /// Labels stripped from `train`, kept for diagnostics only.
  std::vector<std::optional<ActionLabel>> train_labels;
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;

  /// Fingerprint of the partition (indices of both parts).
  std::uint64_t hash() const;
};

/// Seeded uniform random partition; the train part receives
/// round(fraction * N) items. Throws DataError on an empty dataset and
/// ConfigError unless 0 < fraction < 1.
TargetSplit split_target(std::span<const SkeletonSequence> dataset, double fraction,
                         std::uint64_t seed);

}  // namespace skadapt
