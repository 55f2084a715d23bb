// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace skadapt {

/// Joint position (x, y, z) in meters.
using Joint = std::array<double, 3>;
using Body = std::vector<Joint>;

inline constexpr std::size_t kMaxBodies = 2;
inline constexpr std::size_t kNtuJoints = 25;

struct BodyFrame {
  std::vector<Body> bodies;
  bool operator==(const BodyFrame&) const = default;
};

struct ActionLabel {
  int index = 0;
  auto operator<=>(const ActionLabel&) const = default;
};

enum class Domain { Source, Target };

std::string to_string(Domain domain);
Domain domain_from_string(const std::string& text);

struct SkeletonSequence {
  std::vector<BodyFrame> frames;
  std::optional<ActionLabel> label;  // absent for unlabeled target data
  Domain domain = Domain::Source;
  int subject_id = 0;
  int view_id = 0;

  bool empty() const noexcept { return frames.empty(); }
  std::size_t frame_count() const noexcept { return frames.size(); }
  /// Body slots per frame (0 for an empty sequence).
  std::size_t body_slots() const;
  /// Joints per body (0 for an empty sequence).
  std::size_t joint_count() const;

  bool operator==(const SkeletonSequence&) const = default;
};

/// Throws DataError unless every frame has the same body count (at most
/// kMaxBodies), every body the same joint count and all coordinates are
/// finite.
void validate(const SkeletonSequence& seq);

/// Number of classes implied by a labeled dataset (max label + 1); 0 when no
/// item carries a label.
int infer_num_classes(std::span<const SkeletonSequence> dataset);

/// 64-bit FNV-1a, used for split and config fingerprints.
std::uint64_t fnv1a(std::span<const std::uint8_t> bytes,
                    std::uint64_t seed = 0xcbf29ce484222325ULL);
std::uint64_t fnv1a(const std::string& text);

}  // namespace skadapt
