// SPDX-License-Identifier: Apache-2.0
#include "skadapt/skeleton.hpp"

#include <algorithm>
#include <cmath>

#include "skadapt/errors.hpp"

namespace skadapt {

std::string to_string(Domain domain) {
  return domain == Domain::Source ? "source" : "target";
}

Domain domain_from_string(const std::string& text) {
  if (text == "source") return Domain::Source;
  if (text == "target") return Domain::Target;
  throw DataError("unknown domain '" + text + "'");
}

std::size_t SkeletonSequence::body_slots() const {
  return frames.empty() ? 0 : frames.front().bodies.size();
}

std::size_t SkeletonSequence::joint_count() const {
  if (frames.empty() || frames.front().bodies.empty()) return 0;
  return frames.front().bodies.front().size();
}

void validate(const SkeletonSequence& seq) {
  const std::size_t slots = seq.body_slots();
  const std::size_t joints = seq.joint_count();
  if (slots > kMaxBodies) {
    throw DataError("at most " + std::to_string(kMaxBodies) + " bodies per frame");
  }
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    const auto& frame = seq.frames[t];
    if (frame.bodies.size() != slots) {
      throw DataError("frame " + std::to_string(t) + " has " +
                      std::to_string(frame.bodies.size()) + " bodies, expected " +
                      std::to_string(slots));
    }
    for (const Body& body : frame.bodies) {
      if (body.size() != joints) {
        throw DataError("frame " + std::to_string(t) + " has a body with " +
                        std::to_string(body.size()) + " joints, expected " +
                        std::to_string(joints));
      }
      for (const Joint& j : body) {
        if (!std::isfinite(j[0]) || !std::isfinite(j[1]) || !std::isfinite(j[2])) {
          throw DataError("frame " + std::to_string(t) + " has a non-finite coordinate");
        }
      }
    }
  }
  if (seq.label && seq.label->index < 0) throw DataError("negative class label");
}

int infer_num_classes(std::span<const SkeletonSequence> dataset) {
  int k = 0;
  for (const auto& s : dataset) {
    if (s.label) k = std::max(k, s.label->index + 1);
  }
  return k;
}

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes, std::uint64_t seed) {
  std::uint64_t h = seed;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& text) {
  return fnv1a(std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

}  // namespace skadapt
