// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "skadapt/skeleton.hpp"

namespace skadapt {

/// Parametric stick-figure motion generator. One config describes one
/// domain: the class templates depend only on (seed, class, joint), while
/// view_angle / subject_scale / subject_speed / noise_sigma model the
/// camera and performer of that domain.
struct SynthConfig {
  int num_classes = 10;
  int joints = 15;
  int frames = 32;
  double view_angle = 0.0;  // radians, rotation about the vertical (y) axis
  double subject_scale = 1.0;
  double subject_speed = 1.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 1;

  void validate() const;
};

/// Deterministic in (cfg, label, instance). Produces a single-body sequence
/// with cfg.frames frames of cfg.joints joints; subject_id is the instance
/// index and view_id the view angle in whole degrees.
SkeletonSequence gen_synthetic(const SynthConfig& cfg, ActionLabel label, std::uint64_t instance);

/// instances_per_class sequences for every class, instance indices
/// first_instance .. first_instance + instances_per_class - 1, class-major.
std::vector<SkeletonSequence> make_synthetic_dataset(const SynthConfig& cfg,
                                                     int instances_per_class, Domain domain,
                                                     std::uint64_t first_instance = 0);

}  // namespace skadapt
