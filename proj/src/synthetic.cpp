// SPDX-License-Identifier: Apache-2.0
#include "skadapt/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "skadapt/errors.hpp"

namespace skadapt {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t key(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t tag) {
  return splitmix(splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0x632be59bd9b4e019ULL)) ^ tag);
}

// Uniform in [0,1) from a hash key.
double unit(std::uint64_t k) { return static_cast<double>(k >> 11) * 0x1.0p-53; }

// Resting pose centered on the vertical axis through the origin.
Joint base_pose(int j, int joints) {
  const double u = static_cast<double>(j) / static_cast<double>(joints - 1);
  return {0.30 * std::sin(2.3 * j + 0.4), -0.85 + 1.7 * u, 0.12 * std::cos(1.9 * j)};
}

struct JointMotion {
  Joint amplitude;
  double cycles;
  double phase;
};

JointMotion class_motion(std::uint64_t seed, int label, int j) {
  const auto k = [&](std::uint64_t tag) { return unit(key(seed, label, j, tag)); };
  JointMotion m{};
  // Motion lives mostly in the frontal (x, y) plane; the view rotation moves
  // the x component into depth.
  m.amplitude = {0.25 * (2.0 * k(1) - 1.0), 0.15 * (2.0 * k(2) - 1.0), 0.05 * (2.0 * k(3) - 1.0)};
  m.cycles = 1.0 + std::floor(3.0 * k(4));
  m.phase = kTwoPi * k(5);
  return m;
}

}  // namespace

void SynthConfig::validate() const {
  if (num_classes < 2) throw ConfigError("synth: num_classes must be >= 2");
  if (joints < 4) throw ConfigError("synth: joints must be >= 4");
  if (frames < 8) throw ConfigError("synth: frames must be >= 8");
  if (!(subject_scale > 0.0)) throw ConfigError("synth: subject_scale must be > 0");
  if (!(subject_speed > 0.0)) throw ConfigError("synth: subject_speed must be > 0");
  if (!(noise_sigma >= 0.0)) throw ConfigError("synth: noise_sigma must be >= 0");
  if (!std::isfinite(view_angle)) throw ConfigError("synth: view_angle must be finite");
}

SkeletonSequence gen_synthetic(const SynthConfig& cfg, ActionLabel label, std::uint64_t instance) {
  cfg.validate();
  if (label.index < 0 || label.index >= cfg.num_classes) {
    throw ConfigError("synth: class " + std::to_string(label.index) + " outside [0," +
                      std::to_string(cfg.num_classes) + ")");
  }
  const auto inst = [&](std::uint64_t tag) {
    return unit(key(cfg.seed ^ 0x5bd1e995ULL, label.index, instance, tag));
  };
  const double phase_jitter = 0.6 * (inst(1) - 0.5);
  const double amp_jitter = 0.8 + 0.4 * inst(2);

  std::vector<JointMotion> motion;
  for (int j = 0; j < cfg.joints; ++j) motion.push_back(class_motion(cfg.seed, label.index, j));

  std::mt19937_64 rng(key(cfg.seed, label.index, instance, 0x6e6f697365ULL));
  std::normal_distribution<double> noise(0.0, 1.0);
  const double c = std::cos(cfg.view_angle);
  const double s = std::sin(cfg.view_angle);

  SkeletonSequence seq;
  seq.label = label;
  seq.subject_id = static_cast<int>(instance);
  seq.view_id = static_cast<int>(std::lround(cfg.view_angle * 180.0 / std::numbers::pi));
  seq.frames.resize(cfg.frames);
  for (int t = 0; t < cfg.frames; ++t) {
    const double time = cfg.subject_speed * t / cfg.frames;
    Body body(cfg.joints);
    for (int j = 0; j < cfg.joints; ++j) {
      const Joint rest = base_pose(j, cfg.joints);
      const auto& m = motion[j];
      const double wave = amp_jitter * std::sin(kTwoPi * m.cycles * time + m.phase + phase_jitter);
      double p[3];
      for (int a = 0; a < 3; ++a) p[a] = cfg.subject_scale * (rest[a] + m.amplitude[a] * wave);
      body[j] = {c * p[0] + s * p[2], p[1], -s * p[0] + c * p[2]};
      if (cfg.noise_sigma > 0.0) {
        for (double& v : body[j]) v += cfg.noise_sigma * noise(rng);
      }
    }
    seq.frames[t].bodies.push_back(std::move(body));
  }
  return seq;
}

std::vector<SkeletonSequence> make_synthetic_dataset(const SynthConfig& cfg,
                                                     int instances_per_class, Domain domain,
                                                     std::uint64_t first_instance) {
  if (instances_per_class < 1) throw ConfigError("synth: instances_per_class must be >= 1");
  std::vector<SkeletonSequence> out;
  out.reserve(static_cast<std::size_t>(cfg.num_classes) * instances_per_class);
  for (int k = 0; k < cfg.num_classes; ++k) {
    for (int i = 0; i < instances_per_class; ++i) {
      auto seq = gen_synthetic(cfg, ActionLabel{k}, first_instance + i);
      seq.domain = domain;
      out.push_back(std::move(seq));
    }
  }
  return out;
}

}  // namespace skadapt
