// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "skadapt/tensor.hpp"

namespace skadapt {

/// Plain SGD with the progress-annealed learning rate
///   lr(p) = base_lr / (1 + anneal_a * p)^anneal_b.
struct SgdConfig {
  double base_lr = 0.01;
  double anneal_a = 10.0;
  double anneal_b = 0.75;
  double momentum = 0.0;

  void validate() const;
};

/// Learning rate at training progress p in [0,1].
double learning_rate(const SgdConfig& config, double progress);

/// One stateless update: param <- param - lr(progress) * grad, then the
/// gradients are cleared. Requires momentum == 0 (use Sgd otherwise).
/// Throws GradError if a parameter has no gradient.
void sgd_step(std::span<Tensor> params, const SgdConfig& config, double progress);

/// SGD with optional momentum buffers. The parameter list passed to step()
/// must be the same (same order) on every call.
class Sgd {
 public:
  explicit Sgd(SgdConfig config);

  void step(std::span<Tensor> params, double progress);
  const SgdConfig& config() const noexcept { return config_; }

 private:
  SgdConfig config_;
  std::vector<std::vector<double>> velocity_;
};

}  // namespace skadapt
