// SPDX-License-Identifier: Apache-2.0
#include "skadapt/optim.hpp"

#include <cmath>

namespace skadapt {

void SgdConfig::validate() const {
  if (!(base_lr > 0.0)) throw ConfigError("sgd.base_lr must be > 0");
  if (!(anneal_a >= 0.0)) throw ConfigError("sgd.anneal_a must be >= 0");
  if (!(anneal_b >= 0.0)) throw ConfigError("sgd.anneal_b must be >= 0");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("sgd.momentum must be in [0,1)");
}

double learning_rate(const SgdConfig& config, double progress) {
  return config.base_lr / std::pow(1.0 + config.anneal_a * progress, config.anneal_b);
}

namespace {

void check_grads(std::span<Tensor> params) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw GradError("sgd: parameter " + std::to_string(i) + " has no gradient");
    }
  }
}

}  // namespace

void sgd_step(std::span<Tensor> params, const SgdConfig& config, double progress) {
  if (config.momentum != 0.0) throw ConfigError("sgd_step is stateless; use Sgd for momentum");
  Sgd(config).step(params, progress);
}

Sgd::Sgd(SgdConfig config) : config_(config) { config_.validate(); }

void Sgd::step(std::span<Tensor> params, double progress) {
  check_grads(params);
  const double lr = learning_rate(config_, progress);
  if (config_.momentum > 0.0 && velocity_.empty()) {
    for (const Tensor& p : params) velocity_.emplace_back(p.numel(), 0.0);
  }
  if (config_.momentum > 0.0 && velocity_.size() != params.size()) {
    throw GradError("sgd: parameter list changed between steps");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto w = params[i].mutable_data();
    const auto g = params[i].grad();
    if (config_.momentum > 0.0) {
      auto& v = velocity_[i];
      for (std::size_t j = 0; j < w.size(); ++j) {
        v[j] = config_.momentum * v[j] + g[j];
        w[j] -= lr * v[j];
      }
    } else {
      for (std::size_t j = 0; j < w.size(); ++j) w[j] -= lr * g[j];
    }
    params[i].clear_grad();
  }
}

}  // namespace skadapt
