// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <span>
#include <vector>

#include "skadapt/tensor.hpp"

namespace skadapt {

/// Builds a scalar loss from the given leaf inputs.
using LossBuilder = std::function<Tensor(std::span<const Tensor>)>;

/// Compares reverse-mode gradients against central differences.
///
/// Returns max over every input element of
///   |analytic - numeric| / max(1e-8, |analytic| + |numeric|).
/// The inputs are perturbed in place and restored; their requires_grad flag is
/// set for the duration of the check. Throws GradError on a non-finite loss.
double grad_check(const LossBuilder& build, std::vector<Tensor> inputs, double eps = 1e-5);

}  // namespace skadapt
