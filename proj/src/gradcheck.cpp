// SPDX-License-Identifier: Apache-2.0
#include "skadapt/gradcheck.hpp"

#include <algorithm>
#include <cmath>

namespace skadapt {

namespace {

double evaluate(const LossBuilder& build, std::span<const Tensor> inputs) {
  NoGradGuard no_grad;
  const double value = build(inputs).item();
  if (!std::isfinite(value)) throw GradError("grad_check: loss is not finite");
  return value;
}

}  // namespace

double grad_check(const LossBuilder& build, std::vector<Tensor> inputs, double eps) {
  if (!(eps > 0.0)) throw GradError("grad_check: eps must be positive");
  for (Tensor& t : inputs) {
    for (double v : t.data()) {
      if (!std::isfinite(v)) throw GradError("grad_check: non-finite input");
    }
    t.set_requires_grad(true);
    t.clear_grad();
  }

  Tensor loss = build(inputs);
  if (!std::isfinite(loss.item())) throw GradError("grad_check: loss is not finite");
  if (loss.requires_grad()) loss.backward();

  double worst = 0.0;
  for (Tensor& t : inputs) {
    const std::vector<double> analytic =
        t.has_grad() ? std::vector<double>(t.grad().begin(), t.grad().end())
                     : std::vector<double>(t.numel(), 0.0);
    auto values = t.mutable_data();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = evaluate(build, inputs);
      values[i] = saved - eps;
      const double minus = evaluate(build, inputs);
      values[i] = saved;
      const double numeric = (plus - minus) / (2.0 * eps);
      const double err = std::abs(analytic[i] - numeric) /
                         std::max(1e-8, std::abs(analytic[i]) + std::abs(numeric));
      worst = std::max(worst, err);
    }
    t.clear_grad();
  }
  return worst;
}

}  // namespace skadapt
