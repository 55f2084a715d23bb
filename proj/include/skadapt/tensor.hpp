// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "skadapt/errors.hpp"

namespace skadapt {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_to_string(const Shape& shape);

namespace detail {
struct Node;
}

/// Dense row-major double tensor that can take part in a reverse-mode
/// differentiation graph.
///
/// A Tensor is a cheap handle: copies share the same storage and graph node.
/// Use clone() for an independent copy and detach() to cut the graph.
///
/// Gradient semantics: backward() recomputes the gradients of every
/// intermediate node reachable from the loss, and *accumulates* into the
/// gradients of leaf tensors. Call zero_grad()/clear_grad() on leaves between
/// independent backward passes.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const noexcept { return static_cast<bool>(node_); }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t numel() const;
  std::size_t dim(std::size_t axis) const;

  std::span<const double> data() const;
  /// Writable view of the values. Mutating a tensor that already feeds a
  /// recorded graph invalidates that graph.
  std::span<double> mutable_data();
  double item() const;

  bool requires_grad() const;
  void set_requires_grad(bool flag);
  bool has_grad() const;
  std::span<const double> grad() const;
  void zero_grad();
  void clear_grad();

  Tensor detach() const;
  Tensor clone() const;

  void backward() const;

  /// Identity of the underlying storage; equal for copies of one handle.
  const void* id() const noexcept { return node_.get(); }

 private:
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}
  friend struct TensorAccess;

  std::shared_ptr<detail::Node> node_;
};

/// Disables graph recording on the current thread while alive.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool grad_enabled() noexcept;

// Differentiable operations ------------------------------------------------

/// 2D cross-correlation with zero padding. Accepts input [C,H,W] or
/// [N,C,H,W]; kernel is [C_out,C_in,kh,kw] and bias [C_out].
Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias,
              int stride = 1, int pad = 0);

/// input [N,D] x weights [D,M] + bias [M].
Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias);

Tensor relu(const Tensor& input);

/// 2x2 stride-2 max pooling over the last two axes. The gradient goes to the
/// first maximal element of each window in row-major order.
Tensor maxpool2(const Tensor& input);

/// Mean over the last two axes: [N,C,H,W] -> [N,C].
Tensor global_avg_pool(const Tensor& input);

/// Row-wise softmax of a [N,M] tensor.
Tensor softmax(const Tensor& logits);

/// Elementwise log(max(x, floor)); the derivative is zero where clamped.
inline constexpr double kLogFloor = 1e-12;
Tensor log_clamped(const Tensor& input, double floor = kLogFloor);

/// Columns [begin, end) of a [N,M] tensor.
Tensor slice_cols(const Tensor& input, std::size_t begin, std::size_t end);

/// Row sums of a [N,M] tensor -> [N].
Tensor row_sum(const Tensor& input);

/// out[i] = input[i, index[i]] for a [N,M] tensor.
Tensor gather_cols(const Tensor& input, std::span<const std::size_t> index);

Tensor reshape(const Tensor& input, Shape shape);

Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& input, double factor);

/// Sum / mean of all elements -> 0-d tensor.
Tensor sum(const Tensor& input);
Tensor mean(const Tensor& input);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, const Tensor& b) { return mul(a, b); }
inline Tensor operator*(double c, const Tensor& a) { return scale(a, c); }
inline Tensor operator-(const Tensor& a) { return scale(a, -1.0); }

}  // namespace skadapt
