// SPDX-License-Identifier: Apache-2.0
#include "skadapt/tensor.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace skadapt {

namespace detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  std::vector<double> grad;  // empty until a backward pass reaches the node
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node&)> backward_fn;

  bool is_leaf() const { return !backward_fn; }

  std::vector<double>& ensure_grad() {
    if (grad.empty()) grad.assign(value.size(), 0.0);
    return grad;
  }
};

}  // namespace detail

using detail::Node;
using RowMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<RowMat>;
using ConstMapMat = Eigen::Map<const RowMat>;

struct TensorAccess {
  static const std::shared_ptr<Node>& node(const Tensor& t) { return t.node_; }
  static Tensor wrap(std::shared_ptr<Node> n) { return Tensor(std::move(n)); }
};

namespace {

thread_local bool g_grad_enabled = true;

const std::shared_ptr<Node>& node_of(const Tensor& t) {
  if (!t.defined()) throw ShapeError("operation on an undefined tensor");
  return TensorAccess::node(t);
}

// Builds the output node; graph edges are only recorded when some input
// requires a gradient and recording is enabled.
Tensor make_result(Shape shape, std::vector<double> value,
                   std::initializer_list<const Tensor*> inputs,
                   std::function<void(Node&)> backward_fn) {
  auto out = std::make_shared<Node>();
  out->shape = std::move(shape);
  out->value = std::move(value);
  bool needs = false;
  if (g_grad_enabled) {
    for (const Tensor* in : inputs) needs = needs || node_of(*in)->requires_grad;
  }
  if (needs) {
    out->requires_grad = true;
    for (const Tensor* in : inputs) out->parents.push_back(node_of(*in));
    out->backward_fn = std::move(backward_fn);
  }
  return TensorAccess::wrap(std::move(out));
}

void require_rank(const Tensor& t, std::size_t rank, const char* op) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " + std::to_string(rank) +
                     ", got shape " + shape_to_string(t.shape()));
  }
}

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_to_string(a.shape()) +
                     " vs " + shape_to_string(b.shape()));
  }
}

}  // namespace

std::size_t shape_numel(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

std::string shape_to_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ']';
  return os.str();
}

// Tensor --------------------------------------------------------------------

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad) {
  for (std::size_t extent : shape) {
    if (extent == 0) throw ShapeError("tensor extents must be positive");
  }
  if (shape_numel(shape) != values.size()) {
    throw ShapeError("shape " + shape_to_string(shape) + " needs " +
                     std::to_string(shape_numel(shape)) + " values, got " +
                     std::to_string(values.size()));
  }
  node_ = std::make_shared<Node>();
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  return full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  const std::size_t n = shape_numel(shape);
  return Tensor(std::move(shape), std::vector<double>(n, value), requires_grad);
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(Shape{}, {value}, requires_grad);
}

const Shape& Tensor::shape() const { return node_of(*this)->shape; }
std::size_t Tensor::numel() const { return node_of(*this)->value.size(); }

std::size_t Tensor::dim(std::size_t axis) const {
  const Shape& s = shape();
  if (axis >= s.size()) throw ShapeError("axis out of range");
  return s[axis];
}

std::span<const double> Tensor::data() const { return node_of(*this)->value; }
std::span<double> Tensor::mutable_data() { return node_of(*this)->value; }

double Tensor::item() const {
  const auto& v = node_of(*this)->value;
  if (v.size() != 1) throw ShapeError("item() on tensor with " + std::to_string(v.size()) + " elements");
  return v[0];
}

bool Tensor::requires_grad() const { return node_of(*this)->requires_grad; }

void Tensor::set_requires_grad(bool flag) {
  auto& n = node_of(*this);
  if (!n->is_leaf()) throw GradError("requires_grad can only be set on leaf tensors");
  n->requires_grad = flag;
}

bool Tensor::has_grad() const { return !node_of(*this)->grad.empty(); }

std::span<const double> Tensor::grad() const {
  const auto& n = node_of(*this);
  if (n->grad.empty()) throw GradError("tensor has no gradient");
  return n->grad;
}

void Tensor::zero_grad() {
  auto& g = node_of(*this)->grad;
  std::fill(g.begin(), g.end(), 0.0);
}

void Tensor::clear_grad() { node_of(*this)->grad.clear(); }

Tensor Tensor::detach() const {
  const auto& n = node_of(*this);
  return Tensor(n->shape, n->value, false);
}

Tensor Tensor::clone() const {
  const auto& n = node_of(*this);
  return Tensor(n->shape, n->value, n->requires_grad && n->is_leaf());
}

void Tensor::backward() const {
  const auto& root = node_of(*this);
  if (!root->shape.empty()) {
    throw GradError("backward() needs a 0-d loss, got shape " + shape_to_string(root->shape));
  }
  if (!root->requires_grad) throw GradError("backward() on a tensor that does not require grad");

  // Iterative post-order DFS yields a topological order (parents first).
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.get(), 0}};
  visited.insert(root.get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->parents.size()) {
      Node* parent = node->parents[next++].get();
      if (parent->requires_grad && visited.insert(parent).second) stack.emplace_back(parent, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  for (Node* n : order) {
    if (!n->is_leaf()) n->grad.assign(n->value.size(), 0.0);
  }
  root->ensure_grad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (!(*it)->is_leaf()) (*it)->backward_fn(**it);
  }
}

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }
bool grad_enabled() noexcept { return g_grad_enabled; }

// Operations ----------------------------------------------------------------

namespace {

struct ConvGeometry {
  std::size_t c_in, h, w, c_out, kh, kw, out_h, out_w;
  int stride, pad;
  std::size_t patch() const { return c_in * kh * kw; }
  std::size_t out_area() const { return out_h * out_w; }
};

void im2col(const double* image, const ConvGeometry& g, double* cols) {
  const std::size_t area = g.out_area();
  for (std::size_t c = 0; c < g.c_in; ++c) {
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj) {
        double* row = cols + ((c * g.kh + ki) * g.kw + kj) * area;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy) * g.stride - g.pad + static_cast<long>(ki);
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox) * g.stride - g.pad + static_cast<long>(kj);
            const bool inside = iy >= 0 && ix >= 0 && iy < static_cast<long>(g.h) &&
                                ix < static_cast<long>(g.w);
            row[oy * g.out_w + ox] = inside ? image[(c * g.h + iy) * g.w + ix] : 0.0;
          }
        }
      }
    }
  }
}

void col2im_add(const double* cols, const ConvGeometry& g, double* image) {
  const std::size_t area = g.out_area();
  for (std::size_t c = 0; c < g.c_in; ++c) {
    for (std::size_t ki = 0; ki < g.kh; ++ki) {
      for (std::size_t kj = 0; kj < g.kw; ++kj) {
        const double* row = cols + ((c * g.kh + ki) * g.kw + kj) * area;
        for (std::size_t oy = 0; oy < g.out_h; ++oy) {
          const long iy = static_cast<long>(oy) * g.stride - g.pad + static_cast<long>(ki);
          if (iy < 0 || iy >= static_cast<long>(g.h)) continue;
          for (std::size_t ox = 0; ox < g.out_w; ++ox) {
            const long ix = static_cast<long>(ox) * g.stride - g.pad + static_cast<long>(kj);
            if (ix < 0 || ix >= static_cast<long>(g.w)) continue;
            image[(c * g.h + iy) * g.w + ix] += row[oy * g.out_w + ox];
          }
        }
      }
    }
  }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int stride,
              int pad) {
  if (stride < 1) throw ShapeError("conv2d: stride must be positive");
  if (pad < 0) throw ShapeError("conv2d: pad must be non-negative");
  const bool batched = input.rank() == 4;
  if (!batched && input.rank() != 3) {
    throw ShapeError("conv2d: input must be [C,H,W] or [N,C,H,W], got " +
                     shape_to_string(input.shape()));
  }
  require_rank(kernel, 4, "conv2d kernel");
  require_rank(bias, 1, "conv2d bias");
  const std::size_t lead = batched ? 1 : 0;
  const std::size_t batch = batched ? input.dim(0) : 1;

  ConvGeometry g{};
  g.c_in = input.dim(lead);
  g.h = input.dim(lead + 1);
  g.w = input.dim(lead + 2);
  g.c_out = kernel.dim(0);
  g.kh = kernel.dim(2);
  g.kw = kernel.dim(3);
  g.stride = stride;
  g.pad = pad;
  if (kernel.dim(1) != g.c_in) {
    throw ShapeError("conv2d: kernel expects " + std::to_string(kernel.dim(1)) +
                     " input channels, input has " + std::to_string(g.c_in));
  }
  if (bias.dim(0) != g.c_out) throw ShapeError("conv2d: bias length must equal C_out");
  if (g.h + 2 * pad < g.kh || g.w + 2 * pad < g.kw) {
    throw ShapeError("conv2d: kernel larger than padded input");
  }
  g.out_h = (g.h + 2 * pad - g.kh) / stride + 1;
  g.out_w = (g.w + 2 * pad - g.kw) / stride + 1;

  const std::size_t in_size = g.c_in * g.h * g.w;
  const std::size_t out_size = g.c_out * g.out_area();
  const std::size_t col_size = g.patch() * g.out_area();
  const bool record = g_grad_enabled && (input.requires_grad() || kernel.requires_grad() ||
                                         bias.requires_grad());

  auto cols = std::make_shared<std::vector<double>>(record ? batch * col_size : col_size);
  std::vector<double> out(batch * out_size);
  const ConstMapMat w(kernel.data().data(), g.c_out, g.patch());
  const auto b = bias.data();
  for (std::size_t n = 0; n < batch; ++n) {
    double* col = cols->data() + (record ? n * col_size : 0);
    im2col(input.data().data() + n * in_size, g, col);
    MapMat y(out.data() + n * out_size, g.c_out, g.out_area());
    y.noalias() = w * ConstMapMat(col, g.patch(), g.out_area());
    for (std::size_t c = 0; c < g.c_out; ++c) y.row(c).array() += b[c];
  }

  Shape shape = batched ? Shape{batch, g.c_out, g.out_h, g.out_w} : Shape{g.c_out, g.out_h, g.out_w};
  return make_result(std::move(shape), std::move(out), {&input, &kernel, &bias},
                     [g, batch, in_size, out_size, col_size, cols](Node& self) {
                       Node& in = *self.parents[0];
                       Node& k = *self.parents[1];
                       Node& bs = *self.parents[2];
                       const ConstMapMat w(k.value.data(), g.c_out, g.patch());
                       std::vector<double> dcol(in.requires_grad ? col_size : 0);
                       for (std::size_t n = 0; n < batch; ++n) {
                         const ConstMapMat dy(self.grad.data() + n * out_size, g.c_out, g.out_area());
                         const ConstMapMat col(cols->data() + n * col_size, g.patch(), g.out_area());
                         if (k.requires_grad) {
                           MapMat dw(k.ensure_grad().data(), g.c_out, g.patch());
                           dw.noalias() += dy * col.transpose();
                         }
                         if (bs.requires_grad) {
                           auto& db = bs.ensure_grad();
                           for (std::size_t c = 0; c < g.c_out; ++c) db[c] += dy.row(c).sum();
                         }
                         if (in.requires_grad) {
                           MapMat dc(dcol.data(), g.patch(), g.out_area());
                           dc.noalias() = w.transpose() * dy;
                           col2im_add(dcol.data(), g, in.ensure_grad().data() + n * in_size);
                         }
                       }
                     });
}

Tensor dense(const Tensor& input, const Tensor& weights, const Tensor& bias) {
  require_rank(input, 2, "dense input");
  require_rank(weights, 2, "dense weights");
  require_rank(bias, 1, "dense bias");
  const std::size_t n = input.dim(0), d = input.dim(1), m = weights.dim(1);
  if (weights.dim(0) != d) {
    throw ShapeError("dense: input has " + std::to_string(d) + " features, weights expect " +
                     std::to_string(weights.dim(0)));
  }
  if (bias.dim(0) != m) throw ShapeError("dense: bias length must equal output width");

  std::vector<double> out(n * m);
  MapMat y(out.data(), n, m);
  y.noalias() = ConstMapMat(input.data().data(), n, d) * ConstMapMat(weights.data().data(), d, m);
  const auto b = bias.data();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) y(i, j) += b[j];
  }
  return make_result({n, m}, std::move(out), {&input, &weights, &bias},
                     [n, d, m](Node& self) {
                       Node& x = *self.parents[0];
                       Node& w = *self.parents[1];
                       Node& bs = *self.parents[2];
                       const ConstMapMat dy(self.grad.data(), n, m);
                       if (x.requires_grad) {
                         MapMat(x.ensure_grad().data(), n, d).noalias() +=
                             dy * ConstMapMat(w.value.data(), d, m).transpose();
                       }
                       if (w.requires_grad) {
                         MapMat(w.ensure_grad().data(), d, m).noalias() +=
                             ConstMapMat(x.value.data(), n, d).transpose() * dy;
                       }
                       if (bs.requires_grad) {
                         auto& db = bs.ensure_grad();
                         for (std::size_t i = 0; i < n; ++i)
                           for (std::size_t j = 0; j < m; ++j) db[j] += dy(i, j);
                       }
                     });
}

Tensor relu(const Tensor& input) {
  const auto x = input.data();
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return v > 0.0 ? v : 0.0; });
  return make_result(input.shape(), std::move(out), {&input}, [](Node& self) {
    Node& in = *self.parents[0];
    auto& g = in.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in.value[i] > 0.0) g[i] += self.grad[i];
    }
  });
}

Tensor maxpool2(const Tensor& input) {
  if (input.rank() < 2) throw ShapeError("maxpool2: input needs at least two axes");
  const Shape& s = input.shape();
  const std::size_t h = s[s.size() - 2], w = s[s.size() - 1];
  if (h % 2 != 0 || w % 2 != 0) {
    throw ShapeError("maxpool2: spatial extents must be even, got " + shape_to_string(s));
  }
  const std::size_t planes = input.numel() / (h * w);
  const std::size_t oh = h / 2, ow = w / 2;
  auto argmax = std::make_shared<std::vector<std::size_t>>(planes * oh * ow);
  std::vector<double> out(planes * oh * ow);
  const auto x = input.data();
  for (std::size_t p = 0; p < planes; ++p) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        const std::size_t base = p * h * w + 2 * oy * w + 2 * ox;
        // Row-major window order; strict '>' keeps the first maximum.
        const std::size_t window[4] = {base, base + 1, base + w, base + w + 1};
        std::size_t best = window[0];
        for (std::size_t idx : window) {
          if (x[idx] > x[best]) best = idx;
        }
        const std::size_t o = (p * oh + oy) * ow + ox;
        out[o] = x[best];
        (*argmax)[o] = best;
      }
    }
  }
  Shape os = s;
  os[os.size() - 2] = oh;
  os[os.size() - 1] = ow;
  return make_result(std::move(os), std::move(out), {&input}, [argmax](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t o = 0; o < argmax->size(); ++o) g[(*argmax)[o]] += self.grad[o];
  });
}

Tensor global_avg_pool(const Tensor& input) {
  require_rank(input, 4, "global_avg_pool");
  const std::size_t n = input.dim(0), c = input.dim(1);
  const std::size_t area = input.dim(2) * input.dim(3);
  std::vector<double> out(n * c);
  const auto x = input.data();
  for (std::size_t p = 0; p < n * c; ++p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < area; ++i) acc += x[p * area + i];
    out[p] = acc / static_cast<double>(area);
  }
  return make_result({n, c}, std::move(out), {&input}, [area](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    const double inv = 1.0 / static_cast<double>(area);
    for (std::size_t p = 0; p < self.grad.size(); ++p) {
      const double gp = self.grad[p] * inv;
      for (std::size_t i = 0; i < area; ++i) g[p * area + i] += gp;
    }
  });
}

Tensor softmax(const Tensor& logits) {
  require_rank(logits, 2, "softmax");
  const std::size_t n = logits.dim(0), m = logits.dim(1);
  const auto z = logits.data();
  std::vector<double> out(n * m);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = z.data() + i * m;
    const double peak = *std::max_element(row, row + m);
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      out[i * m + j] = std::exp(row[j] - peak);
      total += out[i * m + j];
    }
    for (std::size_t j = 0; j < m; ++j) out[i * m + j] /= total;
  }
  return make_result({n, m}, out, {&logits}, [n, m](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    const auto& p = self.value;
    for (std::size_t i = 0; i < n; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < m; ++j) dot += self.grad[i * m + j] * p[i * m + j];
      for (std::size_t j = 0; j < m; ++j) {
        g[i * m + j] += p[i * m + j] * (self.grad[i * m + j] - dot);
      }
    }
  });
}

Tensor log_clamped(const Tensor& input, double floor) {
  const auto x = input.data();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = std::log(std::max(x[i], floor));
  return make_result(input.shape(), std::move(out), {&input}, [floor](Node& self) {
    Node& in = *self.parents[0];
    auto& g = in.ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (in.value[i] > floor) g[i] += self.grad[i] / in.value[i];
    }
  });
}

Tensor slice_cols(const Tensor& input, std::size_t begin, std::size_t end) {
  require_rank(input, 2, "slice_cols");
  const std::size_t n = input.dim(0), m = input.dim(1);
  if (begin >= end || end > m) {
    throw ShapeError("slice_cols: invalid range [" + std::to_string(begin) + "," +
                     std::to_string(end) + ") for width " + std::to_string(m));
  }
  const std::size_t k = end - begin;
  std::vector<double> out(n * k);
  const auto x = input.data();
  for (std::size_t i = 0; i < n; ++i) {
    std::copy_n(x.data() + i * m + begin, k, out.data() + i * k);
  }
  return make_result({n, k}, std::move(out), {&input}, [n, m, k, begin](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < k; ++j) g[i * m + begin + j] += self.grad[i * k + j];
  });
}

Tensor row_sum(const Tensor& input) {
  require_rank(input, 2, "row_sum");
  const std::size_t n = input.dim(0), m = input.dim(1);
  std::vector<double> out(n, 0.0);
  const auto x = input.data();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) out[i] += x[i * m + j];
  return make_result({n}, std::move(out), {&input}, [n, m](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j) g[i * m + j] += self.grad[i];
  });
}

Tensor gather_cols(const Tensor& input, std::span<const std::size_t> index) {
  require_rank(input, 2, "gather_cols");
  const std::size_t n = input.dim(0), m = input.dim(1);
  if (index.size() != n) throw ShapeError("gather_cols: need one index per row");
  auto idx = std::make_shared<std::vector<std::size_t>>(index.begin(), index.end());
  std::vector<double> out(n);
  const auto x = input.data();
  for (std::size_t i = 0; i < n; ++i) {
    if ((*idx)[i] >= m) throw ShapeError("gather_cols: column index out of range");
    out[i] = x[i * m + (*idx)[i]];
  }
  return make_result({n}, std::move(out), {&input}, [m, idx](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < idx->size(); ++i) g[i * m + (*idx)[i]] += self.grad[i];
  });
}

Tensor reshape(const Tensor& input, Shape shape) {
  if (shape_numel(shape) != input.numel()) {
    throw ShapeError("reshape: " + shape_to_string(input.shape()) + " -> " +
                     shape_to_string(shape));
  }
  std::vector<double> out(input.data().begin(), input.data().end());
  return make_result(std::move(shape), std::move(out), {&input}, [](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
  });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "add");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] + b.data()[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    for (auto& parent : self.parents) {
      if (!parent->requires_grad) continue;
      auto& g = parent->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "sub");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] - b.data()[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    if (self.parents[0]->requires_grad) {
      auto& g = self.parents[0]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (self.parents[1]->requires_grad) {
      auto& g = self.parents[1]->ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  require_same_shape(a, b, "mul");
  std::vector<double> out(a.numel());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.data()[i] * b.data()[i];
  return make_result(a.shape(), std::move(out), {&a, &b}, [](Node& self) {
    Node& x = *self.parents[0];
    Node& y = *self.parents[1];
    if (x.requires_grad) {
      auto& g = x.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * y.value[i];
    }
    if (y.requires_grad) {
      auto& g = y.ensure_grad();
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * x.value[i];
    }
  });
}

Tensor scale(const Tensor& input, double factor) {
  std::vector<double> out(input.data().begin(), input.data().end());
  for (double& v : out) v *= factor;
  return make_result(input.shape(), std::move(out), {&input}, [factor](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * factor;
  });
}

Tensor sum(const Tensor& input) {
  const auto x = input.data();
  const double total = std::accumulate(x.begin(), x.end(), 0.0);
  return make_result(Shape{}, {total}, {&input}, [](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (double& v : g) v += self.grad[0];
  });
}

Tensor mean(const Tensor& input) {
  const auto x = input.data();
  const double n = static_cast<double>(x.size());
  const double avg = std::accumulate(x.begin(), x.end(), 0.0) / n;
  return make_result(Shape{}, {avg}, {&input}, [n](Node& self) {
    auto& g = self.parents[0]->ensure_grad();
    for (double& v : g) v += self.grad[0] / n;
  });
}

}  // namespace skadapt
