// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gnnperf::num {

using Shape = std::vector<std::size_t>;

std::string shape_string(const Shape& shape);

// Raised when operand shapes do not conform; the message names the op and
// both shapes.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised on misuse of the gradient machinery (non-scalar loss, double
// backward, missing gradients).
class GradError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

enum class OpKind {
  matmul,
  add,
  hadamard,
  concat_last_axis,
  tanh,
  sigmoid,
  relu,
  reduce_mean,
  reduce_sum,
  scalar_mul,
  // Operations beyond the core set, used by the model.
  sub,
  add_bias,
  add_scalar,
  transpose,
  softplus,
  abs,
  clamp,
  concat_rows,
  gather_rows,
  scatter_add_rows,
  assign_rows,
  linear,
  leaf,
};

std::string_view op_name(OpKind kind);

// Pre-activation clamp applied by sigmoid and tanh.
inline constexpr double kActivationClamp = 40.0;

namespace detail {
struct Node;
}

// Dense row-major float64 array. A Tensor is a cheap handle: copies share
// the same storage. Tensors produced by an operation on any input that
// requires grad record a backward rule on the dynamic tape.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false);
  static Tensor full(Shape shape, double value, bool requires_grad = false);
  static Tensor from(Shape shape, std::vector<double> values, bool requires_grad = false);
  static Tensor scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const;
  std::size_t rank() const { return shape().size(); }
  std::size_t size() const;
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<const double> values() const;
  // Only leaves may be written in place (parameters, inputs).
  std::span<double> mutable_values();
  double item() const;
  double at(std::size_t i) const { return values()[i]; }
  double at(std::size_t r, std::size_t c) const { return values()[r * cols() + c]; }

  bool requires_grad() const;
  bool is_leaf() const;
  bool has_grad() const;
  std::span<const double> grad() const;
  void set_grad(std::vector<double> grad);
  void zero_grad();

  // Value copy detached from the tape.
  Tensor detach(bool requires_grad = false) const;
  std::vector<double> to_vector() const;

  OpKind op() const;
  std::uint64_t sequence() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }
  explicit Tensor(std::shared_ptr<detail::Node> node) : node_(std::move(node)) {}

 private:
  std::shared_ptr<detail::Node> node_;
};

// --- core operation set ----------------------------------------------------

Tensor apply(OpKind kind, std::span<const Tensor> inputs, double scalar = 1.0);

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor hadamard(const Tensor& a, const Tensor& b);
Tensor concat_last_axis(const Tensor& a, const Tensor& b);
Tensor tanh(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor relu(const Tensor& x);
Tensor reduce_mean(const Tensor& x);
Tensor reduce_sum(const Tensor& x);
Tensor scalar_mul(const Tensor& x, double s);

// --- model support ---------------------------------------------------------

Tensor sub(const Tensor& a, const Tensor& b);
// a[m,n] + b[n] broadcast over rows.
Tensor add_bias(const Tensor& a, const Tensor& bias);
Tensor add_scalar(const Tensor& x, double s);
Tensor transpose(const Tensor& a);
Tensor softplus(const Tensor& x);
Tensor abs(const Tensor& x);
Tensor clamp(const Tensor& x, double lo, double hi);
// Stack 2-D tensors with equal column counts along the row axis.
Tensor concat_rows(std::span<const Tensor> parts);
Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index);
// out[index[i], :] += a[i, :]. Contributions to each output entry are summed
// in ascending value order so the result does not depend on row order.
Tensor scatter_add_rows(const Tensor& a, std::span<const std::size_t> index, std::size_t out_rows);
// Copy of base with base[index[i], :] replaced by rows[i, :].
Tensor assign_rows(const Tensor& base, std::span<const std::size_t> index, const Tensor& rows);

// x @ w^T + b, with w stored as (out, in).
Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias);

// Populates grad on every requires_grad tensor reachable from loss. Throws
// GradError if loss is not a scalar, is not on the tape, or if a reachable
// leaf still carries a gradient from an earlier call.
void backward(const Tensor& loss);

// --- optimizer -------------------------------------------------------------

struct AdamState {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::uint64_t t = 0;
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
};

// Bias-corrected Adam update. Leaves gradients in place; the caller resets.
void adam_step(std::span<Tensor> params, AdamState& state);

// --- finite-difference oracle ---------------------------------------------

using ScalarFn = std::function<Tensor(const Tensor&)>;

// Max over coordinates of |analytic - central| / max(|analytic|, |central|,
// 1e-12). x must be a leaf requiring grad; its values are perturbed in place
// and restored. Other leaves touched by f accumulate gradients and are the
// caller's responsibility to reset.
double gradient_check(const ScalarFn& f, Tensor& x, double step = 1e-5);

}  // namespace gnnperf::num
