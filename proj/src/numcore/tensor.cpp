// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <atomic>
#include <sstream>
#include <unordered_set>

#include "node.hpp"

namespace gnnperf::num {

namespace detail {

std::uint64_t next_sequence() {
  static std::atomic<std::uint64_t> counter{0};
  return counter.fetch_add(1, std::memory_order_relaxed) + 1;
}

std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto d : shape) n *= d;
  return n;
}

Tensor make_result(OpKind op, Shape shape, std::vector<double> value,
                   std::vector<std::shared_ptr<Node>> inputs,
                   std::function<void(Node&)> backward) {
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(value);
  node->op = op;
  node->seq = next_sequence();
  bool any = false;
  for (const auto& in : inputs) any = any || in->requires_grad;
  if (any) {
    node->requires_grad = true;
    node->inputs = std::move(inputs);
    node->backward = std::move(backward);
  }
  return Tensor(std::move(node));
}

}  // namespace detail

using detail::Node;

std::string shape_string(const Shape& shape) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) os << ',';
    os << shape[i];
  }
  os << ']';
  return os.str();
}

namespace {

std::shared_ptr<Node> make_leaf(Shape shape, std::vector<double> values, bool requires_grad) {
  for (auto d : shape) {
    if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_string(shape));
  }
  if (shape.empty()) throw ShapeError("tensor shape must have at least one axis");
  if (detail::element_count(shape) != values.size()) {
    throw ShapeError("tensor shape " + shape_string(shape) + " does not match " +
                     std::to_string(values.size()) + " values");
  }
  auto node = std::make_shared<Node>();
  node->shape = std::move(shape);
  node->value = std::move(values);
  node->requires_grad = requires_grad;
  node->op = OpKind::leaf;
  node->seq = detail::next_sequence();
  return node;
}

const Node& deref(const std::shared_ptr<Node>& node) {
  if (!node) throw std::logic_error("use of an undefined tensor");
  return *node;
}

}  // namespace

Tensor Tensor::zeros(Shape shape, bool requires_grad) {
  auto n = detail::element_count(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, 0.0), requires_grad));
}

Tensor Tensor::full(Shape shape, double value, bool requires_grad) {
  auto n = detail::element_count(shape);
  return Tensor(make_leaf(std::move(shape), std::vector<double>(n, value), requires_grad));
}

Tensor Tensor::from(Shape shape, std::vector<double> values, bool requires_grad) {
  return Tensor(make_leaf(std::move(shape), std::move(values), requires_grad));
}

Tensor Tensor::scalar(double value, bool requires_grad) {
  return Tensor(make_leaf({1}, {value}, requires_grad));
}

const Shape& Tensor::shape() const { return deref(node_).shape; }
std::size_t Tensor::size() const { return deref(node_).value.size(); }

std::size_t Tensor::rows() const {
  const auto& s = shape();
  return s.size() == 1 ? 1 : s[0];
}

std::size_t Tensor::cols() const { return shape().back(); }

std::span<const double> Tensor::values() const { return deref(node_).value; }

std::span<double> Tensor::mutable_values() {
  if (!is_leaf()) throw std::logic_error("only leaf tensors may be modified in place");
  return node_->value;
}

double Tensor::item() const {
  if (size() != 1) throw ShapeError("item() requires a single-element tensor, got " + shape_string(shape()));
  return node_->value[0];
}

bool Tensor::requires_grad() const { return deref(node_).requires_grad; }
bool Tensor::is_leaf() const { return deref(node_).op == OpKind::leaf; }
bool Tensor::has_grad() const { return !deref(node_).grad.empty(); }
std::span<const double> Tensor::grad() const { return deref(node_).grad; }

void Tensor::set_grad(std::vector<double> grad) {
  if (grad.size() != size()) {
    throw ShapeError("gradient of " + std::to_string(grad.size()) + " values for tensor " +
                     shape_string(shape()));
  }
  node_->grad = std::move(grad);
}

void Tensor::zero_grad() {
  deref(node_);
  node_->grad.clear();
}

Tensor Tensor::detach(bool requires_grad) const {
  const auto& n = deref(node_);
  return Tensor(make_leaf(n.shape, n.value, requires_grad));
}

std::vector<double> Tensor::to_vector() const { return deref(node_).value; }
OpKind Tensor::op() const { return deref(node_).op; }
std::uint64_t Tensor::sequence() const { return deref(node_).seq; }

void backward(const Tensor& loss) {
  if (!loss.defined()) throw GradError("backward on an undefined tensor");
  if (loss.size() != 1) {
    throw GradError("backward requires a scalar loss, got shape " + shape_string(loss.shape()));
  }
  if (!loss.requires_grad()) throw GradError("loss is not connected to the tape");

  std::vector<Node*> order;
  std::unordered_set<Node*> seen;
  std::vector<Node*> stack{loss.node().get()};
  seen.insert(stack.back());
  while (!stack.empty()) {
    Node* n = stack.back();
    stack.pop_back();
    order.push_back(n);
    for (const auto& in : n->inputs) {
      if (in->requires_grad && seen.insert(in.get()).second) stack.push_back(in.get());
    }
  }
  for (Node* n : order) {
    if (n->op == OpKind::leaf) {
      if (!n->grad.empty()) {
        throw GradError("gradient already populated on a leaf of shape " + shape_string(n->shape) +
                        "; reset gradients before calling backward again");
      }
    } else {
      n->grad.clear();
    }
  }
  std::sort(order.begin(), order.end(), [](const Node* a, const Node* b) { return a->seq > b->seq; });

  loss.node()->grad.assign(1, 1.0);
  for (Node* n : order) {
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

}  // namespace gnnperf::num
