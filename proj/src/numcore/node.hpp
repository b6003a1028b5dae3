// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "gnnperf/numcore.hpp"

namespace gnnperf::num::detail {

struct Node {
  Shape shape;
  std::vector<double> value;
  // Empty means "no gradient".
  std::vector<double> grad;
  bool requires_grad = false;
  OpKind op = OpKind::leaf;
  std::uint64_t seq = 0;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
};

std::uint64_t next_sequence();

std::size_t element_count(const Shape& shape);

// Gradient buffer of n, allocated as zeros on first use.
inline std::vector<double>& grad_buffer(Node& n) {
  if (n.grad.empty()) n.grad.assign(n.value.size(), 0.0);
  return n.grad;
}

// Builds the output node; attaches inputs and the backward rule only when
// some input requires grad.
Tensor make_result(OpKind op, Shape shape, std::vector<double> value,
                   std::vector<std::shared_ptr<Node>> inputs,
                   std::function<void(Node&)> backward);

}  // namespace gnnperf::num::detail
