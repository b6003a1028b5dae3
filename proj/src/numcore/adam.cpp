// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "node.hpp"

namespace gnnperf::num {

void adam_step(std::span<Tensor> params, AdamState& state) {
  if (!(state.learning_rate > 0.0)) throw std::invalid_argument("adam: learning rate must be positive");
  const bool fresh = state.m.empty() && state.v.empty() && state.t == 0;
  if (!fresh && (state.m.size() != params.size() || state.v.size() != params.size())) {
    throw GradError("adam: parameter count changed between steps (" + std::to_string(state.m.size()) + " -> " +
                    std::to_string(params.size()) + ")");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i].has_grad()) {
      throw GradError("adam: parameter " + std::to_string(i) + " of shape " + shape_string(params[i].shape()) +
                      " has no gradient");
    }
    if (!fresh && state.m[i].size() != params[i].size()) {
      throw GradError("adam: parameter " + std::to_string(i) + " changed size");
    }
  }
  if (fresh) {
    for (const auto& p : params) {
      state.m.emplace_back(p.size(), 0.0);
      state.v.emplace_back(p.size(), 0.0);
    }
  }

  state.t += 1;
  const double b1 = state.beta1, b2 = state.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto values = params[i].mutable_values();
    auto grad = params[i].grad();
    auto& m = state.m[i];
    auto& v = state.v[i];
    for (std::size_t j = 0; j < values.size(); ++j) {
      const double g = grad[j];
      m[j] = b1 * m[j] + (1.0 - b1) * g;
      v[j] = b2 * v[j] + (1.0 - b2) * g * g;
      const double mhat = m[j] / c1;
      const double vhat = v[j] / c2;
      values[j] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
    }
  }
}

}  // namespace gnnperf::num
