// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "node.hpp"

namespace gnnperf::num {

double gradient_check(const ScalarFn& f, Tensor& x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("gradient_check: step must be positive");
  if (!x.is_leaf() || !x.requires_grad()) {
    throw std::invalid_argument("gradient_check: x must be a leaf that requires grad");
  }
  x.zero_grad();
  Tensor y = f(x);
  if (y.size() != 1) throw GradError("gradient_check: f must be scalar-valued, got " + shape_string(y.shape()));
  backward(y);
  // x unreachable from y: no gradient was written
  std::vector<double> analytic(x.size(), 0.0);
  if (x.has_grad()) analytic.assign(x.grad().begin(), x.grad().end());
  x.zero_grad();

  auto values = x.mutable_values();
  double worst = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    values[i] = saved + step;
    const double up = f(x).item();
    values[i] = saved - step;
    const double down = f(x).item();
    values[i] = saved;
    const double central = (up - down) / (2.0 * step);
    const double denom = std::max({std::abs(analytic[i]), std::abs(central), 1e-12});
    worst = std::max(worst, std::abs(analytic[i] - central) / denom);
  }
  return worst;
}

}  // namespace gnnperf::num
