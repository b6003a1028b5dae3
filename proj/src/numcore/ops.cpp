// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <string>

#include "node.hpp"

namespace gnnperf::num {

using detail::grad_buffer;
using detail::make_result;
using detail::Node;

std::string_view op_name(OpKind kind) {
  switch (kind) {
    case OpKind::matmul: return "matmul";
    case OpKind::add: return "add";
    case OpKind::hadamard: return "hadamard";
    case OpKind::concat_last_axis: return "concat_last_axis";
    case OpKind::tanh: return "tanh";
    case OpKind::sigmoid: return "sigmoid";
    case OpKind::relu: return "relu";
    case OpKind::reduce_mean: return "reduce_mean";
    case OpKind::reduce_sum: return "reduce_sum";
    case OpKind::scalar_mul: return "scalar_mul";
    case OpKind::sub: return "sub";
    case OpKind::add_bias: return "add_bias";
    case OpKind::add_scalar: return "add_scalar";
    case OpKind::transpose: return "transpose";
    case OpKind::softplus: return "softplus";
    case OpKind::abs: return "abs";
    case OpKind::clamp: return "clamp";
    case OpKind::concat_rows: return "concat_rows";
    case OpKind::gather_rows: return "gather_rows";
    case OpKind::scatter_add_rows: return "scatter_add_rows";
    case OpKind::assign_rows: return "assign_rows";
    case OpKind::linear: return "linear";
    case OpKind::leaf: return "leaf";
  }
  return "unknown";
}

namespace {

[[noreturn]] void mismatch(OpKind op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op_name(op)) + ": shape mismatch " + shape_string(a.shape()) + " vs " +
                   shape_string(b.shape()));
}

void require_rank2(OpKind op, const Tensor& a) {
  if (a.rank() != 2) {
    throw ShapeError(std::string(op_name(op)) + ": expected a 2-D tensor, got " + shape_string(a.shape()));
  }
}

void require_defined(const Tensor& t) {
  if (!t.defined()) throw std::logic_error("operation on an undefined tensor");
}

// Elementwise unary op: forward f(x), backward df(x, y) * dy.
template <typename F, typename DF>
Tensor unary(OpKind op, const Tensor& x, F f, DF df) {
  require_defined(x);
  auto in = x.values();
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = f(in[i]);
  return make_result(op, x.shape(), std::move(out), {x.node()}, [df](Node& self) {
    Node& a = *self.inputs[0];
    if (!a.requires_grad) return;
    auto& g = grad_buffer(a);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * df(a.value[i], self.value[i]);
  });
}

double clamp_activation(double x) { return std::clamp(x, -kActivationClamp, kActivationClamp); }

double stable_sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  require_rank2(OpKind::matmul, a);
  require_rank2(OpKind::matmul, b);
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) mismatch(OpKind::matmul, a, b);
  std::vector<double> out(m * n, 0.0);
  const double* av = a.values().data();
  const double* bv = b.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    double* row = out.data() + i * n;
    for (std::size_t p = 0; p < k; ++p) {
      const double s = av[i * k + p];
      const double* brow = bv + p * n;
      for (std::size_t j = 0; j < n; ++j) row[j] += s * brow[j];
    }
  }
  return make_result(OpKind::matmul, {m, n}, std::move(out), {a.node(), b.node()}, [m, k, n](Node& self) {
    Node& A = *self.inputs[0];
    Node& B = *self.inputs[1];
    const double* g = self.grad.data();
    if (A.requires_grad) {
      auto& ga = grad_buffer(A);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          double s = 0.0;
          for (std::size_t j = 0; j < n; ++j) s += g[i * n + j] * B.value[p * n + j];
          ga[i * k + p] += s;
        }
    }
    if (B.requires_grad) {
      auto& gb = grad_buffer(B);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t p = 0; p < k; ++p) {
          const double s = A.value[i * k + p];
          for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += s * g[i * n + j];
        }
    }
  });
}

Tensor linear(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_defined(x);
  require_defined(weight);
  require_defined(bias);
  require_rank2(OpKind::linear, x);
  require_rank2(OpKind::linear, weight);
  const std::size_t m = x.shape()[0], k = x.shape()[1], n = weight.shape()[0];
  if (weight.shape()[1] != k) mismatch(OpKind::linear, x, weight);
  if (bias.size() != n) mismatch(OpKind::linear, weight, bias);
  std::vector<double> out(m * n);
  const double* xv = x.values().data();
  const double* wv = weight.values().data();
  const double* bv = bias.values().data();
  for (std::size_t i = 0; i < m; ++i) {
    const double* xrow = xv + i * k;
    for (std::size_t j = 0; j < n; ++j) {
      const double* wrow = wv + j * k;
      double s = 0.0;
      for (std::size_t p = 0; p < k; ++p) s += xrow[p] * wrow[p];
      out[i * n + j] = s + bv[j];
    }
  }
  return make_result(OpKind::linear, {m, n}, std::move(out), {x.node(), weight.node(), bias.node()},
                     [m, k, n](Node& self) {
                       Node& X = *self.inputs[0];
                       Node& W = *self.inputs[1];
                       Node& B = *self.inputs[2];
                       const double* g = self.grad.data();
                       if (X.requires_grad) {
                         auto& gx = grad_buffer(X);
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < n; ++j) {
                             const double s = g[i * n + j];
                             const double* wrow = W.value.data() + j * k;
                             double* gxrow = gx.data() + i * k;
                             for (std::size_t p = 0; p < k; ++p) gxrow[p] += s * wrow[p];
                           }
                       }
                       if (W.requires_grad) {
                         auto& gw = grad_buffer(W);
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < n; ++j) {
                             const double s = g[i * n + j];
                             const double* xrow = X.value.data() + i * k;
                             double* gwrow = gw.data() + j * k;
                             for (std::size_t p = 0; p < k; ++p) gwrow[p] += s * xrow[p];
                           }
                       }
                       if (B.requires_grad) {
                         auto& gb = grad_buffer(B);
                         for (std::size_t i = 0; i < m; ++i)
                           for (std::size_t j = 0; j < n; ++j) gb[j] += g[i * n + j];
                       }
                     });
}

Tensor add(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  if (a.shape() != b.shape()) mismatch(OpKind::add, a, b);
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + bv[i];
  return make_result(OpKind::add, a.shape(), std::move(out), {a.node(), b.node()}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (!in->requires_grad) continue;
      auto& g = grad_buffer(*in);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
  });
}

Tensor sub(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  if (a.shape() != b.shape()) mismatch(OpKind::sub, a, b);
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] - bv[i];
  return make_result(OpKind::sub, a.shape(), std::move(out), {a.node(), b.node()}, [](Node& self) {
    Node& A = *self.inputs[0];
    Node& B = *self.inputs[1];
    if (A.requires_grad) {
      auto& g = grad_buffer(A);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (B.requires_grad) {
      auto& g = grad_buffer(B);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] -= self.grad[i];
    }
  });
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  if (a.shape() != b.shape()) mismatch(OpKind::hadamard, a, b);
  auto av = a.values(), bv = b.values();
  std::vector<double> out(av.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
  return make_result(OpKind::hadamard, a.shape(), std::move(out), {a.node(), b.node()}, [](Node& self) {
    Node& A = *self.inputs[0];
    Node& B = *self.inputs[1];
    if (A.requires_grad) {
      auto& g = grad_buffer(A);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * B.value[i];
    }
    if (B.requires_grad) {
      auto& g = grad_buffer(B);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i] * A.value[i];
    }
  });
}

Tensor add_bias(const Tensor& a, const Tensor& bias) {
  require_defined(a);
  require_defined(bias);
  require_rank2(OpKind::add_bias, a);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (bias.size() != n) mismatch(OpKind::add_bias, a, bias);
  auto av = a.values(), bv = bias.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[i * n + j] = av[i * n + j] + bv[j];
  return make_result(OpKind::add_bias, a.shape(), std::move(out), {a.node(), bias.node()}, [m, n](Node& self) {
    Node& A = *self.inputs[0];
    Node& B = *self.inputs[1];
    if (A.requires_grad) {
      auto& g = grad_buffer(A);
      for (std::size_t i = 0; i < g.size(); ++i) g[i] += self.grad[i];
    }
    if (B.requires_grad) {
      auto& g = grad_buffer(B);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) g[j] += self.grad[i * n + j];
    }
  });
}

Tensor scalar_mul(const Tensor& x, double s) {
  return unary(OpKind::scalar_mul, x, [s](double v) { return s * v; }, [s](double, double) { return s; });
}

Tensor add_scalar(const Tensor& x, double s) {
  return unary(OpKind::add_scalar, x, [s](double v) { return v + s; }, [](double, double) { return 1.0; });
}

Tensor tanh(const Tensor& x) {
  return unary(
      OpKind::tanh, x, [](double v) { return std::tanh(clamp_activation(v)); },
      [](double v, double y) { return std::abs(v) > kActivationClamp ? 0.0 : 1.0 - y * y; });
}

Tensor sigmoid(const Tensor& x) {
  return unary(
      OpKind::sigmoid, x, [](double v) { return stable_sigmoid(clamp_activation(v)); },
      [](double v, double y) { return std::abs(v) > kActivationClamp ? 0.0 : y * (1.0 - y); });
}

Tensor relu(const Tensor& x) {
  return unary(
      OpKind::relu, x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor softplus(const Tensor& x) {
  return unary(
      OpKind::softplus, x,
      [](double v) { return v > 0.0 ? v + std::log1p(std::exp(-v)) : std::log1p(std::exp(v)); },
      [](double v, double) { return stable_sigmoid(v); });
}

Tensor abs(const Tensor& x) {
  return unary(
      OpKind::abs, x, [](double v) { return std::abs(v); },
      [](double v, double) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor clamp(const Tensor& x, double lo, double hi) {
  if (!(lo <= hi)) throw std::invalid_argument("clamp: lower bound exceeds upper bound");
  return unary(
      OpKind::clamp, x, [lo, hi](double v) { return std::clamp(v, lo, hi); },
      [lo, hi](double v, double) { return (v >= lo && v <= hi) ? 1.0 : 0.0; });
}

Tensor reduce_sum(const Tensor& x) {
  require_defined(x);
  double s = 0.0;
  for (double v : x.values()) s += v;
  return make_result(OpKind::reduce_sum, {1}, {s}, {x.node()}, [](Node& self) {
    Node& a = *self.inputs[0];
    auto& g = grad_buffer(a);
    for (auto& gi : g) gi += self.grad[0];
  });
}

Tensor reduce_mean(const Tensor& x) {
  require_defined(x);
  double s = 0.0;
  for (double v : x.values()) s += v;
  const double n = static_cast<double>(x.size());
  return make_result(OpKind::reduce_mean, {1}, {s / n}, {x.node()}, [n](Node& self) {
    Node& a = *self.inputs[0];
    auto& g = grad_buffer(a);
    for (auto& gi : g) gi += self.grad[0] / n;
  });
}

Tensor transpose(const Tensor& a) {
  require_defined(a);
  require_rank2(OpKind::transpose, a);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  auto av = a.values();
  std::vector<double> out(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out[j * m + i] = av[i * n + j];
  return make_result(OpKind::transpose, {n, m}, std::move(out), {a.node()}, [m, n](Node& self) {
    auto& g = grad_buffer(*self.inputs[0]);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[j * m + i];
  });
}

Tensor concat_last_axis(const Tensor& a, const Tensor& b) {
  require_defined(a);
  require_defined(b);
  const auto& sa = a.shape();
  const auto& sb = b.shape();
  if (sa.size() != sb.size() || !std::equal(sa.begin(), sa.end() - 1, sb.begin())) {
    mismatch(OpKind::concat_last_axis, a, b);
  }
  const std::size_t la = sa.back(), lb = sb.back(), outer = a.size() / la;
  Shape shape = sa;
  shape.back() = la + lb;
  auto av = a.values(), bv = b.values();
  std::vector<double> out(outer * (la + lb));
  for (std::size_t r = 0; r < outer; ++r) {
    std::copy_n(av.data() + r * la, la, out.data() + r * (la + lb));
    std::copy_n(bv.data() + r * lb, lb, out.data() + r * (la + lb) + la);
  }
  return make_result(OpKind::concat_last_axis, std::move(shape), std::move(out), {a.node(), b.node()},
                     [la, lb, outer](Node& self) {
                       Node& A = *self.inputs[0];
                       Node& B = *self.inputs[1];
                       if (A.requires_grad) {
                         auto& g = grad_buffer(A);
                         for (std::size_t r = 0; r < outer; ++r)
                           for (std::size_t j = 0; j < la; ++j) g[r * la + j] += self.grad[r * (la + lb) + j];
                       }
                       if (B.requires_grad) {
                         auto& g = grad_buffer(B);
                         for (std::size_t r = 0; r < outer; ++r)
                           for (std::size_t j = 0; j < lb; ++j) g[r * lb + j] += self.grad[r * (la + lb) + la + j];
                       }
                     });
}

Tensor concat_rows(std::span<const Tensor> parts) {
  if (parts.empty()) throw ShapeError("concat_rows: no inputs");
  std::size_t cols = 0, rows = 0;
  std::vector<std::shared_ptr<Node>> inputs;
  for (const auto& p : parts) {
    require_defined(p);
    require_rank2(OpKind::concat_rows, p);
    if (inputs.empty()) cols = p.shape()[1];
    if (p.shape()[1] != cols) mismatch(OpKind::concat_rows, parts[0], p);
    rows += p.shape()[0];
    inputs.push_back(p.node());
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const auto& p : parts) out.insert(out.end(), p.values().begin(), p.values().end());
  return make_result(OpKind::concat_rows, {rows, cols}, std::move(out), std::move(inputs), [](Node& self) {
    std::size_t offset = 0;
    for (auto& in : self.inputs) {
      const std::size_t n = in->value.size();
      if (in->requires_grad) {
        auto& g = grad_buffer(*in);
        for (std::size_t i = 0; i < n; ++i) g[i] += self.grad[offset + i];
      }
      offset += n;
    }
  });
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index) {
  require_defined(a);
  require_rank2(OpKind::gather_rows, a);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (index.empty()) throw ShapeError("gather_rows: empty index");
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::vector<double> out(idx.size() * n);
  auto av = a.values();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] >= m) {
      throw ShapeError("gather_rows: row " + std::to_string(idx[i]) + " out of range for " + shape_string(a.shape()));
    }
    std::copy_n(av.data() + idx[i] * n, n, out.data() + i * n);
  }
  const std::size_t rows = idx.size();
  return make_result(OpKind::gather_rows, {rows, n}, std::move(out), {a.node()},
                     [idx = std::move(idx), n](Node& self) {
                       auto& g = grad_buffer(*self.inputs[0]);
                       for (std::size_t i = 0; i < idx.size(); ++i)
                         for (std::size_t j = 0; j < n; ++j) g[idx[i] * n + j] += self.grad[i * n + j];
                     });
}

Tensor scatter_add_rows(const Tensor& a, std::span<const std::size_t> index, std::size_t out_rows) {
  require_defined(a);
  require_rank2(OpKind::scatter_add_rows, a);
  const std::size_t m = a.shape()[0], n = a.shape()[1];
  if (index.size() != m) {
    throw ShapeError("scatter_add_rows: " + std::to_string(index.size()) + " indices for " + shape_string(a.shape()));
  }
  if (out_rows == 0) throw ShapeError("scatter_add_rows: zero output rows");
  std::vector<std::size_t> idx(index.begin(), index.end());

  // Bucket source rows by destination.
  std::vector<std::size_t> start(out_rows + 1, 0);
  for (auto r : idx) {
    if (r >= out_rows) throw ShapeError("scatter_add_rows: destination row " + std::to_string(r) + " out of range");
    ++start[r + 1];
  }
  for (std::size_t r = 0; r < out_rows; ++r) start[r + 1] += start[r];
  std::vector<std::size_t> members(m);
  {
    auto fill = start;
    for (std::size_t i = 0; i < m; ++i) members[fill[idx[i]]++] = i;
  }

  auto av = a.values();
  std::vector<double> out(out_rows * n, 0.0);
  std::vector<double> scratch;
  for (std::size_t r = 0; r < out_rows; ++r) {
    const std::size_t lo = start[r], hi = start[r + 1];
    if (hi - lo == 1) {
      std::copy_n(av.data() + members[lo] * n, n, out.data() + r * n);
      continue;
    }
    for (std::size_t j = 0; j < n && hi > lo; ++j) {
      scratch.clear();
      for (std::size_t t = lo; t < hi; ++t) scratch.push_back(av[members[t] * n + j]);
      std::sort(scratch.begin(), scratch.end());
      double s = 0.0;
      for (double v : scratch) s += v;
      out[r * n + j] = s;
    }
  }
  return make_result(OpKind::scatter_add_rows, {out_rows, n}, std::move(out), {a.node()},
                     [idx = std::move(idx), n](Node& self) {
                       auto& g = grad_buffer(*self.inputs[0]);
                       for (std::size_t i = 0; i < idx.size(); ++i)
                         for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[idx[i] * n + j];
                     });
}

Tensor assign_rows(const Tensor& base, std::span<const std::size_t> index, const Tensor& rows) {
  require_defined(base);
  require_defined(rows);
  require_rank2(OpKind::assign_rows, base);
  require_rank2(OpKind::assign_rows, rows);
  const std::size_t m = base.shape()[0], n = base.shape()[1];
  if (rows.shape()[1] != n || rows.shape()[0] != index.size()) mismatch(OpKind::assign_rows, base, rows);
  std::vector<std::size_t> idx(index.begin(), index.end());
  std::vector<char> replaced(m, 0);
  for (auto r : idx) {
    if (r >= m) throw ShapeError("assign_rows: row " + std::to_string(r) + " out of range");
    if (replaced[r]) throw ShapeError("assign_rows: row " + std::to_string(r) + " assigned twice");
    replaced[r] = 1;
  }
  std::vector<double> out(base.values().begin(), base.values().end());
  auto rv = rows.values();
  for (std::size_t i = 0; i < idx.size(); ++i) std::copy_n(rv.data() + i * n, n, out.data() + idx[i] * n);
  return make_result(OpKind::assign_rows, base.shape(), std::move(out), {base.node(), rows.node()},
                     [idx = std::move(idx), replaced = std::move(replaced), m, n](Node& self) {
                       Node& B = *self.inputs[0];
                       Node& R = *self.inputs[1];
                       if (B.requires_grad) {
                         auto& g = grad_buffer(B);
                         for (std::size_t r = 0; r < m; ++r) {
                           if (replaced[r]) continue;
                           for (std::size_t j = 0; j < n; ++j) g[r * n + j] += self.grad[r * n + j];
                         }
                       }
                       if (R.requires_grad) {
                         auto& g = grad_buffer(R);
                         for (std::size_t i = 0; i < idx.size(); ++i)
                           for (std::size_t j = 0; j < n; ++j) g[i * n + j] += self.grad[idx[i] * n + j];
                       }
                     });
}

Tensor apply(OpKind kind, std::span<const Tensor> inputs, double scalar) {
  auto arity = [&](std::size_t want) {
    if (inputs.size() != want) {
      throw std::invalid_argument(std::string(op_name(kind)) + ": expected " + std::to_string(want) +
                                  " inputs, got " + std::to_string(inputs.size()));
    }
  };
  switch (kind) {
    case OpKind::matmul: arity(2); return matmul(inputs[0], inputs[1]);
    case OpKind::add: arity(2); return add(inputs[0], inputs[1]);
    case OpKind::sub: arity(2); return sub(inputs[0], inputs[1]);
    case OpKind::hadamard: arity(2); return hadamard(inputs[0], inputs[1]);
    case OpKind::add_bias: arity(2); return add_bias(inputs[0], inputs[1]);
    case OpKind::concat_last_axis: arity(2); return concat_last_axis(inputs[0], inputs[1]);
    case OpKind::tanh: arity(1); return tanh(inputs[0]);
    case OpKind::sigmoid: arity(1); return sigmoid(inputs[0]);
    case OpKind::relu: arity(1); return relu(inputs[0]);
    case OpKind::softplus: arity(1); return softplus(inputs[0]);
    case OpKind::abs: arity(1); return abs(inputs[0]);
    case OpKind::transpose: arity(1); return transpose(inputs[0]);
    case OpKind::reduce_mean: arity(1); return reduce_mean(inputs[0]);
    case OpKind::reduce_sum: arity(1); return reduce_sum(inputs[0]);
    case OpKind::scalar_mul: arity(1); return scalar_mul(inputs[0], scalar);
    case OpKind::add_scalar: arity(1); return add_scalar(inputs[0], scalar);
    case OpKind::concat_rows: return concat_rows(inputs);
    default: break;
  }
  throw std::invalid_argument(std::string("apply: ") + std::string(op_name(kind)) +
                              " needs index arguments; call it directly");
}

}  // namespace gnnperf::num
