// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnnperf/cells.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace gnnperf::cells {

using num::Tensor;

std::string_view to_string(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return "rnn";
    case CellKind::gru: return "gru";
    case CellKind::lstm: return "lstm";
  }
  return "unknown";
}

CellKind parse_cell_kind(std::string_view name) {
  if (name == "rnn") return CellKind::rnn;
  if (name == "gru") return CellKind::gru;
  if (name == "lstm") return CellKind::lstm;
  throw std::invalid_argument("unknown cell kind '" + std::string(name) + "' (expected rnn, gru or lstm)");
}

std::size_t gate_count(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return 1;
    case CellKind::gru: return 3;
    case CellKind::lstm: return 4;
  }
  return 0;
}

std::vector<std::string> weight_names(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return {"W_h"};
    case CellKind::gru: return {"W_z", "W_r", "W"};
    case CellKind::lstm: return {"W_f", "W_i", "W_o", "W_c"};
  }
  return {};
}

std::vector<std::string> bias_names(CellKind kind) {
  switch (kind) {
    case CellKind::rnn: return {"b_h"};
    case CellKind::gru: return {"b_z", "b_r", "b"};
    case CellKind::lstm: return {"b_f", "b_i", "b_o", "b_c"};
  }
  return {};
}

std::size_t CellParams::count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += w.size();
  for (const auto& b : biases) n += b.size();
  return n;
}

std::size_t param_count(CellKind kind, std::size_t input_dim, std::size_t hidden_dim) {
  if (input_dim < 1 || hidden_dim < 1) throw std::invalid_argument("param_count: dimensions must be >= 1");
  return gate_count(kind) * (input_dim * hidden_dim + hidden_dim * hidden_dim + hidden_dim);
}

CellParams init_params(CellKind kind, std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed) {
  if (input_dim < 1 || hidden_dim < 1) throw std::invalid_argument("init_params: dimensions must be >= 1");
  CellParams p;
  p.kind = kind;
  p.input_dim = input_dim;
  p.hidden_dim = hidden_dim;
  std::mt19937_64 rng(seed);
  const double bound = std::sqrt(6.0 / static_cast<double>(input_dim + 2 * hidden_dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  const std::size_t fan_in = input_dim + hidden_dim;
  for (std::size_t g = 0; g < gate_count(kind); ++g) {
    std::vector<double> w(hidden_dim * fan_in);
    for (auto& v : w) v = dist(rng);
    p.weights.push_back(Tensor::from({hidden_dim, fan_in}, std::move(w), true));
    const double b0 = (kind == CellKind::lstm && g == 0) ? 1.0 : 0.0;
    p.biases.push_back(Tensor::full({hidden_dim}, b0, true));
  }
  return p;
}

CellState zero_state(CellKind kind, std::size_t batch, std::size_t hidden_dim) {
  CellState s;
  s.h = Tensor::zeros({batch, hidden_dim});
  if (kind == CellKind::lstm) s.c = Tensor::zeros({batch, hidden_dim});
  return s;
}

namespace {

void check_dims(const CellParams& p, const CellState& s, const Tensor& x) {
  auto fail = [&](const std::string& what) {
    throw num::ShapeError(std::string(to_string(p.kind)) + " cell_step: " + what);
  };
  if (p.weights.size() != gate_count(p.kind) || p.biases.size() != gate_count(p.kind)) fail("wrong gate count");
  if (!s.h.defined()) fail("missing hidden state");
  if (x.rank() != 2 || x.shape()[1] != p.input_dim) {
    fail("input shape " + num::shape_string(x.shape()) + " does not match input_dim " + std::to_string(p.input_dim));
  }
  if (s.h.rank() != 2 || s.h.shape()[1] != p.hidden_dim || s.h.shape()[0] != x.shape()[0]) {
    fail("hidden shape " + num::shape_string(s.h.shape()) + " does not match input " + num::shape_string(x.shape()) +
         " and hidden_dim " + std::to_string(p.hidden_dim));
  }
  if (p.kind == CellKind::lstm) {
    if (!s.c.defined()) fail("LSTM state is missing the cell vector c");
    if (s.c.shape() != s.h.shape()) fail("cell shape " + num::shape_string(s.c.shape()) + " differs from hidden");
  }
}

}  // namespace

CellState cell_step(const CellParams& p, const CellState& s, const Tensor& x) {
  check_dims(p, s, x);
  const auto& W = p.weights;
  const auto& b = p.biases;
  CellState out;
  switch (p.kind) {
    case CellKind::rnn: {
      const Tensor hx = num::concat_last_axis(s.h, x);
      out.h = num::tanh(num::linear(hx, W[0], b[0]));
      break;
    }
    case CellKind::gru: {
      const Tensor hx = num::concat_last_axis(s.h, x);
      const Tensor z = num::sigmoid(num::linear(hx, W[0], b[0]));
      const Tensor r = num::sigmoid(num::linear(hx, W[1], b[1]));
      const Tensor rhx = num::concat_last_axis(num::hadamard(r, s.h), x);
      const Tensor candidate = num::tanh(num::linear(rhx, W[2], b[2]));
      const Tensor keep = num::add_scalar(num::scalar_mul(z, -1.0), 1.0);
      out.h = num::add(num::hadamard(keep, s.h), num::hadamard(z, candidate));
      break;
    }
    case CellKind::lstm: {
      const Tensor hx = num::concat_last_axis(s.h, x);
      const Tensor f = num::sigmoid(num::linear(hx, W[0], b[0]));
      const Tensor i = num::sigmoid(num::linear(hx, W[1], b[1]));
      const Tensor o = num::sigmoid(num::linear(hx, W[2], b[2]));
      const Tensor candidate = num::tanh(num::linear(hx, W[3], b[3]));
      out.c = num::add(num::hadamard(f, s.c), num::hadamard(i, candidate));
      out.h = num::hadamard(o, num::tanh(out.c));
      break;
    }
  }
  return out;
}

}  // namespace gnnperf::cells
