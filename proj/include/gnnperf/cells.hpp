// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gnnperf/numcore.hpp"

namespace gnnperf::cells {

enum class CellKind { rnn, gru, lstm };

std::string_view to_string(CellKind kind);
// Accepts the lowercase names produced by to_string.
CellKind parse_cell_kind(std::string_view name);

// Number of gate matrices: 1 (RNN), 3 (GRU), 4 (LSTM).
std::size_t gate_count(CellKind kind);

// Weight and bias names in gate order:
//   RNN  W_h
//   GRU  W_z (update), W_r (reset), W (candidate)
//   LSTM W_f (forget), W_i (input), W_o (output), W_c (candidate)
std::vector<std::string> weight_names(CellKind kind);
std::vector<std::string> bias_names(CellKind kind);

// Each weight has shape (h, h + d) and multiplies the concatenation
// [h_{t-1}, x_t]; each bias has shape (h).
struct CellParams {
  CellKind kind = CellKind::gru;
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 0;
  std::vector<num::Tensor> weights;
  std::vector<num::Tensor> biases;

  std::size_t count() const;
};

// Rows are independent batch entries: h and c are (B, hidden), x is
// (B, input). c is only defined for LSTM.
struct CellState {
  num::Tensor h;
  num::Tensor c;
};

CellState cell_step(const CellParams& params, const CellState& state, const num::Tensor& x);

// gates * (d*h + h^2 + h).
std::size_t param_count(CellKind kind, std::size_t input_dim, std::size_t hidden_dim);

// Weights uniform in +-sqrt(6 / (d + 2h)), biases zero except the LSTM forget
// bias which starts at 1.
CellParams init_params(CellKind kind, std::size_t input_dim, std::size_t hidden_dim, std::uint64_t seed);

// Zero state for a batch of B rows.
CellState zero_state(CellKind kind, std::size_t batch, std::size_t hidden_dim);

}  // namespace gnnperf::cells
