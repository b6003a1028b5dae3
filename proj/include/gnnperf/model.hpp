// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "gnnperf/cells.hpp"
#include "gnnperf/netgraph.hpp"
#include "gnnperf/numcore.hpp"

namespace gnnperf::model {

enum class Task { delay, jitter, loss };
std::string_view to_string(Task t);
Task parse_task(std::string_view s);

struct ModelConfig {
  std::size_t hidden_dim = 32;
  // Message-passing iterations.
  std::size_t iterations = 8;
  cells::CellKind cell = cells::CellKind::gru;
  // Hidden width of the readout perceptrons; 0 means hidden_dim.
  std::size_t readout_width = 0;
  std::uint64_t seed = 1;

  std::size_t effective_readout_width() const { return readout_width ? readout_width : hidden_dim; }
  void validate() const;
  bool operator==(const ModelConfig&) const = default;
};

// Feature widths.
inline constexpr std::size_t kFlowFeatures = 10;  // rate/bottleneck, size/1000, tos x3, model x5
inline constexpr std::size_t kLinkFeatures = 5;   // load, policy x4
inline constexpr std::size_t kQueueFeatures = 5;  // buffer/32000, priority x3, weight
inline constexpr double kBufferReferenceBits = 32000.0;
inline constexpr double kPacketReferenceBits = 1000.0;

// Dimensionless per-entity inputs, one row per flow, link and queue.
struct FeatureVectors {
  num::Tensor flow;
  num::Tensor link;
  num::Tensor queue;
};

FeatureVectors extract_features(const net::Sample& sample);

// Index tables and constants derived once per sample. Queues are numbered
// globally in (link, queue) order.
struct PreparedSample {
  std::size_t flow_count = 0;
  std::size_t link_count = 0;
  std::size_t queue_count = 0;
  FeatureVectors features;

  // Per hop position k: flows whose path has more than k hops, and the
  // queue and link of their k-th hop.
  std::vector<std::vector<std::size_t>> hop_flows;
  std::vector<std::vector<std::size_t>> hop_queues;
  std::vector<std::vector<std::size_t>> hop_links;
  // hop_queues flattened in the same order (destinations of per-hop messages).
  std::vector<std::size_t> message_queues;

  // Per queue position p: links with more than p queues and their p-th queue.
  std::vector<std::vector<std::size_t>> position_links;
  std::vector<std::vector<std::size_t>> position_queues;

  // Every (flow, hop) pair in flow-major path order.
  std::vector<std::size_t> path_flows;
  std::vector<std::size_t> path_queues;

  // buffer/capacity per queue ([Q,1]) and its square.
  num::Tensor queue_delay_scale;
  num::Tensor queue_jitter_scale;
  // Sum over the path of mean packet size / capacity ([F,1]).
  num::Tensor transmission;
};

PreparedSample prepare(const net::Sample& sample);

struct ModelState {
  num::Tensor flow_h;
  num::Tensor flow_c;  // LSTM only
  num::Tensor queue_h;
  num::Tensor link_h;
  num::Tensor link_c;  // LSTM only
};

struct Predictions {
  num::Tensor delay;      // [F,1] seconds
  num::Tensor jitter;     // [F,1] seconds^2
  num::Tensor loss;       // [F,1] in (0,1)
  num::Tensor occupancy;  // [Q,1] predicted fill fraction
};

struct NamedParam {
  std::string name;
  num::Tensor tensor;
};

class Model {
 public:
  explicit Model(ModelConfig config);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;
  Model(Model&&) = default;
  Model& operator=(Model&&) = default;

  const ModelConfig& config() const { return config_; }

  ModelState encode_initial_states(const PreparedSample& s) const;
  ModelState message_passing_iteration(const ModelState& state, const PreparedSample& s, std::size_t iteration) const;
  // Final per-flow prediction of one head, shape [F,1].
  num::Tensor readout(const ModelState& state, const PreparedSample& s, Task head) const;
  Predictions forward(const PreparedSample& s) const;
  Predictions forward(const net::Sample& sample) const { return forward(prepare(sample)); }

  // Stable order; names look like "flow_cell/W_z".
  const std::vector<NamedParam>& parameters() const { return params_; }
  std::vector<num::Tensor> parameter_tensors() const;
  num::Tensor& parameter(std::string_view name);
  std::size_t parameter_count() const;
  // Parameters of the flow, queue and link cells only.
  std::size_t cell_parameter_count() const;
  void zero_grad();

  // Independent deep copy (no shared storage).
  Model clone() const;
  void copy_values_from(const Model& other);

 private:
  struct Mlp {
    std::size_t w1, b1, w2, b2;  // indices into params_
  };

  Mlp add_mlp(const std::string& prefix, std::size_t in, std::size_t hidden, std::size_t out, std::uint64_t seed);
  cells::CellParams add_cell(const std::string& prefix, std::size_t input_dim, std::uint64_t seed);
  num::Tensor run_mlp(const Mlp& m, const num::Tensor& x, bool relu_output) const;

  ModelConfig config_;
  std::vector<NamedParam> params_;
  Mlp flow_encoder_{}, link_encoder_{}, queue_encoder_{};
  Mlp delay_readout_{}, jitter_readout_{}, loss_readout_{};
  cells::CellParams flow_cell_, queue_cell_, link_cell_;
  std::vector<std::size_t> flow_cell_idx_, queue_cell_idx_, link_cell_idx_;
};

// Per-flow delay that ignores queuing: sum over the path of mean packet
// size / capacity.
std::vector<double> baseline_transmission_only(const net::Sample& sample);

}  // namespace gnnperf::model
