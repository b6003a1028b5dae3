// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>

#include "gnnperf/common.hpp"
#include "gnnperf/model.hpp"

namespace gnnperf::model {

using cells::CellKind;
using num::Tensor;

namespace {

// Loss-head logits are bounded so the sigmoid stays strictly inside (0,1).
constexpr double kLossLogitBound = 30.0;
// Untrained queues start out nearly empty rather than half full.
constexpr double kOccupancyPrior = 0.02;

Tensor glorot(std::size_t out, std::size_t in, std::mt19937_64& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(in + out));
  std::uniform_real_distribution<double> dist(-bound, bound);
  std::vector<double> w(out * in);
  for (auto& v : w) v = dist(rng);
  return Tensor::from({out, in}, std::move(w), true);
}

}  // namespace

void ModelConfig::validate() const {
  if (hidden_dim < 1) throw std::invalid_argument("model: hidden_dim must be >= 1");
  if (iterations < 1) throw std::invalid_argument("model: iterations must be >= 1");
}

Model::Model(ModelConfig config) : config_(config) {
  config_.validate();
  const std::size_t h = config_.hidden_dim;
  const std::size_t w = config_.effective_readout_width();
  const auto seed = config_.seed;
  flow_encoder_ = add_mlp("flow_encoder", kFlowFeatures, h, h, derive_seed(seed, 1));
  link_encoder_ = add_mlp("link_encoder", kLinkFeatures, h, h, derive_seed(seed, 2));
  queue_encoder_ = add_mlp("queue_encoder", kQueueFeatures, h, h, derive_seed(seed, 3));
  flow_cell_ = add_cell("flow_cell", 2 * h, derive_seed(seed, 4));
  queue_cell_ = add_cell("queue_cell", h, derive_seed(seed, 5));
  link_cell_ = add_cell("link_cell", h, derive_seed(seed, 6));
  delay_readout_ = add_mlp("delay_readout", h, w, 1, derive_seed(seed, 7));
  params_[delay_readout_.b2].tensor.mutable_values()[0] = std::log(kOccupancyPrior / (1.0 - kOccupancyPrior));
  jitter_readout_ = add_mlp("jitter_readout", h, w, 1, derive_seed(seed, 8));
  loss_readout_ = add_mlp("loss_readout", h, w, 1, derive_seed(seed, 9));
}

Model::Mlp Model::add_mlp(const std::string& prefix, std::size_t in, std::size_t hidden, std::size_t out,
                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Mlp m{};
  m.w1 = params_.size();
  params_.push_back({prefix + "/W1", glorot(hidden, in, rng)});
  m.b1 = params_.size();
  params_.push_back({prefix + "/b1", Tensor::zeros({hidden}, true)});
  m.w2 = params_.size();
  params_.push_back({prefix + "/W2", glorot(out, hidden, rng)});
  m.b2 = params_.size();
  params_.push_back({prefix + "/b2", Tensor::zeros({out}, true)});
  return m;
}

cells::CellParams Model::add_cell(const std::string& prefix, std::size_t input_dim, std::uint64_t seed) {
  auto cp = cells::init_params(config_.cell, input_dim, config_.hidden_dim, seed);
  auto& idx = prefix == "flow_cell" ? flow_cell_idx_ : (prefix == "queue_cell" ? queue_cell_idx_ : link_cell_idx_);
  const auto wn = cells::weight_names(config_.cell);
  const auto bn = cells::bias_names(config_.cell);
  for (std::size_t g = 0; g < wn.size(); ++g) {
    idx.push_back(params_.size());
    params_.push_back({prefix + "/" + wn[g], cp.weights[g]});
  }
  for (std::size_t g = 0; g < bn.size(); ++g) {
    idx.push_back(params_.size());
    params_.push_back({prefix + "/" + bn[g], cp.biases[g]});
  }
  return cp;
}

Tensor Model::run_mlp(const Mlp& m, const Tensor& x, bool relu_output) const {
  Tensor hidden = num::relu(num::linear(x, params_[m.w1].tensor, params_[m.b1].tensor));
  Tensor out = num::linear(hidden, params_[m.w2].tensor, params_[m.b2].tensor);
  return relu_output ? num::relu(out) : out;
}

ModelState Model::encode_initial_states(const PreparedSample& s) const {
  if (s.features.flow.cols() != kFlowFeatures || s.features.link.cols() != kLinkFeatures ||
      s.features.queue.cols() != kQueueFeatures) {
    throw num::ShapeError("encode_initial_states: feature widths do not match the model");
  }
  ModelState st;
  st.flow_h = run_mlp(flow_encoder_, s.features.flow, true);
  st.link_h = run_mlp(link_encoder_, s.features.link, true);
  st.queue_h = run_mlp(queue_encoder_, s.features.queue, true);
  if (config_.cell == CellKind::lstm) {
    st.flow_c = Tensor::zeros({s.flow_count, config_.hidden_dim});
    st.link_c = Tensor::zeros({s.link_count, config_.hidden_dim});
  }
  return st;
}

ModelState Model::message_passing_iteration(const ModelState& state, const PreparedSample& s,
                                            std::size_t /*iteration*/) const {
  const bool lstm = config_.cell == CellKind::lstm;
  if (state.flow_h.rows() != s.flow_count || state.queue_h.rows() != s.queue_count ||
      state.link_h.rows() != s.link_count) {
    throw std::invalid_argument("message_passing_iteration: state does not match the sample's entities");
  }
  ModelState next = state;

  // Stage 1: each flow runs the flow cell along its (queue, link) hops.
  std::vector<Tensor> messages;
  messages.reserve(s.hop_flows.size());
  for (std::size_t k = 0; k < s.hop_flows.size(); ++k) {
    const auto& active = s.hop_flows[k];
    cells::CellState prev;
    prev.h = num::gather_rows(next.flow_h, active);
    if (lstm) prev.c = num::gather_rows(next.flow_c, active);
    const Tensor x =
        num::concat_last_axis(num::gather_rows(state.queue_h, s.hop_queues[k]), num::gather_rows(state.link_h, s.hop_links[k]));
    const auto out = cells::cell_step(flow_cell_, prev, x);
    next.flow_h = num::assign_rows(next.flow_h, active, out.h);
    if (lstm) next.flow_c = num::assign_rows(next.flow_c, active, out.c);
    messages.push_back(out.h);
  }

  // Stage 2: one queue-cell step on the summed per-hop messages.
  const Tensor aggregated = num::scatter_add_rows(num::concat_rows(messages), s.message_queues, s.queue_count);
  cells::CellState qprev;
  qprev.h = state.queue_h;
  if (lstm) qprev.c = Tensor::zeros({s.queue_count, config_.hidden_dim});
  next.queue_h = cells::cell_step(queue_cell_, qprev, aggregated).h;

  // Stage 3: each link runs the link cell over its queues in priority order.
  for (std::size_t p = 0; p < s.position_links.size(); ++p) {
    const auto& active = s.position_links[p];
    cells::CellState prev;
    prev.h = num::gather_rows(next.link_h, active);
    if (lstm) prev.c = num::gather_rows(next.link_c, active);
    const auto out = cells::cell_step(link_cell_, prev, num::gather_rows(next.queue_h, s.position_queues[p]));
    next.link_h = num::assign_rows(next.link_h, active, out.h);
    if (lstm) next.link_c = num::assign_rows(next.link_c, active, out.c);
  }
  return next;
}

Tensor Model::readout(const ModelState& state, const PreparedSample& s, Task head) const {
  switch (head) {
    case Task::delay: {
      const Tensor occupancy = num::sigmoid(run_mlp(delay_readout_, state.queue_h, false));
      const Tensor per_queue = num::hadamard(occupancy, s.queue_delay_scale);
      const Tensor queuing = num::scatter_add_rows(num::gather_rows(per_queue, s.path_queues), s.path_flows, s.flow_count);
      return num::add(s.transmission, queuing);
    }
    case Task::jitter: {
      const Tensor contrib = num::hadamard(num::softplus(run_mlp(jitter_readout_, state.queue_h, false)), s.queue_jitter_scale);
      return num::scatter_add_rows(num::gather_rows(contrib, s.path_queues), s.path_flows, s.flow_count);
    }
    case Task::loss: {
      const Tensor logit = num::clamp(run_mlp(loss_readout_, state.flow_h, false), -kLossLogitBound, kLossLogitBound);
      return num::sigmoid(logit);
    }
  }
  throw std::invalid_argument("readout: unknown head");
}

Predictions Model::forward(const PreparedSample& s) const {
  ModelState st = encode_initial_states(s);
  for (std::size_t it = 0; it < config_.iterations; ++it) st = message_passing_iteration(st, s, it);
  Predictions p;
  p.occupancy = num::sigmoid(run_mlp(delay_readout_, st.queue_h, false));
  const Tensor per_queue = num::hadamard(p.occupancy, s.queue_delay_scale);
  p.delay = num::add(s.transmission,
                     num::scatter_add_rows(num::gather_rows(per_queue, s.path_queues), s.path_flows, s.flow_count));
  p.jitter = readout(st, s, Task::jitter);
  p.loss = readout(st, s, Task::loss);
  return p;
}

std::vector<Tensor> Model::parameter_tensors() const {
  std::vector<Tensor> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.tensor);
  return out;
}

Tensor& Model::parameter(std::string_view name) {
  for (auto& p : params_)
    if (p.name == name) return p.tensor;
  throw std::out_of_range("no parameter named '" + std::string(name) + "'");
}

std::size_t Model::parameter_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += p.tensor.size();
  return n;
}

std::size_t Model::cell_parameter_count() const {
  return flow_cell_.count() + queue_cell_.count() + link_cell_.count();
}

void Model::zero_grad() {
  for (auto& p : params_) p.tensor.zero_grad();
}

Model Model::clone() const {
  Model m(config_);
  m.copy_values_from(*this);
  return m;
}

void Model::copy_values_from(const Model& other) {
  if (other.params_.size() != params_.size()) throw std::invalid_argument("copy_values_from: parameter tables differ");
  for (std::size_t i = 0; i < params_.size(); ++i) {
    const auto src = other.params_[i].tensor.values();
    auto dst = params_[i].tensor.mutable_values();
    if (src.size() != dst.size() || other.params_[i].name != params_[i].name) {
      throw std::invalid_argument("copy_values_from: parameter '" + params_[i].name + "' differs");
    }
    std::copy(src.begin(), src.end(), dst.begin());
  }
}

}  // namespace gnnperf::model
