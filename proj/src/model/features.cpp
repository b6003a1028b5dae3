// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <limits>

#include "gnnperf/model.hpp"

namespace gnnperf::model {

using num::Tensor;

std::string_view to_string(Task t) {
  switch (t) {
    case Task::delay: return "delay";
    case Task::jitter: return "jitter";
    case Task::loss: return "loss";
  }
  return "?";
}

Task parse_task(std::string_view s) {
  if (s == "delay") return Task::delay;
  if (s == "jitter") return Task::jitter;
  if (s == "loss") return Task::loss;
  throw std::invalid_argument("unknown task '" + std::string(s) + "' (expected delay, jitter or loss)");
}

namespace {

std::vector<double> link_loads(const net::Sample& sample) {
  const auto& links = sample.topology.links();
  std::vector<std::vector<double>> rates(links.size());
  for (const auto& f : sample.flows)
    for (const auto& h : f.path) rates[static_cast<std::size_t>(h.link)].push_back(f.traffic.avg_rate_bps);
  // summed in sorted order so flow order cannot change the result
  std::vector<double> load(links.size(), 0.0);
  for (std::size_t l = 0; l < links.size(); ++l) {
    std::sort(rates[l].begin(), rates[l].end());
    for (double r : rates[l]) load[l] += r;
    load[l] /= links[l].capacity_bps;
  }
  return load;
}

}  // namespace

FeatureVectors extract_features(const net::Sample& sample) {
  const auto& links = sample.topology.links();
  const std::size_t F = sample.flows.size();

  std::vector<double> flow(F * kFlowFeatures, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    const auto& fl = sample.flows[f];
    double bottleneck = std::numeric_limits<double>::infinity();
    for (const auto& h : fl.path) bottleneck = std::min(bottleneck, links[static_cast<std::size_t>(h.link)].capacity_bps);
    double* row = flow.data() + f * kFlowFeatures;
    row[0] = fl.traffic.avg_rate_bps / bottleneck;
    row[1] = fl.traffic.mean_packet_bits() / kPacketReferenceBits;
    row[2 + static_cast<std::size_t>(std::clamp(fl.traffic.tos, 0, 2))] = 1.0;
    row[5 + static_cast<std::size_t>(fl.traffic.model)] = 1.0;
  }

  const auto load = link_loads(sample);
  std::vector<double> link(links.size() * kLinkFeatures, 0.0);
  std::size_t queue_total = 0;
  for (std::size_t l = 0; l < links.size(); ++l) {
    double* row = link.data() + l * kLinkFeatures;
    row[0] = load[l];
    row[1 + static_cast<std::size_t>(links[l].queues.front().policy)] = 1.0;
    queue_total += links[l].queues.size();
  }

  std::vector<double> queue(queue_total * kQueueFeatures, 0.0);
  std::size_t qi = 0;
  for (const auto& l : links) {
    for (const auto& q : l.queues) {
      double* row = queue.data() + qi * kQueueFeatures;
      row[0] = q.buffer_bits / kBufferReferenceBits;
      row[1 + static_cast<std::size_t>(std::clamp(q.priority, 0, 2))] = 1.0;
      row[4] = q.weight;
      ++qi;
    }
  }

  FeatureVectors fv;
  fv.flow = Tensor::from({F, kFlowFeatures}, std::move(flow));
  fv.link = Tensor::from({links.size(), kLinkFeatures}, std::move(link));
  fv.queue = Tensor::from({queue_total, kQueueFeatures}, std::move(queue));
  return fv;
}

PreparedSample prepare(const net::Sample& sample) {
  sample.validate();
  if (sample.flows.empty()) throw net::DataError("sample has no flows");
  const auto& links = sample.topology.links();
  PreparedSample p;
  p.flow_count = sample.flows.size();
  p.link_count = links.size();
  std::vector<std::size_t> base;
  for (const auto& l : links) {
    base.push_back(p.queue_count);
    p.queue_count += l.queues.size();
  }
  p.features = extract_features(sample);

  std::size_t max_len = 0;
  for (const auto& f : sample.flows) max_len = std::max(max_len, f.path.size());
  p.hop_flows.resize(max_len);
  p.hop_queues.resize(max_len);
  p.hop_links.resize(max_len);
  for (std::size_t f = 0; f < sample.flows.size(); ++f) {
    const auto& path = sample.flows[f].path;
    for (std::size_t k = 0; k < path.size(); ++k) {
      const auto l = static_cast<std::size_t>(path[k].link);
      const auto q = base[l] + static_cast<std::size_t>(path[k].queue);
      p.hop_flows[k].push_back(f);
      p.hop_queues[k].push_back(q);
      p.hop_links[k].push_back(l);
      p.path_flows.push_back(f);
      p.path_queues.push_back(q);
    }
  }
  for (const auto& hq : p.hop_queues) p.message_queues.insert(p.message_queues.end(), hq.begin(), hq.end());

  std::size_t max_queues = 0;
  for (const auto& l : links) max_queues = std::max(max_queues, l.queues.size());
  p.position_links.resize(max_queues);
  p.position_queues.resize(max_queues);
  for (std::size_t l = 0; l < links.size(); ++l) {
    for (std::size_t q = 0; q < links[l].queues.size(); ++q) {
      p.position_links[q].push_back(l);
      p.position_queues[q].push_back(base[l] + q);
    }
  }

  std::vector<double> dscale, jscale;
  for (const auto& l : links) {
    for (const auto& q : l.queues) {
      const double s = q.buffer_bits / l.capacity_bps;
      dscale.push_back(s);
      jscale.push_back(s * s);
    }
  }
  p.queue_delay_scale = Tensor::from({p.queue_count, 1}, std::move(dscale));
  p.queue_jitter_scale = Tensor::from({p.queue_count, 1}, std::move(jscale));
  p.transmission = Tensor::from({p.flow_count, 1}, baseline_transmission_only(sample));
  return p;
}

std::vector<double> baseline_transmission_only(const net::Sample& sample) {
  std::vector<double> out;
  out.reserve(sample.flows.size());
  for (const auto& f : sample.flows) out.push_back(net::transmission_lower_bound(sample, f));
  return out;
}

}  // namespace gnnperf::model
