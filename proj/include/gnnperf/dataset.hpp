// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "gnnperf/netgraph.hpp"
#include "json.hpp"

namespace gnnperf::sim {

struct GenerateConfig {
  std::size_t samples = 1;
  std::uint64_t seed = 1;
  // Flow count per sample, drawn uniformly from [flows_min, flows_max].
  int flows_min = 32;
  int flows_max = 32;
  net::TopologyConfig topology;
  net::TrafficConfig traffic;
  net::QueueConfig queues;
  double duration_s = 2000.0;
  double warmup_s = -1.0;
  // Samples are generated concurrently; output does not depend on this.
  std::size_t threads = 1;

  void validate() const;
};

// Flat object keyed like the command-line flags, e.g.
// {"topology": "power-law", "nodes": "8..12", "flows": "32", "traffic": "poisson,cbr"}.
nlohmann::json to_json(const GenerateConfig& c);
GenerateConfig generate_config_from_json(const nlohmann::json& j);

// Sample i depends only on (seed, i). A sample whose simulation leaves some
// flow without delivered packets is rebuilt from the next attempt seed.
net::Sample generate_sample(const GenerateConfig& c, std::size_t index);
std::vector<net::Sample> generate_dataset(const GenerateConfig& c);

}  // namespace gnnperf::sim
