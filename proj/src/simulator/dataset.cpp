// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnnperf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "gnnperf/common.hpp"
#include "gnnperf/simulator.hpp"

namespace gnnperf::sim {

using nlohmann::json;

namespace {

constexpr int kMaxAttempts = 8;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double to_number(const std::string& s, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument("config '" + key + "': '" + s + "' is not a number");
}

std::string text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

// "a..b" or "a".
std::pair<double, double> range(const json& v, const std::string& key) {
  const auto s = text(v);
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const double x = to_number(s, key);
    return {x, x};
  }
  const double lo = to_number(s.substr(0, dots), key), hi = to_number(s.substr(dots + 2), key);
  if (lo > hi) throw std::invalid_argument("config '" + key + "': empty range " + s);
  return {lo, hi};
}

std::vector<double> numbers(const json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& x : v) out.push_back(to_number(text(x), key));
  } else {
    for (const auto& s : split_list(text(v))) out.push_back(to_number(s, key));
  }
  if (out.empty()) throw std::invalid_argument("config '" + key + "': empty list");
  return out;
}

std::vector<std::string> names(const json& v) {
  if (v.is_array()) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(text(x));
    return out;
  }
  return split_list(text(v));
}

template <typename T, typename F>
std::vector<T> parse_names(const json& v, const std::string& key, F parse) {
  std::vector<T> out;
  for (const auto& n : names(v)) {
    try {
      out.push_back(parse(n));
    } catch (const std::exception& e) {
      throw std::invalid_argument("config '" + key + "': " + e.what());
    }
  }
  if (out.empty()) throw std::invalid_argument("config '" + key + "': empty list");
  return out;
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : ",") + x;
  return s;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt_range(double lo, double hi) { return lo == hi ? fmt(lo) : fmt(lo) + ".." + fmt(hi); }

}  // namespace

void GenerateConfig::validate() const {
  if (samples < 1) throw std::invalid_argument("generate: --samples must be >= 1");
  if (flows_min < 1 || flows_max < flows_min) throw std::invalid_argument("generate: --flows must be a range of positive counts");
  if (!(duration_s > 0.0)) throw std::invalid_argument("generate: --duration must be > 0");
  if (warmup_s >= duration_s) throw std::invalid_argument("generate: --warmup must be shorter than --duration");
  if (threads < 1) throw std::invalid_argument("generate: --threads must be >= 1");
  const auto& t = topology;
  switch (t.kind) {
    case net::TopologyKind::power_law:
      if (t.min_nodes < 2 || t.max_nodes < t.min_nodes) throw std::invalid_argument("generate: --nodes must be a range >= 2");
      break;
    case net::TopologyKind::fat_tree:
      if (t.k < 2 || t.k % 2) throw std::invalid_argument("generate: --k must be even and >= 2 for fat-tree");
      break;
    case net::TopologyKind::grid:
      if (t.rows < 1 || t.cols < 1 || t.rows * t.cols < 2) {
        throw std::invalid_argument("generate: --rows x --cols must give at least 2 nodes");
      }
      break;
  }
  if (t.capacities_bps.empty()) throw std::invalid_argument("generate: --capacities is empty");
  for (double c : t.capacities_bps)
    if (!(c > 0.0)) throw std::invalid_argument("generate: capacities must be > 0");
  if (!(traffic.max_lambda_min_bps > 0.0) || traffic.max_lambda_max_bps < traffic.max_lambda_min_bps) {
    throw std::invalid_argument("generate: --max-lambda must be a positive range");
  }
  for (double b : queues.buffer_bits)
    if (!(b > 0.0)) throw std::invalid_argument("generate: --buffer-bits must be > 0");
}

json to_json(const GenerateConfig& c) {
  std::vector<std::string> models, policies, caps, buffers;
  for (auto m : c.traffic.models) models.emplace_back(net::to_string(m));
  for (auto p : c.queues.policies) policies.emplace_back(net::to_string(p));
  for (double x : c.topology.capacities_bps) caps.push_back(fmt(x));
  for (double x : c.queues.buffer_bits) buffers.push_back(fmt(x));
  std::vector<std::string> weights;
  for (const auto& w : c.queues.weight_sets) {
    std::string s;
    for (double x : w) s += (s.empty() ? "" : "/") + fmt(x);
    weights.push_back(s);
  }
  return json{{"samples", c.samples},
              {"seed", c.seed},
              {"flows", fmt_range(c.flows_min, c.flows_max)},
              {"topology", std::string(net::to_string(c.topology.kind))},
              {"nodes", fmt_range(c.topology.min_nodes, c.topology.max_nodes)},
              {"exponent", c.topology.exponent},
              {"k", c.topology.k},
              {"rows", c.topology.rows},
              {"cols", c.topology.cols},
              {"capacities", join(caps)},
              {"traffic", join(models)},
              {"max-lambda", fmt_range(c.traffic.max_lambda_min_bps, c.traffic.max_lambda_max_bps)},
              {"random-tos", c.traffic.random_tos},
              {"size-dist", std::string(net::to_string(c.traffic.params.size_dist))},
              {"size-mean", c.traffic.params.size_mean_bits},
              {"policy", join(policies)},
              {"buffer-bits", join(buffers)},
              {"weights", join(weights)},
              {"duration", c.duration_s},
              {"warmup", c.warmup_s},
              {"threads", c.threads}};
}

GenerateConfig generate_config_from_json(const json& j) {
  if (!j.is_object()) throw std::invalid_argument("generate config must be a JSON object");
  static const std::vector<std::string> known{"samples", "seed", "flows", "topology", "nodes", "exponent", "k",
                                              "rows", "cols", "capacities", "traffic", "max-lambda", "random-tos",
                                              "size-dist", "size-mean", "policy", "buffer-bits", "weights",
                                              "duration", "warmup", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw std::invalid_argument("generate config: unknown key '" + key + "'");
    }
  }
  GenerateConfig c;
  auto integer = [&](const char* key, auto& out) {
    if (!j.contains(key)) return;
    const double v = to_number(text(j[key]), key);
    if (v < 0 || v != std::floor(v)) throw std::invalid_argument(std::string("config '") + key + "': expected a non-negative integer");
    out = static_cast<std::remove_reference_t<decltype(out)>>(v);
  };
  auto real = [&](const char* key, double& out) {
    if (j.contains(key)) out = to_number(text(j[key]), key);
  };
  integer("samples", c.samples);
  if (j.contains("seed")) {
    const auto s = text(j["seed"]);
    try {
      std::size_t used = 0;
      c.seed = std::stoull(s, &used);
      if (used != s.size()) throw std::invalid_argument("seed");
    } catch (const std::exception&) {
      throw std::invalid_argument("config 'seed': '" + s + "' is not an unsigned integer");
    }
  }
  if (j.contains("flows")) {
    const auto [lo, hi] = range(j["flows"], "flows");
    c.flows_min = static_cast<int>(lo);
    c.flows_max = static_cast<int>(hi);
  }
  if (j.contains("topology")) {
    try {
      c.topology.kind = net::parse_topology_kind(text(j["topology"]));
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config 'topology': ") + e.what());
    }
  }
  if (j.contains("nodes")) {
    const auto [lo, hi] = range(j["nodes"], "nodes");
    c.topology.min_nodes = static_cast<int>(lo);
    c.topology.max_nodes = static_cast<int>(hi);
  }
  real("exponent", c.topology.exponent);
  integer("k", c.topology.k);
  integer("rows", c.topology.rows);
  integer("cols", c.topology.cols);
  if (j.contains("capacities")) c.topology.capacities_bps = numbers(j["capacities"], "capacities");
  if (j.contains("traffic")) {
    c.traffic.models = parse_names<net::TrafficModel>(j["traffic"], "traffic", net::parse_traffic_model);
  }
  if (j.contains("max-lambda")) {
    const auto [lo, hi] = range(j["max-lambda"], "max-lambda");
    c.traffic.max_lambda_min_bps = lo;
    c.traffic.max_lambda_max_bps = hi;
  }
  if (j.contains("random-tos")) {
    if (!j["random-tos"].is_boolean()) throw std::invalid_argument("config 'random-tos': expected true or false");
    c.traffic.random_tos = j["random-tos"].get<bool>();
  }
  if (j.contains("size-dist")) {
    try {
      c.traffic.params.size_dist = net::parse_size_distribution(text(j["size-dist"]));
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string("config 'size-dist': ") + e.what());
    }
  }
  real("size-mean", c.traffic.params.size_mean_bits);
  if (j.contains("policy")) c.queues.policies = parse_names<net::Policy>(j["policy"], "policy", net::parse_policy);
  if (j.contains("buffer-bits")) c.queues.buffer_bits = numbers(j["buffer-bits"], "buffer-bits");
  if (j.contains("weights")) {
    c.queues.weight_sets.clear();
    for (const auto& set : names(j["weights"])) {
      std::string csv = set;
      std::replace(csv.begin(), csv.end(), '/', ',');
      auto w = numbers(csv, "weights");
      if (w.size() != 3) throw std::invalid_argument("config 'weights': each set needs three weights, e.g. 0.5/0.3/0.2");
      c.queues.weight_sets.push_back(std::move(w));
    }
  }
  real("duration", c.duration_s);
  real("warmup", c.warmup_s);
  integer("threads", c.threads);
  c.validate();
  return c;
}

net::Sample generate_sample(const GenerateConfig& c, std::size_t index) {
  const auto base = derive_seed(c.seed, index);
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    const auto seed = attempt == 0 ? base : derive_seed(base, 100 + static_cast<std::uint64_t>(attempt));
    std::mt19937_64 rng(derive_seed(seed, 0));
    const int n_flows = std::uniform_int_distribution<int>(c.flows_min, c.flows_max)(rng);
    const auto topo = net::generate_topology(c.topology, derive_seed(seed, 1));
    auto sample = net::build_sample(topo, n_flows, c.traffic, c.queues, derive_seed(seed, 2));
    SimConfig sc;
    sc.duration_s = c.duration_s;
    sc.warmup_s = c.warmup_s;
    sc.seed = derive_seed(seed, 3);
    try {
      sample.labels = run_simulation(sample, sc);
    } catch (const LabelError&) {
      continue;
    }
    sample.provenance.seed = seed;
    sample.provenance.duration_s = c.duration_s;
    return sample;
  }
  throw LabelError("sample " + std::to_string(index) + ": some flow delivered no packets in " +
                   std::to_string(kMaxAttempts) + " attempts; increase --duration");
}

std::vector<net::Sample> generate_dataset(const GenerateConfig& c) {
  c.validate();
  std::vector<net::Sample> out(c.samples);
  const std::size_t workers = std::min(c.threads, c.samples);
  std::vector<std::exception_ptr> errors(workers);
  auto work = [&](std::size_t w) {
    try {
      for (std::size_t i = w; i < c.samples; i += workers) out[i] = generate_sample(c, i);
    } catch (...) {
      errors[w] = std::current_exception();
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace gnnperf::sim
