// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <map>
#include <sstream>

#include "gnnperf/netgraph.hpp"
#include "json.hpp"

namespace gnnperf::net {

using nlohmann::json;

namespace {

const json& field(const json& j, const char* key, const std::string& ctx) {
  if (!j.is_object()) throw DataError(ctx + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw DataError(ctx + ": missing field '" + key + "'");
  return *it;
}

template <typename T>
T get(const json& j, const char* key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw DataError(ctx + "." + key + ": " + e.what());
  }
}

const json& array_field(const json& j, const char* key, const std::string& ctx) {
  const json& v = field(j, key, ctx);
  if (!v.is_array()) throw DataError(ctx + "." + key + ": expected an array");
  return v;
}

json traffic_params_json(const TrafficParams& p) {
  return json{{"size_dist", to_string(p.size_dist)},
              {"size_mean_bits", p.size_mean_bits},
              {"on_mean_s", p.on_mean_s},
              {"off_mean_s", p.off_mean_s},
              {"rho", p.rho},
              {"modulation_depth", p.modulation_depth},
              {"modulation_mean_s", p.modulation_mean_s}};
}

TrafficParams traffic_params_from(const json& j, const std::string& ctx) {
  TrafficParams p;
  try {
    p.size_dist = parse_size_distribution(get<std::string>(j, "size_dist", ctx));
  } catch (const DataError& e) {
    throw DataError(ctx + ": " + e.what());
  }
  p.size_mean_bits = get<double>(j, "size_mean_bits", ctx);
  p.on_mean_s = get<double>(j, "on_mean_s", ctx);
  p.off_mean_s = get<double>(j, "off_mean_s", ctx);
  p.rho = get<double>(j, "rho", ctx);
  p.modulation_depth = get<double>(j, "modulation_depth", ctx);
  p.modulation_mean_s = get<double>(j, "modulation_mean_s", ctx);
  return p;
}

json topology_json(const Topology& t) {
  json links = json::array();
  for (const auto& l : t.links()) {
    json queues = json::array();
    for (const auto& q : l.queues) {
      queues.push_back(
          {{"policy", to_string(q.policy)}, {"buffer_bits", q.buffer_bits}, {"priority", q.priority}, {"weight", q.weight}});
    }
    links.push_back({{"src", l.src}, {"dst", l.dst}, {"capacity", l.capacity_bps}, {"queues", std::move(queues)}});
  }
  return {{"nodes", t.node_count()}, {"links", std::move(links)}};
}

Topology topology_from(const json& topo) {
  const int nodes = get<int>(topo, "nodes", "topology");
  std::vector<Link> links;
  const json& jl = array_field(topo, "links", "topology");
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string ctx = "topology.links[" + std::to_string(i) + "]";
    Link l;
    l.src = get<int>(jl[i], "src", ctx);
    l.dst = get<int>(jl[i], "dst", ctx);
    l.capacity_bps = get<double>(jl[i], "capacity", ctx);
    const json& jq = array_field(jl[i], "queues", ctx);
    for (std::size_t q = 0; q < jq.size(); ++q) {
      const std::string qctx = ctx + ".queues[" + std::to_string(q) + "]";
      Queue qu;
      try {
        qu.policy = parse_policy(get<std::string>(jq[q], "policy", qctx));
      } catch (const DataError& e) {
        throw DataError(qctx + ": " + e.what());
      }
      qu.buffer_bits = get<double>(jq[q], "buffer_bits", qctx);
      qu.priority = get<int>(jq[q], "priority", qctx);
      qu.weight = get<double>(jq[q], "weight", qctx);
      l.queues.push_back(qu);
    }
    links.push_back(std::move(l));
  }
  return Topology(nodes, std::move(links));
}

}  // namespace

std::string serialize_topology(const Topology& t) { return topology_json(t).dump(); }

Topology deserialize_topology(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DataError("malformed topology at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  Topology t = topology_from(j);
  t.validate();
  return t;
}

Topology read_topology(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open topology '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return deserialize_topology(ss.str());
  } catch (const DataError& e) {
    throw DataError(path + ": " + e.what());
  }
}

std::string serialize_sample(const Sample& s) {
  json flows = json::array();
  for (const auto& f : s.flows) {
    json path = json::array();
    for (const auto& h : f.path) path.push_back({h.link, h.queue});
    flows.push_back({{"id", f.id},
                     {"src", f.src},
                     {"dst", f.dst},
                     {"path", std::move(path)},
                     {"traffic",
                      {{"model", to_string(f.traffic.model)},
                       {"avg_rate_bps", f.traffic.avg_rate_bps},
                       {"tos", f.traffic.tos},
                       {"params", traffic_params_json(f.traffic.params)}}}});
  }
  json out{{"version", s.provenance.version},
           {"topology", topology_json(s.topology)},
           {"flows", std::move(flows)},
           {"provenance",
            {{"seed", s.provenance.seed}, {"duration_s", s.provenance.duration_s}, {"version", s.provenance.version}}}};
  if (s.labels) {
    json labels = json::object();
    for (std::size_t i = 0; i < s.flows.size(); ++i) {
      const auto& l = (*s.labels)[i];
      labels[std::to_string(s.flows[i].id)] = {{"delay_s", l.delay_s}, {"jitter_s2", l.jitter_s2}, {"loss", l.loss}};
    }
    out["labels"] = std::move(labels);
  }
  return out.dump();
}

Sample deserialize_sample(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw DataError("malformed sample record at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  const std::string root = "sample";
  Sample s;
  const std::string version = get<std::string>(j, "version", root);
  if (version != kFormatVersion) throw DataError("sample: unsupported version '" + version + "'");

  s.topology = topology_from(field(j, "topology", root));

  const json& jf = array_field(j, "flows", root);
  for (std::size_t i = 0; i < jf.size(); ++i) {
    const std::string ctx = "flows[" + std::to_string(i) + "]";
    Flow f;
    f.id = get<int>(jf[i], "id", ctx);
    f.src = get<int>(jf[i], "src", ctx);
    f.dst = get<int>(jf[i], "dst", ctx);
    const json& jp = array_field(jf[i], "path", ctx);
    for (std::size_t h = 0; h < jp.size(); ++h) {
      if (!jp[h].is_array() || jp[h].size() != 2 || !jp[h][0].is_number_integer() || !jp[h][1].is_number_integer()) {
        throw DataError(ctx + ".path[" + std::to_string(h) + "]: expected [link_idx, queue_idx]");
      }
      f.path.push_back(Hop{jp[h][0].get<int>(), jp[h][1].get<int>()});
    }
    const std::string tctx = ctx + ".traffic";
    const json& jt = field(jf[i], "traffic", ctx);
    try {
      f.traffic.model = parse_traffic_model(get<std::string>(jt, "model", tctx));
    } catch (const DataError& e) {
      throw DataError(tctx + ": " + e.what());
    }
    f.traffic.avg_rate_bps = get<double>(jt, "avg_rate_bps", tctx);
    f.traffic.tos = get<int>(jt, "tos", tctx);
    f.traffic.params = traffic_params_from(field(jt, "params", tctx), tctx + ".params");
    s.flows.push_back(std::move(f));
  }

  const json& jprov = field(j, "provenance", root);
  s.provenance.seed = get<std::uint64_t>(jprov, "seed", "provenance");
  s.provenance.duration_s = get<double>(jprov, "duration_s", "provenance");
  s.provenance.version = get<std::string>(jprov, "version", "provenance");

  if (auto it = j.find("labels"); it != j.end()) {
    if (!it->is_object()) throw DataError("labels: expected an object keyed by flow id");
    std::vector<FlowLabel> labels;
    for (const auto& f : s.flows) {
      const std::string key = std::to_string(f.id);
      const std::string ctx = "labels[" + key + "]";
      const json& jl2 = field(*it, key.c_str(), "labels");
      labels.push_back(FlowLabel{get<double>(jl2, "delay_s", ctx), get<double>(jl2, "jitter_s2", ctx),
                                 get<double>(jl2, "loss", ctx)});
    }
    if (it->size() != s.flows.size()) throw DataError("labels: entries do not match flows");
    s.labels = std::move(labels);
  }
  s.validate();
  return s;
}

void write_dataset(const std::string& path, const std::vector<Sample>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  for (const auto& s : samples) out << serialize_sample(s) << '\n';
  if (!out) throw DataError("write to '" + path + "' failed");
}

std::vector<Sample> read_dataset(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset '" + path + "'");
  std::vector<Sample> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(deserialize_sample(line));
    } catch (const DataError& e) {
      throw DataError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace gnnperf::net
