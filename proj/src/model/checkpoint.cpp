// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnnperf/checkpoint.hpp"

#include <fstream>
#include <sstream>

namespace gnnperf::model {

using nlohmann::json;

json config_to_json(const ModelConfig& c) {
  return json{{"hidden_dim", c.hidden_dim},
              {"iterations", c.iterations},
              {"cell", cells::to_string(c.cell)},
              {"readout_width", c.readout_width},
              {"seed", c.seed}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  try {
    c.hidden_dim = j.value("hidden_dim", c.hidden_dim);
    c.iterations = j.value("iterations", c.iterations);
    c.cell = cells::parse_cell_kind(j.value("cell", std::string(cells::to_string(c.cell))));
    c.readout_width = j.value("readout_width", c.readout_width);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw net::DataError(std::string("model config: ") + e.what());
  }
  c.validate();
  return c;
}

json params_to_json(const Model& m) {
  json out = json::object();
  for (const auto& p : m.parameters()) {
    out[p.name] = {{"shape", p.tensor.shape()}, {"values", p.tensor.to_vector()}};
  }
  return out;
}

void params_from_json(Model& m, const json& j) {
  if (!j.is_object()) throw net::DataError("checkpoint params: expected an object");
  if (j.size() != m.parameters().size()) {
    throw net::DataError("checkpoint params: expected " + std::to_string(m.parameters().size()) + " tensors, found " +
                         std::to_string(j.size()));
  }
  for (const auto& p : m.parameters()) {
    auto it = j.find(p.name);
    if (it == j.end()) throw net::DataError("checkpoint params: missing tensor '" + p.name + "'");
    num::Shape shape;
    std::vector<double> values;
    try {
      shape = it->at("shape").get<num::Shape>();
      values = it->at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw net::DataError("checkpoint params '" + p.name + "': " + e.what());
    }
    if (shape != p.tensor.shape() || values.size() != p.tensor.size()) {
      throw net::DataError("checkpoint params '" + p.name + "': shape " + num::shape_string(shape) +
                           " does not match model shape " + num::shape_string(p.tensor.shape()));
    }
    auto dst = m.parameter(p.name).mutable_values();
    std::copy(values.begin(), values.end(), dst.begin());
  }
}

json checkpoint_json(const Model& m, const json& extra) {
  json out = extra;
  out["version"] = kCheckpointVersion;
  out["config"] = config_to_json(m.config());
  out["params"] = params_to_json(m);
  return out;
}

Model model_from_checkpoint(const json& j) {
  if (!j.is_object() || j.value("version", std::string()) != kCheckpointVersion) {
    throw net::DataError("not a gnnperf checkpoint (missing or unsupported version)");
  }
  Model m(config_from_json(j.at("config")));
  params_from_json(m, j.at("params"));
  return m;
}

void save_json(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw net::DataError("cannot open '" + path + "' for writing");
  out << j.dump(1) << '\n';
  if (!out) throw net::DataError("write to '" + path + "' failed");
}

json load_json(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw net::DataError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return json::parse(ss.str());
  } catch (const json::parse_error& e) {
    throw net::DataError(path + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

}  // namespace gnnperf::model
