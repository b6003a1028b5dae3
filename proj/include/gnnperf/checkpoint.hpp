// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "gnnperf/model.hpp"
#include "json.hpp"

namespace gnnperf::model {

inline constexpr std::string_view kCheckpointVersion = "gnnperf-checkpoint/1";

nlohmann::json config_to_json(const ModelConfig& c);
ModelConfig config_from_json(const nlohmann::json& j);

// {"shape": [...], "values": [...]} keyed by parameter path.
nlohmann::json params_to_json(const Model& m);
// Overwrites m's parameters. The stored shape table must match exactly.
void params_from_json(Model& m, const nlohmann::json& j);

// Versioned checkpoint document: {"version", "config", "params", ...extra}.
nlohmann::json checkpoint_json(const Model& m, const nlohmann::json& extra = nlohmann::json::object());
Model model_from_checkpoint(const nlohmann::json& j);

void save_json(const std::string& path, const nlohmann::json& j);
nlohmann::json load_json(const std::string& path);

}  // namespace gnnperf::model
