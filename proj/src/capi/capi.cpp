// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnnperf/gnnperf.h"

#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>

#include "gnnperf/checkpoint.hpp"
#include "gnnperf/common.hpp"
#include "gnnperf/dataset.hpp"
#include "gnnperf/report.hpp"
#include "gnnperf/simulator.hpp"
#include "gnnperf/trainer.hpp"

using nlohmann::json;
namespace gp = gnnperf;

struct gnnperf_dataset {
  std::vector<gp::net::Sample> samples;
};

struct gnnperf_model {
  gp::model::Model model;
  std::optional<gp::train::ResumeState> state;
};

namespace {

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

template <typename F>
gnnperf_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return GNNPERF_OK;
  } catch (const gp::train::NumericError& e) {
    g_last_error = e.what();
    return GNNPERF_ERR_NUMERIC;
  } catch (const gp::net::DataError& e) {
    g_last_error = e.what();
    return GNNPERF_ERR_DATA;
  } catch (const gp::sim::LabelError& e) {
    g_last_error = e.what();
    return GNNPERF_ERR_DATA;
  } catch (const gp::num::ShapeError& e) {
    g_last_error = std::string("internal shape error: ") + e.what();
    return GNNPERF_ERR_INTERNAL;
  } catch (const json::exception& e) {
    g_last_error = std::string("malformed JSON argument: ") + e.what();
    return GNNPERF_ERR_CONFIG;
  } catch (const std::invalid_argument& e) {
    g_last_error = e.what();
    return GNNPERF_ERR_CONFIG;
  } catch (const std::out_of_range& e) {
    g_last_error = e.what();
    return GNNPERF_ERR_CONFIG;
  } catch (const std::exception& e) {
    g_last_error = std::string("internal error: ") + e.what();
    return GNNPERF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "internal error: unknown exception";
    return GNNPERF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string(what) + " must not be NULL");
}

json parse_arg(const char* text, const char* what) {
  if (!text || !*text) return json::object();
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw std::invalid_argument(std::string(what) + " must be a JSON object");
    return j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": malformed JSON at byte " + std::to_string(e.byte));
  }
}

std::string text(const json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); }

template <typename T>
T as_unsigned(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = text(j[key]);
  try {
    std::size_t used = 0;
    const auto v = std::stoull(s, &used);
    if (used == s.size() && s.find('-') == std::string::npos) return static_cast<T>(v);
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string("config '") + key + "': '" + s + "' is not a non-negative integer");
}

double as_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const auto s = text(j[key]);
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw std::invalid_argument(std::string("config '") + key + "': '" + s + "' is not a number");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what) {
  for (const auto& [key, _] : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw std::invalid_argument(std::string(what) + ": unknown key '" + key + "'");
  }
}

gp::model::ModelConfig model_config(const json& j) {
  reject_unknown(j, {"cell", "hidden", "iterations", "readout-width", "seed"}, "model config");
  gp::model::ModelConfig c;
  if (j.contains("cell")) c.cell = gp::cells::parse_cell_kind(text(j["cell"]));
  c.hidden_dim = as_unsigned(j, "hidden", c.hidden_dim);
  c.iterations = as_unsigned(j, "iterations", c.iterations);
  c.readout_width = as_unsigned(j, "readout-width", c.readout_width);
  c.seed = as_unsigned(j, "seed", c.seed);
  c.validate();
  return c;
}

gp::train::TrainConfig train_config(const json& j) {
  reject_unknown(j, {"task", "lr", "epochs", "samples-per-update", "task-weights", "seed", "patience", "threads"},
                 "train config");
  const auto task = gp::model::parse_task(j.contains("task") ? text(j["task"]) : "delay");
  auto c = gp::train::TrainConfig::for_task(task);
  c.learning_rate = as_double(j, "lr", c.learning_rate);
  c.epochs = as_unsigned(j, "epochs", c.epochs);
  c.samples_per_update = as_unsigned(j, "samples-per-update", c.samples_per_update);
  if (j.contains("task-weights")) {
    const auto& w = j["task-weights"];
    if (!w.is_object()) throw std::invalid_argument("config 'task-weights' must be an object");
    c.task_weights = {0.0, 0.0, 0.0};
    for (const auto& [k, v] : w.items()) {
      c.task_weights[static_cast<std::size_t>(gp::model::parse_task(k))] = as_double(w, k.c_str(), 0.0);
    }
  }
  c.seed = as_unsigned(j, "seed", c.seed);
  c.patience = as_unsigned(j, "patience", c.patience);
  c.threads = as_unsigned(j, "threads", c.threads);
  c.validate();
  return c;
}

json task_metrics_json(const gp::train::Metrics& m, gp::train::ReportContext ctx) {
  json out = json::object();
  for (const auto& [t, v] : m.per_task) {
    const auto kind = gp::train::metric_for(t, ctx);
    out[std::string(gp::model::to_string(t))] = {{"mape", v.mape},
                                                 {"mae", v.mae},
                                                 {"metric", std::string(gp::train::to_string(kind))},
                                                 {"value", kind == gp::train::MetricKind::mape ? v.mape : v.mae}};
  }
  return out;
}

}  // namespace

extern "C" {

const char* gnnperf_version(void) { return gp::kVersion.data(); }

const char* gnnperf_last_error(void) { return g_last_error.c_str(); }

void gnnperf_string_free(char* s) { std::free(s); }

gnnperf_status gnnperf_generate_config_resolve(const char* config_json, char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    const auto c = gp::sim::generate_config_from_json(parse_arg(config_json, "generate config"));
    *out_json = dup(gp::sim::to_json(c).dump());
  });
}

gnnperf_status gnnperf_dataset_generate(const char* config_json, gnnperf_dataset** out) {
  return guarded([&] {
    require(out, "out");
    const auto c = gp::sim::generate_config_from_json(parse_arg(config_json, "generate config"));
    auto ds = std::make_unique<gnnperf_dataset>();
    ds->samples = gp::sim::generate_dataset(c);
    *out = ds.release();
  });
}

gnnperf_status gnnperf_dataset_load(const char* path, gnnperf_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    auto ds = std::make_unique<gnnperf_dataset>();
    ds->samples = gp::net::read_dataset(path);
    *out = ds.release();
  });
}

gnnperf_status gnnperf_dataset_save(const gnnperf_dataset* ds, const char* path) {
  return guarded([&] {
    require(ds, "dataset");
    require(path, "path");
    gp::net::write_dataset(path, ds->samples);
  });
}

size_t gnnperf_dataset_size(const gnnperf_dataset* ds) { return ds ? ds->samples.size() : 0; }

gnnperf_status gnnperf_dataset_hash(const gnnperf_dataset* ds, char** out_hex) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_hex, "out_hex");
    *out_hex = dup(gp::train::dataset_hash(ds->samples));
  });
}

gnnperf_status gnnperf_dataset_split(const gnnperf_dataset* ds, double validation_fraction,
                                     gnnperf_dataset** out_train, gnnperf_dataset** out_validation) {
  return guarded([&] {
    require(ds, "dataset");
    require(out_train, "out_train");
    require(out_validation, "out_validation");
    auto [tr, va] = gp::train::split_dataset(ds->samples, validation_fraction);
    auto a = std::make_unique<gnnperf_dataset>();
    auto b = std::make_unique<gnnperf_dataset>();
    a->samples = std::move(tr);
    b->samples = std::move(va);
    *out_train = a.release();
    *out_validation = b.release();
  });
}

void gnnperf_dataset_free(gnnperf_dataset* ds) { delete ds; }

gnnperf_status gnnperf_model_create(const char* config_json, gnnperf_model** out) {
  return guarded([&] {
    require(out, "out");
    *out = new gnnperf_model{gp::model::Model(model_config(parse_arg(config_json, "model config"))), std::nullopt};
  });
}

gnnperf_status gnnperf_model_load(const char* path, gnnperf_model** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    const json j = gp::model::load_json(path);
    auto m = std::make_unique<gnnperf_model>(gnnperf_model{gp::model::model_from_checkpoint(j), std::nullopt});
    if (j.contains("training")) m->state = gp::train::resume_state_from_json(j.at("training"));
    *out = m.release();
  });
}

gnnperf_status gnnperf_model_save(const gnnperf_model* m, const char* path) {
  return guarded([&] {
    require(m, "model");
    require(path, "path");
    json extra = json::object();
    if (m->state) extra["training"] = gp::train::to_json(*m->state);
    gp::model::save_json(path, gp::model::checkpoint_json(m->model, extra));
  });
}

gnnperf_status gnnperf_model_info(const gnnperf_model* m, char** out_json) {
  return guarded([&] {
    require(m, "model");
    require(out_json, "out_json");
    const auto& c = m->model.config();
    json j{{"config",
            {{"cell", std::string(gp::cells::to_string(c.cell))},
             {"hidden", c.hidden_dim},
             {"iterations", c.iterations},
             {"readout-width", c.readout_width},
             {"seed", c.seed}}},
           {"parameters", m->model.parameter_count()},
           {"cell_parameters", m->model.cell_parameter_count()},
           {"resumable", m->state.has_value()}};
    *out_json = dup(j.dump());
  });
}

void gnnperf_model_free(gnnperf_model* m) { delete m; }

gnnperf_status gnnperf_train(const gnnperf_dataset* train_set, const gnnperf_dataset* validation_set,
                             const char* model_config_json, const char* train_config_json,
                             const gnnperf_model* resume, gnnperf_model** out_best, char** out_result_json) {
  return guarded([&] {
    require(train_set, "train_set");
    require(validation_set, "validation_set");
    require(out_best, "out_best");
    const auto mc = model_config(parse_arg(model_config_json, "model config"));
    const auto tc = train_config(parse_arg(train_config_json, "train config"));
    const gp::train::ResumeState* rs = nullptr;
    const gp::model::Model* best = nullptr;
    if (resume) {
      if (!resume->state) throw gp::net::DataError("checkpoint carries no training state and cannot be resumed");
      if (!(resume->model.config() == mc)) {
        throw std::invalid_argument("resume checkpoint was trained with a different model configuration");
      }
      rs = &*resume->state;
      best = &resume->model;
    }
    auto result = gp::train::train(train_set->samples, validation_set->samples, mc, tc, rs, best);
    const auto eval = gp::train::evaluate(result.best, validation_set->samples.empty() ? train_set->samples
                                                                                       : validation_set->samples);
    if (out_result_json) {
      json r{{"metrics_csv", gp::train::metrics_csv(gp::train::metric_rows(result.metrics, eval, tc))},
             {"config_hash", result.metrics.config_hash},
             {"best_epoch", result.metrics.best_epoch},
             {"epochs_run", result.metrics.train_loss.size()},
             {"wall_seconds", result.metrics.wall_seconds},
             {"train_loss", result.metrics.train_loss},
             {"validation_loss", result.metrics.validation_loss}};
      *out_result_json = dup(r.dump());
    }
    *out_best = new gnnperf_model{std::move(result.best), std::move(result.state)};
  });
}

gnnperf_status gnnperf_train_config_resolve(const char* model_config_json, const char* train_config_json,
                                            char** out_json) {
  return guarded([&] {
    require(out_json, "out_json");
    const auto mc = model_config(parse_arg(model_config_json, "model config"));
    const auto tc = train_config(parse_arg(train_config_json, "train config"));
    json weights = json::object();
    for (auto t : {gp::model::Task::delay, gp::model::Task::jitter, gp::model::Task::loss}) {
      weights[std::string(gp::model::to_string(t))] = tc.task_weights[static_cast<std::size_t>(t)];
    }
    json j{{"model",
            {{"cell", std::string(gp::cells::to_string(mc.cell))},
             {"hidden", mc.hidden_dim},
             {"iterations", mc.iterations},
             {"readout-width", mc.readout_width},
             {"seed", mc.seed}}},
           {"train",
            {{"lr", tc.learning_rate},
             {"epochs", tc.epochs},
             {"samples-per-update", tc.samples_per_update},
             {"task-weights", weights},
             {"seed", tc.seed},
             {"patience", tc.patience},
             {"threads", tc.threads}}},
           {"config_hash", gp::train::config_hash(mc, tc)}};
    *out_json = dup(j.dump());
  });
}

gnnperf_status gnnperf_evaluate(const gnnperf_model* m, const gnnperf_dataset* ds, const char* context,
                                char** out_json) {
  return guarded([&] {
    require(m, "model");
    require(ds, "dataset");
    require(out_json, "out_json");
    if (ds->samples.empty()) throw gp::net::DataError("evaluate: empty dataset");
    const auto ctx = gp::train::parse_report_context(context ? context : "scheduling");
    const auto metrics = gp::train::evaluate(m->model, ds->samples);
    const auto base = gp::train::evaluate_baseline(ds->samples);
    std::size_t flows = 0;
    for (const auto& s : ds->samples) flows += s.flows.size();
    json j{{"tasks", task_metrics_json(metrics, ctx)},
           {"baseline", {{"delay", {{"mape", base.mape}, {"mae", base.mae}}}}},
           {"context", std::string(gp::train::to_string(ctx))},
           {"flows", flows}};
    *out_json = dup(j.dump());
  });
}

gnnperf_status gnnperf_predict(const gnnperf_model* m, const gnnperf_dataset* ds, char** out_json) {
  return guarded([&] {
    require(m, "model");
    require(ds, "dataset");
    require(out_json, "out_json");
    json out = json::array();
    for (std::size_t i = 0; i < ds->samples.size(); ++i) {
      const auto p = m->model.forward(ds->samples[i]);
      for (std::size_t f = 0; f < ds->samples[i].flows.size(); ++f) {
        out.push_back({{"sample", i},
                       {"flow", ds->samples[i].flows[f].id},
                       {"delay", p.delay.values()[f]},
                       {"jitter", p.jitter.values()[f]},
                       {"loss", p.loss.values()[f]}});
      }
    }
    *out_json = dup(out.dump());
  });
}

gnnperf_status gnnperf_report(const char* runs_json, const char* context, const char* out_dir, char** out_json) {
  return guarded([&] {
    require(runs_json, "runs_json");
    require(out_dir, "out_dir");
    json runs_j;
    try {
      runs_j = json::parse(runs_json);
    } catch (const json::parse_error& e) {
      throw std::invalid_argument("runs: malformed JSON at byte " + std::to_string(e.byte));
    }
    if (!runs_j.is_array()) throw std::invalid_argument("runs must be a JSON array");
    std::vector<gp::report::Run> runs;
    for (const auto& r : runs_j) {
      const auto label = r.at("label").get<std::string>();
      try {
        runs.push_back({label, gp::train::parse_metrics_csv(r.at("csv").get<std::string>())});
      } catch (const gp::net::DataError& e) {
        throw gp::net::DataError("run '" + label + "': " + e.what());
      }
    }
    const auto ctx = gp::train::parse_report_context(context ? context : "scheduling");
    const auto files = gp::report::build_report(runs, ctx);
    std::filesystem::create_directories(out_dir);
    json listed = json::array();
    for (const auto& f : files) {
      const auto path = (std::filesystem::path(out_dir) / f.name).string();
      std::ofstream out(path, std::ios::binary);
      out << f.content;
      if (!out) throw gp::net::DataError("cannot write '" + path + "'");
      listed.push_back(path);
    }
    if (out_json) *out_json = dup(listed.dump());
  });
}

gnnperf_status gnnperf_hash_bytes(const char* data, size_t len, char** out_hex) {
  return guarded([&] {
    require(out_hex, "out_hex");
    if (len) require(data, "data");
    *out_hex = dup(gp::hex64(gp::fnv1a(std::string_view(data ? data : "", len))));
  });
}

}  // extern "C"
