// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "gnnperf/checkpoint.hpp"
#include "gnnperf/common.hpp"
#include "gnnperf/trainer.hpp"

namespace gnnperf::train {

using nlohmann::json;

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* what) {
  if (a.size() != b.size()) {
    throw std::invalid_argument(std::string(what) + ": length mismatch (" + std::to_string(a.size()) + " predictions, " +
                                std::to_string(b.size()) + " labels)");
  }
}

const std::array<Task, 3> kTasks{Task::delay, Task::jitter, Task::loss};

double label_value(const net::FlowLabel& l, Task t) {
  switch (t) {
    case Task::delay: return l.delay_s;
    case Task::jitter: return l.jitter_s2;
    case Task::loss: return l.loss;
  }
  return 0.0;
}

}  // namespace

double mape(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth, "mape");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    s += std::abs(pred[i] - truth[i]) / std::max(std::abs(truth[i]), kMapeEpsilon);
  }
  return s / static_cast<double>(pred.size());
}

double mae(std::span<const double> pred, std::span<const double> truth) {
  check_lengths(pred, truth, "mae");
  if (pred.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) s += std::abs(pred[i] - truth[i]);
  return s / static_cast<double>(pred.size());
}

std::string_view to_string(MetricKind m) { return m == MetricKind::mape ? "mape" : "mae"; }

std::string_view to_string(ReportContext c) {
  return c == ReportContext::scheduling ? "scheduling" : "traffic-model";
}

ReportContext parse_report_context(std::string_view s) {
  if (s == "scheduling" || s == "scalability") return ReportContext::scheduling;
  if (s == "traffic-model") return ReportContext::traffic_model;
  throw std::invalid_argument("unknown report context '" + std::string(s) +
                              "' (expected scheduling, scalability or traffic-model)");
}

MetricKind metric_for(Task task, ReportContext context) {
  switch (task) {
    case Task::delay: return MetricKind::mape;
    case Task::jitter: return context == ReportContext::traffic_model ? MetricKind::mae : MetricKind::mape;
    case Task::loss: return MetricKind::mae;
  }
  return MetricKind::mape;
}

std::size_t TrainConfig::default_epochs(Task t) { return t == Task::jitter ? 100 : 50; }

TrainConfig TrainConfig::for_task(Task t) {
  TrainConfig c;
  c.epochs = default_epochs(t);
  c.task_weights = {0.0, 0.0, 0.0};
  c.task_weights[static_cast<std::size_t>(t)] = 1.0;
  return c;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw std::invalid_argument("train: learning_rate must be > 0");
  }
  if (samples_per_update < 1 || samples_per_update > kMaxSamplesPerUpdate) {
    throw std::invalid_argument("train: samples_per_update must be in [1, 2000]");
  }
  double total = 0.0;
  for (double w : task_weights) {
    if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("train: task weights must be finite and >= 0");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("train: at least one task weight must be positive");
  if (threads < 1) throw std::invalid_argument("train: threads must be >= 1");
}

json to_json(const TrainConfig& c) {
  return json{{"learning_rate", c.learning_rate},
              {"epochs", c.epochs},
              {"samples_per_update", c.samples_per_update},
              {"task_weights", {{"delay", c.task_weights[0]}, {"jitter", c.task_weights[1]}, {"loss", c.task_weights[2]}}},
              {"seed", c.seed},
              {"patience", c.patience},
              {"threads", c.threads}};
}

TrainConfig train_config_from_json(const json& j) {
  TrainConfig c;
  try {
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.epochs = j.value("epochs", c.epochs);
    c.samples_per_update = j.value("samples_per_update", c.samples_per_update);
    if (j.contains("task_weights")) {
      const auto& w = j.at("task_weights");
      for (Task t : kTasks) c.task_weights[static_cast<std::size_t>(t)] = w.value(std::string(model::to_string(t)), 0.0);
    }
    c.seed = j.value("seed", c.seed);
    c.patience = j.value("patience", c.patience);
    c.threads = j.value("threads", c.threads);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("train config: ") + e.what());
  }
  c.validate();
  return c;
}

std::string config_hash(const model::ModelConfig& m, const TrainConfig& t) {
  json j{{"model", model::config_to_json(m)}, {"train", to_json(t)}};
  j["train"].erase("epochs");
  j["train"].erase("threads");
  return hex64(fnv1a(j.dump()));
}

std::string dataset_hash(const std::vector<net::Sample>& samples) {
  std::uint64_t h = fnv1a("");
  for (const auto& s : samples) {
    h = fnv1a(net::serialize_sample(s), h);
    h = fnv1a("\n", h);
  }
  return hex64(h);
}

Metrics evaluate(const model::Model& m, const std::vector<net::Sample>& samples) {
  std::array<std::vector<double>, 3> pred, truth;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.labeled()) throw net::DataError("evaluate: sample " + std::to_string(i) + " has no labels");
    const auto p = m.forward(s);
    const std::array<num::Tensor, 3> heads{p.delay, p.jitter, p.loss};
    for (Task t : kTasks) {
      const auto k = static_cast<std::size_t>(t);
      const auto v = heads[k].values();
      pred[k].insert(pred[k].end(), v.begin(), v.end());
      for (const auto& l : *s.labels) truth[k].push_back(label_value(l, t));
    }
  }
  Metrics out;
  for (Task t : kTasks) {
    const auto k = static_cast<std::size_t>(t);
    for (double v : pred[k]) {
      if (!std::isfinite(v)) throw NumericError("evaluate: non-finite " + std::string(model::to_string(t)) + " prediction");
    }
    out.per_task[t] = {mape(pred[k], truth[k]), mae(pred[k], truth[k])};
  }
  return out;
}

TaskMetrics evaluate_baseline(const std::vector<net::Sample>& samples) {
  std::vector<double> pred, truth;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (!s.labeled()) throw net::DataError("evaluate: sample " + std::to_string(i) + " has no labels");
    const auto b = model::baseline_transmission_only(s);
    pred.insert(pred.end(), b.begin(), b.end());
    for (const auto& l : *s.labels) truth.push_back(l.delay_s);
  }
  return {mape(pred, truth), mae(pred, truth)};
}

double max_link_load(const net::Sample& s) {
  const auto load = model::extract_features(s).link;
  double best = 0.0;
  for (std::size_t l = 0; l < load.rows(); ++l) best = std::max(best, load.at(l, 0));
  return best;
}

std::pair<std::vector<net::Sample>, std::vector<net::Sample>> split_dataset(std::vector<net::Sample> samples,
                                                                             double validation_fraction) {
  if (samples.size() < 2) throw std::invalid_argument("split: need at least 2 samples");
  if (!(validation_fraction > 0.0 && validation_fraction < 1.0)) {
    throw std::invalid_argument("split: validation fraction must be in (0, 1)");
  }
  auto n_val = static_cast<std::size_t>(std::llround(validation_fraction * static_cast<double>(samples.size())));
  n_val = std::clamp<std::size_t>(n_val, 1, samples.size() - 1);
  std::vector<net::Sample> val(std::make_move_iterator(samples.end() - static_cast<std::ptrdiff_t>(n_val)),
                               std::make_move_iterator(samples.end()));
  samples.resize(samples.size() - n_val);
  return {std::move(samples), std::move(val)};
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<MetricRow> metric_rows(const Metrics& series, const Metrics& evaluation, const TrainConfig& c) {
  std::string task = "multi";
  int active = 0;
  for (Task t : kTasks) {
    if (c.task_weights[static_cast<std::size_t>(t)] > 0.0) {
      ++active;
      task = model::to_string(t);
    }
  }
  if (active != 1) task = "multi";
  std::vector<MetricRow> rows;
  for (std::size_t e = 0; e < series.train_loss.size(); ++e) {
    rows.push_back({e + 1, "train", task, series.train_loss[e]});
    rows.push_back({e + 1, "validation", task, series.validation_loss[e]});
  }
  for (const auto& [t, m] : evaluation.per_task) {
    rows.push_back({series.best_epoch, "validation_mape", std::string(model::to_string(t)), m.mape});
    rows.push_back({series.best_epoch, "validation_mae", std::string(model::to_string(t)), m.mae});
  }
  return rows;
}

std::string metrics_csv(const std::vector<MetricRow>& rows) {
  std::string out = "epoch,split,task,value\n";
  for (const auto& r : rows) {
    out += std::to_string(r.epoch) + "," + r.split + "," + r.task + "," + format_double(r.value) + "\n";
  }
  return out;
}

std::vector<MetricRow> parse_metrics_csv(std::string_view text) {
  std::vector<MetricRow> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != "epoch,split,task,value") throw net::DataError("metrics CSV: line 1: unexpected header '" + line + "'");
      continue;
    }
    std::vector<std::string> cols;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cols.push_back(cell);
    if (cols.size() != 4) throw net::DataError("metrics CSV: line " + std::to_string(lineno) + ": expected 4 columns");
    MetricRow r;
    r.split = cols[1];
    r.task = cols[2];
    try {
      std::size_t used = 0;
      r.epoch = std::stoul(cols[0], &used);
      if (used != cols[0].size()) throw std::invalid_argument("epoch");
      r.value = std::stod(cols[3], &used);
      if (used != cols[3].size()) throw std::invalid_argument("value");
    } catch (const std::exception&) {
      throw net::DataError("metrics CSV: line " + std::to_string(lineno) + ": malformed number");
    }
    rows.push_back(std::move(r));
  }
  if (lineno == 0) throw net::DataError("metrics CSV: empty input");
  return rows;
}

}  // namespace gnnperf::train
