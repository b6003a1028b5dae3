// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gnnperf/model.hpp"
#include "json.hpp"

namespace gnnperf::train {

using model::Task;

// Non-finite loss or prediction during training.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kMapeEpsilon = 1e-9;

double mape(std::span<const double> pred, std::span<const double> truth);
double mae(std::span<const double> pred, std::span<const double> truth);

enum class MetricKind { mape, mae };
std::string_view to_string(MetricKind m);

// Jitter is reported as MAPE for scheduling and scalability runs and as MAE
// for traffic-model runs.
enum class ReportContext { scheduling, traffic_model };
std::string_view to_string(ReportContext c);
ReportContext parse_report_context(std::string_view s);
MetricKind metric_for(Task task, ReportContext context = ReportContext::scheduling);

struct TrainConfig {
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::size_t samples_per_update = 8;
  // Loss weight per task (delay, jitter, loss); tasks with weight 0 are skipped.
  std::array<double, 3> task_weights{1.0, 0.0, 0.0};
  std::uint64_t seed = 1;
  // Epochs without validation improvement before stopping; 0 disables.
  std::size_t patience = 10;
  // >1 evaluates the samples of one update concurrently.
  std::size_t threads = 1;

  static constexpr std::size_t kMaxSamplesPerUpdate = 2000;
  static std::size_t default_epochs(Task t);
  static TrainConfig for_task(Task t);
  void validate() const;
};

nlohmann::json to_json(const TrainConfig& c);
TrainConfig train_config_from_json(const nlohmann::json& j);

// Hash of everything that shapes the trajectory except the epoch budget and
// thread count, so a resumed or extended run keeps its hash.
std::string config_hash(const model::ModelConfig& m, const TrainConfig& t);
std::string dataset_hash(const std::vector<net::Sample>& samples);

struct TaskMetrics {
  double mape = 0.0;
  double mae = 0.0;
};

struct Metrics {
  std::map<Task, TaskMetrics> per_task;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  std::size_t best_epoch = 0;  // 1-based; 0 when no epoch ran
  double wall_seconds = 0.0;
  std::string config_hash;
};

// Per-sample weighted loss: MAPE for delay and jitter, MAE for loss.
num::Tensor sample_loss(const model::Predictions& p, const net::Sample& s, const TrainConfig& c);

// Training state that a checkpoint carries so a run can continue.
struct ResumeState {
  std::size_t epoch = 0;
  std::vector<double> train_loss;
  std::vector<double> validation_loss;
  double best_validation = 0.0;
  std::size_t best_epoch = 0;
  std::size_t since_best = 0;
  num::AdamState adam;
  nlohmann::json last_params;  // parameters after the last completed epoch
  std::string config_hash;
};

nlohmann::json to_json(const ResumeState& r);
ResumeState resume_state_from_json(const nlohmann::json& j);

struct TrainResult {
  model::Model best;
  Metrics metrics;
  ResumeState state;
};

// Called after every epoch with (epoch, train loss, validation loss).
using EpochCallback = std::function<void(std::size_t, double, double)>;

TrainResult train(const std::vector<net::Sample>& train_set, const std::vector<net::Sample>& validation_set,
                  const model::ModelConfig& model_config, const TrainConfig& config,
                  const ResumeState* resume = nullptr, const model::Model* best_so_far = nullptr,
                  const EpochCallback& on_epoch = {});

// Both metrics for every task, flows pooled over all samples.
Metrics evaluate(const model::Model& m, const std::vector<net::Sample>& samples);
// MAPE and MAE of the transmission-only delay baseline.
TaskMetrics evaluate_baseline(const std::vector<net::Sample>& samples);

// Highest offered-load / capacity ratio over the sample's links.
double max_link_load(const net::Sample& s);

// Splits off the last round(fraction * n) samples (at least one) for validation.
std::pair<std::vector<net::Sample>, std::vector<net::Sample>> split_dataset(std::vector<net::Sample> samples,
                                                                             double validation_fraction);

// Rows of a metrics CSV: epoch, split, task, value.
struct MetricRow {
  std::size_t epoch = 0;
  std::string split;
  std::string task;
  double value = 0.0;
};

// Loss series rows (split "train"/"validation", task = the trained task or
// "multi") followed by the evaluation rows of the best checkpoint on the
// validation set (split "validation_mape"/"validation_mae").
std::vector<MetricRow> metric_rows(const Metrics& loss_series, const Metrics& evaluation, const TrainConfig& c);
std::string metrics_csv(const std::vector<MetricRow>& rows);
std::vector<MetricRow> parse_metrics_csv(std::string_view text);

std::string format_double(double v);

}  // namespace gnnperf::train
