// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gnnperf/trainer.hpp"

namespace gnnperf::report {

// One metrics CSV and the column label it gets in tables and legends.
struct Run {
  std::string label;
  std::vector<train::MetricRow> rows;
};

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

// Standalone SVG; byte-identical for identical input.
std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series);
// One group per category, one bar per series inside each group.
std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<Series>& series);

// Rows "task,metric", one column per run, from the validation_mape /
// validation_mae rows. Jitter is listed with the metric the context selects
// first and the other one after it.
std::string comparison_table_csv(const std::vector<Run>& runs,
                                 train::ReportContext context = train::ReportContext::scheduling);

struct File {
  std::string name;
  std::string content;
};

// comparison.csv, validation_loss_<task>.svg per trained task and
// comparison_<task>.svg per evaluated task.
std::vector<File> build_report(const std::vector<Run>& runs,
                               train::ReportContext context = train::ReportContext::scheduling);

}  // namespace gnnperf::report
