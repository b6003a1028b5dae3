// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include "gnnperf/report.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <set>

namespace gnnperf::report {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 70, kRight = 150, kTop = 40, kBottom = 50;
const std::array<const char*, 8> kPalette{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string header(const std::string& title) {
  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
       "\" viewBox=\"0 0 " + num(kWidth) + " " + num(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + escape(title) +
       "</text>\n";
  return s;
}

// Axis frame plus horizontal grid with 5 y ticks over [0, y_max].
std::string y_axis(double y_max, const std::string& y_label) {
  const double plot_h = kHeight - kTop - kBottom;
  std::string s;
  for (int i = 0; i <= 5; ++i) {
    const double v = y_max * i / 5.0;
    const double y = kHeight - kBottom - plot_h * i / 5.0;
    s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kWidth - kRight) + "\" y2=\"" + num(y) +
         "\" stroke=\"#e0e0e0\"/>\n";
    s += "<text x=\"" + num(kLeft - 6) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + tick(v) + "</text>\n";
  }
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) + "\" y2=\"" +
       num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kHeight - kBottom) + "\" x2=\"" + num(kWidth - kRight) +
       "\" y2=\"" + num(kHeight - kBottom) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"16\" y=\"" + num(kTop + plot_h / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       num(kTop + plot_h / 2) + ")\">" + escape(y_label) + "</text>\n";
  return s;
}

std::string legend(const std::vector<Series>& series) {
  std::string s;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double y = kTop + 10 + 18.0 * static_cast<double>(i);
    const double x = kWidth - kRight + 12;
    s += "<rect x=\"" + num(x) + "\" y=\"" + num(y - 8) + "\" width=\"12\" height=\"10\" fill=\"" +
         kPalette[i % kPalette.size()] + "\"/>\n";
    s += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y) + "\">" + escape(series[i].label) + "</text>\n";
  }
  return s;
}

double nice_max(double v) {
  if (!(v > 0.0) || !std::isfinite(v)) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (v <= m * mag) return m * mag;
  return 10.0 * mag;
}

const std::array<train::Task, 3> kTasks{train::Task::delay, train::Task::jitter, train::Task::loss};

}  // namespace

std::string line_chart_svg(const std::string& title, const std::string& x_label, const std::string& y_label,
                           const std::vector<Series>& series) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min, y_max = 0.0;
  for (const auto& s : series) {
    for (const auto& [x, y] : s.points) {
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      if (std::isfinite(y)) y_max = std::max(y_max, y);
    }
  }
  if (!std::isfinite(x_min)) x_min = 0.0, x_max = 1.0;
  if (x_max == x_min) x_max = x_min + 1.0;
  y_max = nice_max(y_max);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + plot_w * (x - x_min) / (x_max - x_min); };
  auto py = [&](double y) { return kHeight - kBottom - plot_h * std::clamp(y / y_max, 0.0, 1.0); };

  std::string s = header(title) + y_axis(y_max, y_label);
  for (int i = 0; i <= 5; ++i) {
    const double v = x_min + (x_max - x_min) * i / 5.0;
    s += "<text x=\"" + num(px(v)) + "\" y=\"" + num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" + tick(v) +
         "</text>\n";
  }
  s += "<text x=\"" + num(kLeft + plot_w / 2) + "\" y=\"" + num(kHeight - 12) + "\" text-anchor=\"middle\">" +
       escape(x_label) + "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    std::string pts;
    for (const auto& [x, y] : series[i].points) {
      if (!std::isfinite(y)) continue;
      if (!pts.empty()) pts += ' ';
      pts += num(px(x)) + "," + num(py(y));
    }
    s += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(kPalette[i % kPalette.size()]) +
         "\" points=\"" + pts + "\"/>\n";
  }
  s += legend(series);
  s += "</svg>\n";
  return s;
}

std::string bar_chart_svg(const std::string& title, const std::vector<std::string>& categories,
                          const std::vector<Series>& series) {
  double y_max = 0.0;
  for (const auto& s : series)
    for (const auto& p : s.points)
      if (std::isfinite(p.second)) y_max = std::max(y_max, p.second);
  y_max = nice_max(y_max);
  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  const double group_w = plot_w / static_cast<double>(std::max<std::size_t>(categories.size(), 1));
  const double bar_w = group_w * 0.8 / static_cast<double>(std::max<std::size_t>(series.size(), 1));

  std::string s = header(title) + y_axis(y_max, "value");
  for (std::size_t c = 0; c < categories.size(); ++c) {
    const double gx = kLeft + group_w * static_cast<double>(c);
    s += "<text x=\"" + num(gx + group_w / 2) + "\" y=\"" + num(kHeight - kBottom + 16) + "\" text-anchor=\"middle\">" +
         escape(categories[c]) + "</text>\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
      const auto& pts = series[i].points;
      if (c >= pts.size() || !std::isfinite(pts[c].second)) continue;
      const double h = plot_h * std::clamp(pts[c].second / y_max, 0.0, 1.0);
      const double x = gx + group_w * 0.1 + bar_w * static_cast<double>(i);
      s += "<rect x=\"" + num(x) + "\" y=\"" + num(kHeight - kBottom - h) + "\" width=\"" + num(bar_w) +
           "\" height=\"" + num(h) + "\" fill=\"" + kPalette[i % kPalette.size()] + "\"/>\n";
    }
  }
  s += legend(series);
  s += "</svg>\n";
  return s;
}

namespace {

// (task, metric) -> value per run label, from the final evaluation rows.
std::map<std::pair<std::string, std::string>, std::map<std::string, double>> final_metrics(
    const std::vector<Run>& runs) {
  std::map<std::pair<std::string, std::string>, std::map<std::string, double>> out;
  for (const auto& r : runs) {
    for (const auto& row : r.rows) {
      if (row.split == "validation_mape") out[{row.task, "mape"}][r.label] = row.value;
      if (row.split == "validation_mae") out[{row.task, "mae"}][r.label] = row.value;
    }
  }
  return out;
}

std::vector<std::string> metric_order(train::Task t, train::ReportContext context) {
  const auto primary = std::string(train::to_string(train::metric_for(t, context)));
  return {primary, primary == "mape" ? "mae" : "mape"};
}

void check_runs(const std::vector<Run>& runs) {
  if (runs.empty()) throw std::invalid_argument("report: no metrics files given");
  std::set<std::string> labels;
  for (const auto& r : runs) {
    if (!labels.insert(r.label).second) throw std::invalid_argument("report: duplicate run label '" + r.label + "'");
  }
}

}  // namespace

std::string comparison_table_csv(const std::vector<Run>& runs, train::ReportContext context) {
  check_runs(runs);
  const auto values = final_metrics(runs);
  std::string out = "task,metric";
  for (const auto& r : runs) out += "," + r.label;
  out += "\n";
  for (auto t : kTasks) {
    const std::string task(model::to_string(t));
    for (const auto& metric : metric_order(t, context)) {
      auto it = values.find({task, metric});
      if (it == values.end()) continue;
      out += task + "," + metric;
      for (const auto& r : runs) {
        auto v = it->second.find(r.label);
        out += ",";
        if (v != it->second.end()) out += train::format_double(v->second);
      }
      out += "\n";
    }
  }
  return out;
}

std::vector<File> build_report(const std::vector<Run>& runs, train::ReportContext context) {
  check_runs(runs);
  std::vector<File> files;
  files.push_back({"comparison.csv", comparison_table_csv(runs, context)});

  // Validation loss curves grouped by the trained task.
  std::map<std::string, std::vector<Series>> curves;
  for (const auto& r : runs) {
    Series s{r.label, {}};
    std::string task;
    for (const auto& row : r.rows) {
      if (row.split != "validation") continue;
      task = row.task;
      s.points.emplace_back(static_cast<double>(row.epoch), row.value);
    }
    if (!s.points.empty()) curves[task].push_back(std::move(s));
  }
  for (const auto& [task, series] : curves) {
    files.push_back({"validation_loss_" + task + ".svg",
                     line_chart_svg("Validation loss per epoch (" + task + ")", "epoch", "validation loss", series)});
  }

  const auto values = final_metrics(runs);
  for (auto t : kTasks) {
    const std::string task(model::to_string(t));
    std::vector<std::string> categories;
    for (const auto& metric : metric_order(t, context))
      if (values.count({task, metric})) categories.push_back(metric == "mape" ? "MAPE" : "MAE");
    if (categories.empty()) continue;
    std::vector<Series> series;
    for (const auto& r : runs) {
      Series s{r.label, {}};
      for (const auto& metric : metric_order(t, context)) {
        auto it = values.find({task, metric});
        if (it == values.end()) continue;
        auto v = it->second.find(r.label);
        s.points.emplace_back(0.0, v == it->second.end() ? std::nan("") : v->second);
      }
      series.push_back(std::move(s));
    }
    files.push_back({"comparison_" + task + ".svg", bar_chart_svg("Validation metrics (" + task + ")", categories, series)});
  }
  return files;
}

}  // namespace gnnperf::report
