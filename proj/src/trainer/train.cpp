// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <random>
#include <thread>

#include "gnnperf/checkpoint.hpp"
#include "gnnperf/common.hpp"
#include "gnnperf/trainer.hpp"

namespace gnnperf::train {

using nlohmann::json;
using num::Tensor;

namespace {

Tensor label_column(const net::Sample& s, Task t) {
  std::vector<double> v;
  v.reserve(s.flows.size());
  for (const auto& l : *s.labels) {
    v.push_back(t == Task::delay ? l.delay_s : (t == Task::jitter ? l.jitter_s2 : l.loss));
  }
  const std::size_t n = v.size();
  return Tensor::from({n, 1}, std::move(v));
}

Tensor mape_tensor(const Tensor& pred, const net::Sample& s, Task t) {
  const Tensor truth = label_column(s, t);
  std::vector<double> inv(truth.size());
  for (std::size_t i = 0; i < inv.size(); ++i) inv[i] = 1.0 / std::max(std::abs(truth.values()[i]), kMapeEpsilon);
  return num::reduce_mean(num::hadamard(num::abs(num::sub(pred, truth)), Tensor::from(truth.shape(), std::move(inv))));
}

Tensor mae_tensor(const Tensor& pred, const net::Sample& s, Task t) {
  return num::reduce_mean(num::abs(num::sub(pred, label_column(s, t))));
}

// Sorted summation: the mean does not depend on the order samples were visited.
double order_free_mean(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

struct SampleGrad {
  double loss = 0.0;
  std::vector<std::vector<double>> grads;
};

SampleGrad sample_gradient(model::Model& m, const model::PreparedSample& ps, const net::Sample& s,
                           const TrainConfig& c, std::size_t sample_id, std::size_t epoch) {
  const Tensor loss = sample_loss(m.forward(ps), s, c);
  SampleGrad g;
  g.loss = loss.item();
  if (!std::isfinite(g.loss)) {
    throw NumericError("non-finite training loss on sample " + std::to_string(sample_id) + " in epoch " +
                       std::to_string(epoch));
  }
  num::backward(loss);
  for (const auto& p : m.parameters()) {
    if (p.tensor.has_grad()) {
      const auto gr = p.tensor.grad();
      g.grads.emplace_back(gr.begin(), gr.end());
    } else {
      g.grads.emplace_back(p.tensor.size(), 0.0);
    }
  }
  m.zero_grad();
  return g;
}

double dataset_loss(const model::Model& m, const std::vector<model::PreparedSample>& prepared,
                    const std::vector<net::Sample>& samples, const TrainConfig& c, std::size_t epoch,
                    const char* split) {
  std::vector<double> losses;
  losses.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double v = sample_loss(m.forward(prepared[i]), samples[i], c).item();
    if (!std::isfinite(v)) {
      throw NumericError(std::string("non-finite ") + split + " loss on sample " + std::to_string(i) + " in epoch " +
                         std::to_string(epoch));
    }
    losses.push_back(v);
  }
  return order_free_mean(std::move(losses));
}

std::vector<model::PreparedSample> prepare_all(const std::vector<net::Sample>& samples, const char* split) {
  std::vector<model::PreparedSample> out;
  out.reserve(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!samples[i].labeled()) {
      throw net::DataError(std::string(split) + " sample " + std::to_string(i) + " has no labels");
    }
    out.push_back(model::prepare(samples[i]));
  }
  return out;
}

}  // namespace

Tensor sample_loss(const model::Predictions& p, const net::Sample& s, const TrainConfig& c) {
  if (!s.labeled()) throw net::DataError("loss: sample has no labels");
  Tensor total;
  auto accumulate = [&](Tensor term, double w) {
    term = w == 1.0 ? term : num::scalar_mul(term, w);
    total = total.defined() ? num::add(total, term) : term;
  };
  if (c.task_weights[0] > 0.0) accumulate(mape_tensor(p.delay, s, Task::delay), c.task_weights[0]);
  if (c.task_weights[1] > 0.0) accumulate(mape_tensor(p.jitter, s, Task::jitter), c.task_weights[1]);
  if (c.task_weights[2] > 0.0) accumulate(mae_tensor(p.loss, s, Task::loss), c.task_weights[2]);
  if (!total.defined()) throw std::invalid_argument("loss: no task has positive weight");
  return total;
}

json to_json(const ResumeState& r) {
  return json{{"epoch", r.epoch},
              {"train_loss", r.train_loss},
              {"validation_loss", r.validation_loss},
              {"best_validation", r.best_validation},
              {"best_epoch", r.best_epoch},
              {"since_best", r.since_best},
              {"adam",
               {{"learning_rate", r.adam.learning_rate},
                {"beta1", r.adam.beta1},
                {"beta2", r.adam.beta2},
                {"epsilon", r.adam.epsilon},
                {"t", r.adam.t},
                {"m", r.adam.m},
                {"v", r.adam.v}}},
              {"last_params", r.last_params},
              {"config_hash", r.config_hash}};
}

ResumeState resume_state_from_json(const json& j) {
  ResumeState r;
  try {
    r.epoch = j.at("epoch").get<std::size_t>();
    r.train_loss = j.at("train_loss").get<std::vector<double>>();
    r.validation_loss = j.at("validation_loss").get<std::vector<double>>();
    r.best_validation = j.at("best_validation").get<double>();
    r.best_epoch = j.at("best_epoch").get<std::size_t>();
    r.since_best = j.at("since_best").get<std::size_t>();
    const auto& a = j.at("adam");
    r.adam.learning_rate = a.at("learning_rate").get<double>();
    r.adam.beta1 = a.at("beta1").get<double>();
    r.adam.beta2 = a.at("beta2").get<double>();
    r.adam.epsilon = a.at("epsilon").get<double>();
    r.adam.t = a.at("t").get<std::uint64_t>();
    r.adam.m = a.at("m").get<std::vector<std::vector<double>>>();
    r.adam.v = a.at("v").get<std::vector<std::vector<double>>>();
    r.last_params = j.at("last_params");
    r.config_hash = j.at("config_hash").get<std::string>();
  } catch (const json::exception& e) {
    throw net::DataError(std::string("checkpoint training state: ") + e.what());
  }
  if (r.train_loss.size() != r.epoch || r.validation_loss.size() != r.epoch) {
    throw net::DataError("checkpoint training state: loss series length does not match epoch count");
  }
  return r;
}

TrainResult train(const std::vector<net::Sample>& train_set, const std::vector<net::Sample>& validation_set,
                  const model::ModelConfig& model_config, const TrainConfig& config, const ResumeState* resume,
                  const model::Model* best_so_far, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.empty()) throw net::DataError("train: empty training set");
  const auto started = std::chrono::steady_clock::now();
  const std::string hash = config_hash(model_config, config);

  model::Model current(model_config);
  ResumeState st;
  st.config_hash = hash;
  st.adam.learning_rate = config.learning_rate;
  if (resume) {
    if (resume->config_hash != hash) {
      throw std::invalid_argument("train: checkpoint was produced with config hash " + resume->config_hash +
                                  ", current configuration hashes to " + hash);
    }
    st = *resume;
    model::params_from_json(current, resume->last_params);
  }
  model::Model best = best_so_far ? best_so_far->clone() : current.clone();

  const auto train_prep = prepare_all(train_set, "training");
  const auto val_prep = prepare_all(validation_set, "validation");

  std::vector<model::Model> replicas;
  for (std::size_t t = 1; t < std::min(config.threads, config.samples_per_update); ++t) replicas.push_back(current.clone());

  auto params = current.parameter_tensors();
  const std::size_t n = train_set.size();
  for (std::size_t epoch = st.epoch + 1; epoch <= config.epochs; ++epoch) {
    if (config.patience > 0 && st.since_best >= config.patience) break;
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(derive_seed(config.seed, epoch));
    std::shuffle(order.begin(), order.end(), rng);

    std::vector<double> epoch_losses;
    epoch_losses.reserve(n);
    for (std::size_t start = 0; start < n; start += config.samples_per_update) {
      const std::size_t count = std::min(config.samples_per_update, n - start);
      std::vector<SampleGrad> results(count);
      if (replicas.empty()) {
        for (std::size_t k = 0; k < count; ++k) {
          const auto id = order[start + k];
          results[k] = sample_gradient(current, train_prep[id], train_set[id], config, id, epoch);
        }
      } else {
        const std::size_t workers = replicas.size() + 1;
        std::vector<std::exception_ptr> errors(workers);
        auto work = [&](std::size_t w) {
          model::Model& m = w == 0 ? current : replicas[w - 1];
          try {
            for (std::size_t k = w; k < count; k += workers) {
              const auto id = order[start + k];
              results[k] = sample_gradient(m, train_prep[id], train_set[id], config, id, epoch);
            }
          } catch (...) {
            errors[w] = std::current_exception();
          }
        };
        std::vector<std::thread> pool;
        for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w);
        work(0);
        for (auto& th : pool) th.join();
        for (auto& e : errors)
          if (e) std::rethrow_exception(e);
      }
      // Gradients are summed in sample order whatever the thread count.
      for (std::size_t p = 0; p < params.size(); ++p) {
        std::vector<double> g(params[p].size(), 0.0);
        for (const auto& r : results)
          for (std::size_t i = 0; i < g.size(); ++i) g[i] += r.grads[p][i];
        for (double& x : g) x /= static_cast<double>(count);
        params[p].set_grad(std::move(g));
      }
      for (const auto& r : results) epoch_losses.push_back(r.loss);
      num::adam_step(params, st.adam);
      current.zero_grad();
      for (auto& r : replicas) r.copy_values_from(current);
    }

    const double train_loss = order_free_mean(std::move(epoch_losses));
    // Without a validation split the post-epoch training loss selects the checkpoint.
    const double val_loss = validation_set.empty()
                                ? dataset_loss(current, train_prep, train_set, config, epoch, "training")
                                : dataset_loss(current, val_prep, validation_set, config, epoch, "validation");
    st.train_loss.push_back(train_loss);
    st.validation_loss.push_back(val_loss);
    st.epoch = epoch;
    if (st.best_epoch == 0 || val_loss < st.best_validation) {
      st.best_validation = val_loss;
      st.best_epoch = epoch;
      st.since_best = 0;
      best.copy_values_from(current);
    } else {
      ++st.since_best;
    }
    if (on_epoch) on_epoch(epoch, train_loss, val_loss);
  }
  st.last_params = model::params_to_json(current);

  Metrics metrics;
  metrics.train_loss = st.train_loss;
  metrics.validation_loss = st.validation_loss;
  metrics.best_epoch = st.best_epoch;
  metrics.config_hash = hash;
  metrics.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return TrainResult{std::move(best), std::move(metrics), std::move(st)};
}

}  // namespace gnnperf::train
