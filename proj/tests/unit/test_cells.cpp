// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "fixtures.hpp"
#include "gnnperf/cells.hpp"

using namespace gnnperf;
using cells::CellKind;
using fixtures::random_tensor;
using num::Tensor;

namespace {

const CellKind kAllKinds[] = {CellKind::rnn, CellKind::gru, CellKind::lstm};

cells::CellState random_state(CellKind kind, std::size_t batch, std::size_t h, std::mt19937_64& rng) {
  cells::CellState s;
  s.h = random_tensor({batch, h}, rng);
  if (kind == CellKind::lstm) s.c = random_tensor({batch, h}, rng, 2.0);
  return s;
}

double sig(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Row r of W times the concatenation [a, b], plus bias.
double gate(const Tensor& W, const Tensor& bias, std::size_t r, const std::vector<double>& a,
            const std::vector<double>& b) {
  double s = bias.at(r);
  const std::size_t n = a.size();
  for (std::size_t j = 0; j < n; ++j) s += W.at(r, j) * a[j];
  for (std::size_t j = 0; j < b.size(); ++j) s += W.at(r, n + j) * b[j];
  return s;
}

std::vector<double> row(const Tensor& t, std::size_t r) {
  std::vector<double> out(t.cols());
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = t.at(r, j);
  return out;
}

// Straight-line re-implementation of the step equations, one batch row.
void reference_step(const cells::CellParams& p, const std::vector<double>& h, const std::vector<double>& c,
                    const std::vector<double>& x, std::vector<double>& h_out, std::vector<double>& c_out) {
  const std::size_t H = p.hidden_dim;
  h_out.assign(H, 0.0);
  c_out.assign(H, 0.0);
  const auto& W = p.weights;
  const auto& b = p.biases;
  switch (p.kind) {
    case CellKind::rnn:
      for (std::size_t r = 0; r < H; ++r) h_out[r] = std::tanh(gate(W[0], b[0], r, h, x));
      break;
    case CellKind::gru: {
      std::vector<double> z(H), rr(H), rh(H);
      for (std::size_t r = 0; r < H; ++r) {
        z[r] = sig(gate(W[0], b[0], r, h, x));
        rr[r] = sig(gate(W[1], b[1], r, h, x));
      }
      for (std::size_t r = 0; r < H; ++r) rh[r] = rr[r] * h[r];
      for (std::size_t r = 0; r < H; ++r) {
        const double cand = std::tanh(gate(W[2], b[2], r, rh, x));
        h_out[r] = (1.0 - z[r]) * h[r] + z[r] * cand;
      }
      break;
    }
    case CellKind::lstm:
      for (std::size_t r = 0; r < H; ++r) {
        const double f = sig(gate(W[0], b[0], r, h, x));
        const double i = sig(gate(W[1], b[1], r, h, x));
        const double o = sig(gate(W[2], b[2], r, h, x));
        const double cand = std::tanh(gate(W[3], b[3], r, h, x));
        c_out[r] = f * c[r] + i * cand;
        h_out[r] = o * std::tanh(c_out[r]);
      }
      break;
  }
}

void zero_all(cells::CellParams& p) {
  for (auto& w : p.weights) w.zero_grad();
  for (auto& b : p.biases) b.zero_grad();
}

}  // namespace

TEST_CASE("names and gate counts") {
  for (CellKind k : kAllKinds) CHECK(cells::parse_cell_kind(cells::to_string(k)) == k);
  CHECK(cells::to_string(CellKind::lstm) == "lstm");
  CHECK_THROWS(cells::parse_cell_kind("LSTM"));
  CHECK(cells::weight_names(CellKind::gru) == std::vector<std::string>{"W_z", "W_r", "W"});
  CHECK(cells::bias_names(CellKind::lstm) == std::vector<std::string>{"b_f", "b_i", "b_o", "b_c"});
}

TEST_CASE("parameter counts") {
  CHECK(cells::param_count(CellKind::rnn, 4, 8) == 104);
  CHECK(cells::param_count(CellKind::gru, 4, 8) == 312);
  CHECK(cells::param_count(CellKind::lstm, 4, 8) == 416);
  CHECK_THROWS(cells::param_count(CellKind::rnn, 0, 8));
  CHECK_THROWS(cells::param_count(CellKind::rnn, 4, 0));
  std::mt19937_64 rng(1);
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + rng() % 64, h = 1 + rng() % 64;
    const std::size_t r = cells::param_count(CellKind::rnn, d, h);
    CHECK(r == d * h + h * h + h);
    CHECK(cells::param_count(CellKind::gru, d, h) == 3 * r);
    CHECK(cells::param_count(CellKind::lstm, d, h) == 4 * r);
    if (i < 20) {
      for (CellKind k : kAllKinds) CHECK(cells::init_params(k, d, h, i).count() == cells::param_count(k, d, h));
    }
  }
}

TEST_CASE("init is deterministic and follows the stated rule") {
  for (CellKind k : kAllKinds) {
    const auto a = cells::init_params(k, 5, 7, 42);
    const auto b = cells::init_params(k, 5, 7, 42);
    const auto c = cells::init_params(k, 5, 7, 43);
    const double bound = std::sqrt(6.0 / (5 + 14));
    for (std::size_t g = 0; g < a.weights.size(); ++g) {
      CHECK(a.weights[g].shape() == num::Shape{7, 12});
      CHECK(a.weights[g].to_vector() == b.weights[g].to_vector());
      CHECK(a.weights[g].to_vector() != c.weights[g].to_vector());
      CHECK(a.biases[g].to_vector() == b.biases[g].to_vector());
      for (double v : a.weights[g].values()) {
        CHECK(std::isfinite(v));
        CHECK(std::abs(v) <= bound);
      }
      const double expect_bias = (k == CellKind::lstm && g == 0) ? 1.0 : 0.0;
      for (double v : a.biases[g].values()) CHECK(v == expect_bias);
    }
  }
  CHECK_THROWS(cells::init_params(CellKind::gru, 0, 3, 1));
}

TEST_CASE("zero weights give a zero RNN state") {
  auto p = cells::init_params(CellKind::rnn, 3, 4, 1);
  for (auto& w : p.weights) std::fill(w.mutable_values().begin(), w.mutable_values().end(), 0.0);
  std::mt19937_64 rng(2);
  const auto out = cells::cell_step(p, random_state(CellKind::rnn, 2, 4, rng), random_tensor({2, 3}, rng, 5.0));
  for (double v : out.h.values()) CHECK(v == 0.0);
}

TEST_CASE("closed GRU update gate keeps the previous state") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = cells::init_params(CellKind::gru, 3, 6, trial);
    for (auto& v : p.biases[0].mutable_values()) v = -1e6;
    for (std::size_t g = 1; g < 3; ++g)
      for (auto& v : p.biases[g].mutable_values()) v = std::uniform_real_distribution<double>(-3, 3)(rng);
    const auto s = random_state(CellKind::gru, 3, 6, rng);
    const auto out = cells::cell_step(p, s, random_tensor({3, 3}, rng, 10.0));
    for (std::size_t i = 0; i < out.h.size(); ++i) CHECK(std::abs(out.h.at(i) - s.h.at(i)) < 1e-9);
  }
}

TEST_CASE("LSTM with open forget and closed input/output gates") {
  std::mt19937_64 rng(4);
  auto p = cells::init_params(CellKind::lstm, 3, 5, 9);
  for (auto& v : p.biases[0].mutable_values()) v = 1e6;
  for (auto& v : p.biases[1].mutable_values()) v = -1e6;
  for (auto& v : p.biases[2].mutable_values()) v = -1e6;
  const auto s = random_state(CellKind::lstm, 2, 5, rng);
  const auto out = cells::cell_step(p, s, random_tensor({2, 3}, rng, 10.0));
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    CHECK(std::abs(out.c.at(i) - s.c.at(i)) < 1e-9);
    CHECK(std::abs(out.h.at(i)) < 1e-9);
  }
}

TEST_CASE("cell_step matches a straight-line implementation") {
  std::mt19937_64 rng(5);
  for (CellKind k : kAllKinds) {
    for (int trial = 0; trial < 25; ++trial) {
      const std::size_t d = 1 + rng() % 6, h = 1 + rng() % 6, batch = 1 + rng() % 3;
      auto p = cells::init_params(k, d, h, 100 + trial);
      for (auto& b : p.biases)
        for (auto& v : b.mutable_values()) v += std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
      const auto s = random_state(k, batch, h, rng);
      const Tensor x = random_tensor({batch, d}, rng, 2.0);
      const auto out = cells::cell_step(p, s, x);
      for (std::size_t r = 0; r < batch; ++r) {
        std::vector<double> ho, co;
        reference_step(p, row(s.h, r), k == CellKind::lstm ? row(s.c, r) : std::vector<double>(h), row(x, r), ho,
                       co);
        for (std::size_t j = 0; j < h; ++j) {
          CHECK(std::abs(out.h.at(r, j) - ho[j]) <= 1e-12);
          if (k == CellKind::lstm) CHECK(std::abs(out.c.at(r, j) - co[j]) <= 1e-12);
        }
      }
    }
  }
}

TEST_CASE("cell_step is deterministic") {
  std::mt19937_64 rng(6);
  for (CellKind k : kAllKinds) {
    const auto p = cells::init_params(k, 4, 4, 1);
    const auto s = random_state(k, 2, 4, rng);
    const Tensor x = random_tensor({2, 4}, rng);
    CHECK(cells::cell_step(p, s, x).h.to_vector() == cells::cell_step(p, s, x).h.to_vector());
  }
}

TEST_CASE("dimension errors") {
  std::mt19937_64 rng(7);
  for (CellKind k : kAllKinds) {
    const auto p = cells::init_params(k, 3, 4, 1);
    const auto s = random_state(k, 2, 4, rng);
    CHECK_THROWS_AS(cells::cell_step(p, s, random_tensor({2, 2}, rng)), num::ShapeError);
    CHECK_THROWS_AS(cells::cell_step(p, s, random_tensor({3, 3}, rng)), num::ShapeError);
    auto wrong_h = s;
    wrong_h.h = random_tensor({2, 5}, rng);
    CHECK_THROWS_AS(cells::cell_step(p, wrong_h, random_tensor({2, 3}, rng)), num::ShapeError);
  }
  const auto p = cells::init_params(CellKind::lstm, 3, 4, 1);
  cells::CellState no_c;
  no_c.h = Tensor::zeros({1, 4});
  CHECK_THROWS_AS(cells::cell_step(p, no_c, Tensor::zeros({1, 3})), num::ShapeError);
}

TEST_CASE("outputs finite for bounded inputs over 1000 seeds") {
  std::mt19937_64 rng(8);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const CellKind k = kAllKinds[seed % 3];
    const std::size_t d = 1 + seed % 7, h = 1 + (seed / 7) % 9;
    const auto p = cells::init_params(k, d, h, seed);
    const auto s = cells::zero_state(k, 2, h);
    const auto out = cells::cell_step(p, s, random_tensor({2, d}, rng, 10.0));
    bool finite = true;
    for (double v : out.h.values()) finite = finite && std::isfinite(v);
    if (k == CellKind::lstm)
      for (double v : out.c.values()) finite = finite && std::isfinite(v);
    CHECK(finite);
  }
}

TEST_CASE("hidden state bounds") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 300; ++trial) {
    const CellKind k = kAllKinds[trial % 3];
    const auto p = cells::init_params(k, 4, 6, trial);
    auto s = random_state(k, 3, 6, rng);
    double h0 = 0.0;
    for (double v : s.h.values()) h0 = std::max(h0, std::abs(v));
    for (int step = 0; step < 5; ++step) {
      s = cells::cell_step(p, s, random_tensor({3, 4}, rng, 1.0));
      for (double v : s.h.values()) {
        if (k == CellKind::gru) {
          CHECK(std::abs(v) <= std::max(h0, 1.0));
        } else {
          CHECK(std::abs(v) < 1.0);
        }
      }
    }
  }
}

TEST_CASE("gradients with respect to every parameter") {
  std::mt19937_64 rng(10);
  for (CellKind k : kAllKinds) {
    auto p = cells::init_params(k, 3, 4, 77);
    for (auto& b : p.biases)
      for (auto& v : b.mutable_values()) v = std::uniform_real_distribution<double>(-0.5, 0.5)(rng);
    const auto s = random_state(k, 2, 4, rng);
    const Tensor x = random_tensor({2, 3}, rng);
    const Tensor weight_h = random_tensor({2, 4}, rng);
    auto f = [&](const Tensor&) {
      const auto out = cells::cell_step(p, s, x);
      Tensor loss = num::reduce_sum(num::hadamard(out.h, weight_h));
      if (k == CellKind::lstm) loss = num::add(loss, num::reduce_mean(out.c));
      return loss;
    };
    for (std::size_t g = 0; g < p.weights.size(); ++g) {
      zero_all(p);
      CHECK(num::gradient_check(f, p.weights[g]) < 1e-4);
      zero_all(p);
      CHECK(num::gradient_check(f, p.biases[g]) < 1e-4);
    }
    // through the input and the incoming state as well
    Tensor xg = x.detach(true);
    auto fx = [&](const Tensor& t) {
      zero_all(p);
      return num::reduce_sum(num::hadamard(cells::cell_step(p, s, t).h, weight_h));
    };
    CHECK(num::gradient_check(fx, xg) < 1e-4);
  }
}
