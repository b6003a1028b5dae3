// Copyright 2026 The gnnperf Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>

#include "gnnperf/simulator.hpp"

namespace gnnperf::sim {

using net::SizeDistribution;
using net::TrafficModel;

TrafficSource::TrafficSource(const net::TrafficDescriptor& descriptor, std::uint64_t seed)
    : d_(descriptor), rng_(seed) {
  if (!(d_.avg_rate_bps > 0.0)) throw std::invalid_argument("traffic: average rate must be positive");
  if (!(d_.mean_packet_bits() > 0.0)) throw std::invalid_argument("traffic: mean packet size must be positive");
  const auto& p = d_.params;
  if (d_.model == TrafficModel::on_off && (!(p.on_mean_s > 0.0) || !(p.off_mean_s >= 0.0))) {
    throw std::invalid_argument("traffic: on/off period means must be positive");
  }
  if (d_.model == TrafficModel::autocorrelated_exp && !(std::abs(p.rho) < 1.0)) {
    throw std::invalid_argument("traffic: autocorrelation coefficient must be in (-1, 1)");
  }
  if (d_.model == TrafficModel::modulated_exp &&
      (!(p.modulation_depth >= 0.0 && p.modulation_depth < 1.0) || !(p.modulation_mean_s > 0.0))) {
    throw std::invalid_argument("traffic: modulation depth must be in [0, 1) with a positive period");
  }
}

double TrafficSource::draw_size() {
  switch (d_.params.size_dist) {
    case SizeDistribution::binomial:
      return 300.0 + static_cast<double>(std::binomial_distribution<int>(1400, 0.5)(rng_));
    case SizeDistribution::exponential:
      return std::exponential_distribution<double>(1.0 / d_.params.size_mean_bits)(rng_);
    case SizeDistribution::fixed:
      return d_.params.size_mean_bits;
  }
  return d_.params.size_mean_bits;
}

double TrafficSource::next_gap() {
  const double pkt_rate = d_.avg_rate_bps / d_.mean_packet_bits();
  const auto& p = d_.params;
  switch (d_.model) {
    case TrafficModel::poisson:
      return std::exponential_distribution<double>(pkt_rate)(rng_);

    case TrafficModel::cbr:
      if (!started_) {
        started_ = true;
        return std::uniform_real_distribution<double>(0.0, 1.0 / pkt_rate)(rng_);
      }
      return 1.0 / pkt_rate;

    case TrafficModel::autocorrelated_exp: {
      std::normal_distribution<double> normal;
      if (!started_) {
        started_ = true;
        ar_state_ = normal(rng_);
      } else {
        ar_state_ = p.rho * ar_state_ + std::sqrt(1.0 - p.rho * p.rho) * normal(rng_);
      }
      // Exponential quantile of the Gaussian state: 1 - Phi(z) = erfc(z/sqrt2)/2.
      const double tail = 0.5 * std::erfc(ar_state_ / std::sqrt(2.0));
      return -std::log(std::max(tail, 1e-300)) / pkt_rate;
    }

    case TrafficModel::on_off:
    case TrafficModel::modulated_exp: {
      const bool onoff = d_.model == TrafficModel::on_off;
      auto period = [&](bool first_state) {
        const double mean = onoff ? (first_state ? p.on_mean_s : p.off_mean_s) : p.modulation_mean_s;
        return mean > 0.0 ? std::exponential_distribution<double>(1.0 / mean)(rng_) : 0.0;
      };
      auto rate_in = [&](bool first_state) {
        if (onoff) return first_state ? pkt_rate * (p.on_mean_s + p.off_mean_s) / p.on_mean_s : 0.0;
        return pkt_rate * (first_state ? 1.0 + p.modulation_depth : 1.0 - p.modulation_depth);
      };
      bool& state = onoff ? on_ : high_;
      if (!started_) {
        started_ = true;
        const double frac = onoff ? p.on_mean_s / (p.on_mean_s + p.off_mean_s) : 0.5;
        state = std::uniform_real_distribution<double>(0.0, 1.0)(rng_) < frac;
        period_end_ = period(state);
      }
      double t = now_;
      for (;;) {
        const double rate = rate_in(state);
        if (rate > 0.0) {
          const double candidate = t + std::exponential_distribution<double>(rate)(rng_);
          if (candidate <= period_end_) return candidate - now_;
        }
        t = period_end_;
        state = !state;
        period_end_ = t + period(state);
      }
    }
  }
  return 1.0 / pkt_rate;
}

PacketArrival TrafficSource::next() {
  now_ += next_gap();
  return PacketArrival{now_, draw_size()};
}

std::vector<PacketArrival> generate_traffic(const net::TrafficDescriptor& descriptor, double duration_s,
                                            std::uint64_t seed) {
  TrafficSource src(descriptor, seed);
  std::vector<PacketArrival> out;
  for (;;) {
    auto a = src.next();
    if (a.time_s >= duration_s) break;
    out.push_back(a);
  }
  return out;
}

}  // namespace gnnperf::sim
