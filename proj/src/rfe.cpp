// Copyright 2026 The hamlearn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hamlearn/rfe.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamlearn {

void RfeConfig::validate() const {
  if (!(phi_max > 0.0)) throw std::invalid_argument("rfe: phi_max must be positive");
  if (!(epsilon > 0.0)) throw std::invalid_argument("rfe: epsilon must be positive");
  if (shots_per_quadrature < 1) throw std::invalid_argument("rfe: shots per quadrature must be >= 1");
  if (votes < 1) throw std::invalid_argument("rfe: votes must be >= 1");
  if (medians < 1) throw std::invalid_argument("rfe: medians must be >= 1");
  if (!(kappa > 0.0)) throw std::invalid_argument("rfe: kappa must be positive");
}

int RfeConfig::round_budget() const {
  if (phi_max <= 2.0 * epsilon) return 0;
  return static_cast<int>(std::ceil(std::log(phi_max / (2.0 * epsilon)) / std::log(1.5))) + 1;
}

double QuadratureOracle::query(double t, Quadrature q) {
  if (!(t >= 0.0)) throw std::invalid_argument("oracle: evolution time must be non-negative");
  const double value = estimate(t, q, static_cast<std::uint64_t>(calls_));
  const int runs = runs_per_call();
  const double cost = t * runs;
  total_time_ += cost;
  ++calls_;
  experiments_ += runs;
  if (trace_ != nullptr) trace_->push_back({t, q, value, cost});
  return value;
}

FunctionOracle exact_oracle(double theta) {
  return FunctionOracle([theta](double t, Quadrature q, std::uint64_t) {
    return q == Quadrature::Cosine ? std::cos(theta * t) : std::sin(theta * t);
  });
}

ExperimentOracle::ExperimentOracle(const PhaseEstimationExperiment& experiment, NoiseModel noise, int shots,
                                   CounterStream stream)
    : experiment_(&experiment), noise_(noise), shots_(shots), stream_(stream) {
  noise_.validate();
  if (shots_ < 1) throw std::invalid_argument("oracle: shots must be >= 1");
}

double ExperimentOracle::estimate(double t, Quadrature q, std::uint64_t call_index) {
  const auto stream = stream_.derive({call_index, static_cast<std::uint64_t>(q)});
  return quadrature_estimate(experiment_->sample(t, q, noise_, shots_, stream));
}

double ExpectationOracle::estimate(double t, Quadrature q, std::uint64_t) {
  return quadrature_estimate(experiment_->prob_bit0(t, q, noise_));
}

namespace {

// Distance on the circle between two angles.
double circular_distance(double x, double y) { return std::abs(std::remainder(x - y, 2.0 * std::numbers::pi)); }

}  // namespace

RfeResult rfe_estimate(QuadratureOracle& oracle, const RfeConfig& cfg, std::vector<RfeTraceRow>* trace) {
  cfg.validate();
  const double time_before = oracle.total_time();
  const auto calls_before = oracle.calls();
  const int budget = cfg.round_budget();

  double a = 0.0;
  double b = cfg.phi_max;
  int round = 0;
  while (b - a > 2.0 * cfg.epsilon && round < budget) {
    const double w = b - a;
    const double t = cfg.kappa / w;
    const double lower_mid = a + w / 3.0;
    const double upper_mid = a + 2.0 * w / 3.0;

    int lower_votes = 0;
    double sum_x = 0.0;
    double sum_y = 0.0;
    for (int v = 0; v < cfg.votes; ++v) {
      const double x = oracle.query(t, Quadrature::Cosine);
      const double y = oracle.query(t, Quadrature::Sine);
      sum_x += x;
      sum_y += y;
      const double phase = std::atan2(y, x);
      const bool lower = circular_distance(phase, lower_mid * t) <= circular_distance(phase, upper_mid * t);
      lower_votes += lower ? 1 : 0;
      if (trace != nullptr) trace->push_back({round, a, b, t, x, y, lower ? 0 : 1});
    }

    bool keep_lower = 2 * lower_votes > cfg.votes;
    if (2 * lower_votes == cfg.votes) {
      // Even vote count split evenly: fall back to the averaged phase.
      const double phase = std::atan2(sum_y, sum_x);
      keep_lower = circular_distance(phase, lower_mid * t) <= circular_distance(phase, upper_mid * t);
    }
    if (keep_lower) {
      b = a + 2.0 * w / 3.0;
    } else {
      a = a + w / 3.0;
    }
    ++round;
  }

  return {0.5 * (a + b), oracle.total_time() - time_before, oracle.calls() - calls_before, round};
}

MedianRfeResult rfe_median_estimate(QuadratureOracle& oracle, const RfeConfig& cfg) {
  cfg.validate();
  MedianRfeResult out;
  out.estimates.reserve(static_cast<std::size_t>(cfg.medians));
  for (int m = 0; m < cfg.medians; ++m) {
    const auto r = rfe_estimate(oracle, cfg);
    out.estimates.push_back(r.theta_hat);
    out.time_used += r.time_used;
    out.calls += r.calls;
  }
  out.theta_hat = median_boost(out.estimates);
  return out;
}

double median_boost(std::span<const double> estimates) {
  if (estimates.empty()) throw std::invalid_argument("median of an empty list");
  std::vector<double> v(estimates.begin(), estimates.end());
  const auto mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

NuAndShots required_nu_and_shots(double h_norm_bound) {
  if (!(h_norm_bound > 0.0)) throw std::invalid_argument("norm bound must be positive");
  return {96.0 * h_norm_bound, 96};
}

double gap_upper_bound(const CoefficientVector& guess, double nu) {
  return 2.0 * (guess.l1_norm() + nu * (guess.num_qubits() - 0.5));
}

}  // namespace hamlearn
