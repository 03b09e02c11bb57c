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

#pragma once

#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "hamlearn/model.hpp"
#include "hamlearn/simkernel.hpp"

namespace hamlearn {

struct RfeConfig {
  double phi_max = 10.0;  // theta is known to lie in [0, phi_max]
  double epsilon = 1e-3;  // final half-width of the interval
  int shots_per_quadrature = 96;
  int votes = 5;
  int medians = 5;
  // Evolution time per round is kappa / (current interval width).
  double kappa = 1.5 * std::numbers::pi;

  void validate() const;
  /// Number of interval-shrinking rounds needed to reach width 2 * epsilon.
  int round_budget() const;
};

struct OracleCall {
  double t = 0.0;
  Quadrature quadrature = Quadrature::Cosine;
  double value = 0.0;
  double time_cost = 0.0;
};

/// Source of noisy cos(theta t) / sin(theta t) estimates. Every query is
/// charged t per underlying experiment run to the total evolution time.
class QuadratureOracle {
 public:
  virtual ~QuadratureOracle() = default;

  double query(double t, Quadrature q);

  double total_time() const { return total_time_; }
  std::int64_t calls() const { return calls_; }
  std::int64_t experiments() const { return experiments_; }

  /// Records every call into `sink` (not owned); pass nullptr to stop.
  void set_trace(std::vector<OracleCall>* sink) { trace_ = sink; }

 protected:
  /// `call_index` counts calls on this oracle, starting at 0.
  virtual double estimate(double t, Quadrature q, std::uint64_t call_index) = 0;
  /// Experiment runs consumed per call.
  virtual int runs_per_call() const { return 1; }

 private:
  double total_time_ = 0.0;
  std::int64_t calls_ = 0;
  std::int64_t experiments_ = 0;
  std::vector<OracleCall>* trace_ = nullptr;
};

/// Oracle over an arbitrary function (used for exact and adversarial tests).
class FunctionOracle final : public QuadratureOracle {
 public:
  using Fn = std::function<double(double t, Quadrature q, std::uint64_t call_index)>;
  explicit FunctionOracle(Fn fn, int runs_per_call = 1) : fn_(std::move(fn)), runs_(runs_per_call) {}

 protected:
  double estimate(double t, Quadrature q, std::uint64_t call_index) override { return fn_(t, q, call_index); }
  int runs_per_call() const override { return runs_; }

 private:
  Fn fn_;
  int runs_;
};

/// Noiseless signal cos(theta t) / sin(theta t).
FunctionOracle exact_oracle(double theta);

/// Oracle backed by the simulated phase-estimation experiment: each call
/// runs `shots` experiments and returns 2 * (fraction of zeros) - 1.
class ExperimentOracle final : public QuadratureOracle {
 public:
  ExperimentOracle(const PhaseEstimationExperiment& experiment, NoiseModel noise, int shots,
                   CounterStream stream);

 protected:
  double estimate(double t, Quadrature q, std::uint64_t call_index) override;
  int runs_per_call() const override { return shots_; }

 private:
  const PhaseEstimationExperiment* experiment_;
  NoiseModel noise_;
  int shots_;
  CounterStream stream_;
};

/// Shot-free variant: returns the exact expected quadrature value, including
/// the (1 - 2 eta) SPAM contraction.
class ExpectationOracle final : public QuadratureOracle {
 public:
  ExpectationOracle(const PhaseEstimationExperiment& experiment, NoiseModel noise)
      : experiment_(&experiment), noise_(noise) {}

 protected:
  double estimate(double t, Quadrature q, std::uint64_t call_index) override;

 private:
  const PhaseEstimationExperiment* experiment_;
  NoiseModel noise_;
};

struct RfeTraceRow {
  int round = 0;
  double a = 0.0;
  double b = 0.0;
  double t = 0.0;
  double x_hat = 0.0;
  double y_hat = 0.0;
  int decision = 0;  // 0 keeps the lower candidate, 1 the upper
};

struct RfeResult {
  double theta_hat = 0.0;
  double time_used = 0.0;
  std::int64_t calls = 0;
  int rounds = 0;
};

/// One pass of robust frequency estimation: shrink [0, phi_max] by a factor
/// 2/3 per round, choosing between [a, a + 2w/3] and [a + w/3, b] by a
/// majority vote over phase comparisons at t = kappa / w.
RfeResult rfe_estimate(QuadratureOracle& oracle, const RfeConfig& cfg,
                       std::vector<RfeTraceRow>* trace = nullptr);

struct MedianRfeResult {
  double theta_hat = 0.0;
  std::vector<double> estimates;
  double time_used = 0.0;
  std::int64_t calls = 0;
};

/// cfg.medians independent passes on the same oracle, combined by median.
MedianRfeResult rfe_median_estimate(QuadratureOracle& oracle, const RfeConfig& cfg);

double median_boost(std::span<const double> estimates);

struct NuAndShots {
  double nu_min = 0.0;
  int shots = 0;
};

/// Field strength and shot count that keep each quadrature within 1/sqrt(8)
/// of its ideal value with probability 2/3: nu = 96 * bound, N_b = 96.
NuAndShots required_nu_and_shots(double h_norm_bound);

/// A-priori bound on the gap of H_tot: 2 (sum |mu_a| + nu (n - 1/2)).
double gap_upper_bound(const CoefficientVector& guess, double nu);

}  // namespace hamlearn
