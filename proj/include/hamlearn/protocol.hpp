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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <numbers>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hamlearn/bounds.hpp"
#include "hamlearn/model.hpp"
#include "hamlearn/recover.hpp"
#include "hamlearn/simkernel.hpp"

namespace hamlearn {

/// Where per-config gap estimates come from.
enum class GapSource : std::uint8_t {
  Sampled,      // finite-shot simulated experiments
  Expectation,  // exact quadrature expectations fed to the estimator
  Exact,        // exact gaps injected, no experiments
};

struct RfeOverrides {
  int shots = 96;
  int votes = 5;
  int medians = 0;  // 0 derives 2 * ceil(ln(1 / delta)) + 1
  double kappa = 1.5 * std::numbers::pi;
};

struct SweepAxes {
  std::vector<double> epsilons;
  std::vector<double> nus;
  std::vector<double> etas;
  std::vector<double> guess_offsets;
  int seeds = 20;
};

struct RunConfig {
  CoefficientVector true_lambda;
  CoefficientVector initial_guess;
  double nu = 3.0;
  double target_epsilon = 1e-4;
  double delta = 0.05;
  NoiseModel noise;
  RfeOverrides rfe;
  /// Gap precision is target_epsilon / c_hat; c_hat <= 0 calibrates it with
  /// a perturbation probe around the initial guess.
  double c_hat = 4.0;
  /// When positive, overrides target_epsilon / c_hat as the gap precision.
  double gap_epsilon = 0.0;
  std::uint64_t seed = 1;
  GapSource gap_source = GapSource::Sampled;
  SweepAxes sweep;
  std::string output;

  void validate() const;
  int medians() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& run);

/// Single-qubit instance: lambda = (0.1, 0.5, 0.3), guess (0.09, 0.51, 0.29),
/// eta = 0.05, nu = 3.
RunConfig preset_single_qubit();
/// Two-qubit instance with its published coefficients and guess, eta = 0.03,
/// nu = 5.
RunConfig preset_two_qubit();

struct ConfigEstimate {
  ControlConfig config;
  double estimate = 0.0;
  double exact = 0.0;
  double time_used = 0.0;
  double trace_time = 0.0;
  std::int64_t queries = 0;
  std::int64_t experiments = 0;
  bool degenerate = false;
};

struct LearnResult {
  CoefficientVector lambda_hat;
  double l2_error = 0.0;
  double total_evolution_time = 0.0;
  double trace_time_sum = 0.0;  // recomputed from the per-call trace
  std::int64_t total_experiments = 0;
  std::int64_t total_queries = 0;
  double c_hat = 0.0;
  double gap_epsilon = 0.0;
  std::vector<ConfigEstimate> configs;
  Eigen::VectorXd residuals;  // E(lambda_hat) - E_hat
  SolverReport solver;
  std::string solver_used;
  bool converged = false;
  double wall_seconds = 0.0;
};

nlohmann::json to_json(const LearnResult& result);

LearnResult learn(const RunConfig& run);

struct SweepRow {
  double nu = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double guess_offset = 0.0;
  int seed_index = 0;
  double total_time = 0.0;
  double trace_time = 0.0;
  std::int64_t experiments = 0;
  std::int64_t queries = 0;
  double l2_error = 0.0;
  bool converged = false;
};

struct SweepSummary {
  double nu = 0.0;
  double eta = 0.0;
  double epsilon = 0.0;
  double guess_offset = 0.0;
  int count = 0;
  double median_time = 0.0;
  double median_queries = 0.0;
  std::array<double, 5> error_percentiles{};  // 25, 35, 50, 65, 75
  int converged = 0;
};

struct SlopeFit {
  double nu = 0.0;
  double eta = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<SweepSummary> summary;
  std::vector<SlopeFit> fits;
};

/// learn() over nus x epsilons x seeds; fits log(median error) against
/// log(median total time) per nu.
SweepResult sweep_error_vs_time(const RunConfig& run);

/// The error-vs-time sweep repeated for every eta in run.sweep.etas.
SweepResult sweep_spam(const RunConfig& run);

/// learn() at a fixed gap precision (gap_epsilon, else target_epsilon) with initial guesses lambda + offset * u
/// for random unit directions u, one per seed.
SweepResult sweep_initial_guess(const RunConfig& run);

/// Linear interpolation between order statistics.
double percentile(std::vector<double> values, double pct);

/// Least-squares line through (log x, log y).
SlopeFit fit_log_log(const std::vector<double>& x, const std::vector<double>& y);

inline constexpr const char* kCsvMagic = "# hamlearn-csv v1";

void write_sweep_rows_csv(std::ostream& os, const SweepResult& result);
void write_sweep_summary_csv(std::ostream& os, const SweepResult& result);
/// Columns: k, s_bits, beta_string, gap.
void write_gap_csv(std::ostream& os, const std::vector<ControlConfig>& configs, const Eigen::VectorXd& gaps);
void write_learn_configs_csv(std::ostream& os, const LearnResult& result);

struct BoundsGrid {
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  std::vector<double> nus{0.0, 0.25, 0.5, 0.75};
  double q = 0.99;
  double k_factor = 10.0;
  double L0 = 0.0;
  int verifier_samples = 10000;
  std::uint64_t seed = 1;
};

struct BoundsReport {
  struct Row {
    double epsilon, nu, q, k_factor, L0, time_lower_bound, scaled;  // scaled = T0 * eps
  };
  std::vector<Row> rows;
  std::vector<bounds::UnitarySample> samples;
  double pass_fraction = 0.0;
};

BoundsReport bounds_report(const BoundsGrid& grid);
void write_bounds_csv(std::ostream& os, const BoundsReport& report);
void write_verifier_csv(std::ostream& os, const BoundsReport& report);

/// Formats a double so that it parses back bit-exactly.
std::string format_double(double x);

}  // namespace hamlearn
