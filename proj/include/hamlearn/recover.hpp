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
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hamlearn/model.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

/// Scale of the gap Jacobian relative to the +/-1 pattern of its nu -> inf
/// limit. First-order perturbation theory gives dE_gap/dmu_a =
/// <Psi1|s^a|Psi1> - <Psi0|s^a|Psi0>, whose limit entries are +/-2.
inline constexpr double kJacobianScale = 2.0;

/// Gaps of H_tot(mu, nu) over enumerate_configs(n, nu), in that order.
struct GapVector {
  int n = 0;
  double nu = 0.0;
  Eigen::VectorXd values;
  std::vector<std::uint8_t> degenerate;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
};

GapVector gap_vector(const CoefficientVector& mu, double nu);

/// Rows: configs; columns: coefficient_index. Throws std::domain_error on a
/// degenerate config.
Eigen::MatrixXd jacobian(const CoefficientVector& mu, double nu);

/// Diagonal limit of J^T J, entries scale^2 * |a| * 2^n * 3^(n - |a|).
Eigen::VectorXd j_zero(int n, double scale = kJacobianScale);

/// Rows that take part in a fit; all ones means every config is used.
using RowMask = std::vector<std::uint8_t>;

/// Marks configs whose spectrum is degenerate at mu as excluded.
RowMask nondegenerate_rows(const CoefficientVector& mu, double nu);

/// 0.5 * || E_hat - E(mu, nu) ||^2 over active rows.
double loss(const GapVector& e_hat, const CoefficientVector& mu, double nu, const RowMask& mask = {});

/// J^T (E(mu, nu) - E_hat).
Eigen::VectorXd loss_gradient(const GapVector& e_hat, const CoefficientVector& mu, double nu,
                              const RowMask& mask = {});

/// d^2 (E1 - E0) / dmu_a dmu_b via 2 Re <Psi_k| s^b (E_k - H)^+ s^a |Psi_k>.
double second_derivative_gap(const CoefficientVector& mu, const ControlConfig& cfg, const PauliString& a,
                             const PauliString& b);

/// All second derivatives of one gap, (4^n - 1) x (4^n - 1).
Eigen::MatrixXd gap_hessian(const CoefficientVector& mu, const ControlConfig& cfg);

struct HessianReport {
  Eigen::MatrixXd matrix;
  double min_eigenvalue = 0.0;
};

/// J^T J + sum_i (E_i(mu) - E_hat_i) d^2 E_i / dmu^2.
HessianReport hessian_loss(const GapVector& e_hat, const CoefficientVector& mu, double nu,
                           const RowMask& mask = {});

struct SolverOptions {
  double tol = 1e-10;
  int max_iter = 500;
  RowMask mask;
};

struct SolverReport {
  CoefficientVector lambda_hat;
  int iterations = 0;
  double final_step_norm = 0.0;
  double loss = 0.0;
  bool converged = false;
  std::vector<double> step_norms;
};

nlohmann::json to_json(const SolverReport& report);

/// mu <- mu - J0^{-1} grad L, with step halving (up to 6 times) whenever a
/// step increases the loss. Reports divergence when the step norm grows on
/// three consecutive iterations.
SolverReport solve_fixed_point(const GapVector& e_hat, const CoefficientVector& mu0, double nu,
                               const SolverOptions& options = {});

/// Damped Gauss-Newton on the residual E_hat - E(mu, nu).
SolverReport solve_gauss_newton(const GapVector& e_hat, const CoefficientVector& mu0, double nu,
                                const SolverOptions& options = {});

struct StabilityProbe {
  double rho = 0.0;
  double ratio = 0.0;  // ||lambda_hat - lambda|| / ||E_hat - E*||
};

/// Perturbs E(lambda) by random vectors of norm rho, recovers with the
/// fixed-point solver started at lambda, and records the error ratio.
std::vector<StabilityProbe> probe_stability(const CoefficientVector& lambda, double nu,
                                            const std::vector<double>& rhos, int samples_per_rho,
                                            const CounterStream& stream);

}  // namespace hamlearn
