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

#include "hamlearn/recover.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hamlearn/parallel.hpp"

namespace hamlearn {

namespace {

bool row_active(const RowMask& mask, std::size_t i) { return mask.empty() || mask[i] != 0; }

void check_mask(const RowMask& mask, std::size_t rows) {
  if (!mask.empty() && mask.size() != rows) throw std::invalid_argument("row mask has wrong length");
}

struct GapEvaluation {
  Eigen::VectorXd gaps;
  std::vector<std::uint8_t> degenerate;
  Eigen::MatrixXd jacobian;  // empty unless requested
};

// Gaps (and optionally Hellmann-Feynman derivatives) over all configs.
GapEvaluation evaluate(const CoefficientVector& mu, double nu, bool with_jacobian, const RowMask& mask) {
  const int n = mu.num_qubits();
  const auto configs = enumerate_configs(n, nu);
  check_mask(mask, configs.size());
  const auto rows = static_cast<Eigen::Index>(configs.size());
  const auto cols = mu.size();
  const DenseOperator h = build_hamiltonian(mu);

  GapEvaluation out;
  out.gaps = Eigen::VectorXd::Zero(rows);
  out.degenerate.assign(configs.size(), 0);
  if (with_jacobian) out.jacobian = Eigen::MatrixXd::Zero(rows, cols);

  parallel_for(configs.size(), [&](std::size_t i) {
    const auto& cfg = configs[i];
    const auto es = eigensystem(h - nu * build_control(cfg));
    const auto info = gap_info(es, nu);
    const auto r = static_cast<Eigen::Index>(i);
    out.gaps(r) = info.gap;
    out.degenerate[i] = info.degenerate ? 1 : 0;
    if (!with_jacobian || !row_active(mask, i)) return;
    if (info.degenerate) {
      throw std::domain_error("jacobian: degenerate spectrum for config k=" + std::to_string(cfg.k + 1) +
                              " s=" + cfg.s_bits() + " beta=" + cfg.beta_string());
    }
    const StateVector psi0 = es.states.col(0);
    const StateVector psi1 = es.states.col(1);
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto a = pauli_from_coefficient_index(n, static_cast<std::size_t>(c));
      out.jacobian(r, c) = pauli_expectation(a, psi1) - pauli_expectation(a, psi0);
    }
  });
  return out;
}

Eigen::VectorXd masked(const Eigen::VectorXd& v, const RowMask& mask) {
  if (mask.empty()) return v;
  Eigen::VectorXd out = v;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)] == 0) out(i) = 0.0;
  }
  return out;
}

void check_shapes(const GapVector& e_hat, const CoefficientVector& mu) {
  if (e_hat.n != mu.num_qubits() || e_hat.size() != num_configs(mu.num_qubits())) {
    throw std::invalid_argument("gap vector and coefficient vector have mismatched shapes");
  }
}

CoefficientVector clamp_to_cap(int n, const Eigen::VectorXd& v) {
  return CoefficientVector(n, v.cwiseMax(-kCoefficientCap).cwiseMin(kCoefficientCap));
}

double loss_of(const Eigen::VectorXd& residual) { return 0.5 * residual.squaredNorm(); }

}  // namespace

GapVector gap_vector(const CoefficientVector& mu, double nu) {
  auto ev = evaluate(mu, nu, false, {});
  return {mu.num_qubits(), nu, std::move(ev.gaps), std::move(ev.degenerate)};
}

Eigen::MatrixXd jacobian(const CoefficientVector& mu, double nu) { return evaluate(mu, nu, true, {}).jacobian; }

Eigen::VectorXd j_zero(int n, double scale) {
  const auto m = num_coefficients(n);
  Eigen::VectorXd d(static_cast<Eigen::Index>(m));
  const double pow2 = std::ldexp(1.0, n);
  for (std::size_t i = 0; i < m; ++i) {
    const int w = weight(pauli_from_coefficient_index(n, i));
    d(static_cast<Eigen::Index>(i)) = scale * scale * w * pow2 * std::pow(3.0, n - w);
  }
  return d;
}

RowMask nondegenerate_rows(const CoefficientVector& mu, double nu) {
  const auto g = gap_vector(mu, nu);
  RowMask mask(g.size(), 1);
  for (std::size_t i = 0; i < g.size(); ++i) mask[i] = g.degenerate[i] != 0 ? 0 : 1;
  return mask;
}

double loss(const GapVector& e_hat, const CoefficientVector& mu, double nu, const RowMask& mask) {
  check_shapes(e_hat, mu);
  check_mask(mask, e_hat.size());
  const auto g = gap_vector(mu, nu);
  return loss_of(masked(e_hat.values - g.values, mask));
}

Eigen::VectorXd loss_gradient(const GapVector& e_hat, const CoefficientVector& mu, double nu,
                              const RowMask& mask) {
  check_shapes(e_hat, mu);
  const auto ev = evaluate(mu, nu, true, mask);
  return ev.jacobian.transpose() * masked(ev.gaps - e_hat.values, mask);
}

namespace {

// Second derivatives of E_k for k = 0 and 1 given Pauli matrices in the
// eigenbasis: 2 Re sum_{j != k} <k|B|j><j|A|k> / (E_k - E_j).
double second_derivative_level(const EigenSystem& es, const Eigen::MatrixXcd& pa, const Eigen::MatrixXcd& pb,
                               Eigen::Index k) {
  double acc = 0.0;
  for (Eigen::Index j = 0; j < es.energies.size(); ++j) {
    if (j == k) continue;
    acc += (pb(k, j) * pa(j, k)).real() / (es.energies(k) - es.energies(j));
  }
  return 2.0 * acc;
}

EigenSystem nondegenerate_eigensystem(const CoefficientVector& mu, const ControlConfig& cfg) {
  auto es = eigensystem(build_total(mu, cfg));
  if (gap_info(es, cfg.nu).degenerate) throw std::domain_error("second derivative: degenerate spectrum");
  return es;
}

}  // namespace

double second_derivative_gap(const CoefficientVector& mu, const ControlConfig& cfg, const PauliString& a,
                             const PauliString& b) {
  const auto es = nondegenerate_eigensystem(mu, cfg);
  const Eigen::MatrixXcd pa = es.states.adjoint() * pauli_matrix(a) * es.states;
  const Eigen::MatrixXcd pb = es.states.adjoint() * pauli_matrix(b) * es.states;
  return second_derivative_level(es, pa, pb, 1) - second_derivative_level(es, pa, pb, 0);
}

Eigen::MatrixXd gap_hessian(const CoefficientVector& mu, const ControlConfig& cfg) {
  const auto es = nondegenerate_eigensystem(mu, cfg);
  const int n = mu.num_qubits();
  const auto m = mu.size();
  std::vector<Eigen::MatrixXcd> p(static_cast<std::size_t>(m));
  for (Eigen::Index c = 0; c < m; ++c) {
    p[static_cast<std::size_t>(c)] =
        es.states.adjoint() * pauli_matrix(pauli_from_coefficient_index(n, static_cast<std::size_t>(c))) * es.states;
  }
  Eigen::MatrixXd hess(m, m);
  for (Eigen::Index x = 0; x < m; ++x) {
    for (Eigen::Index y = x; y < m; ++y) {
      const auto& pa = p[static_cast<std::size_t>(x)];
      const auto& pb = p[static_cast<std::size_t>(y)];
      hess(x, y) = second_derivative_level(es, pa, pb, 1) - second_derivative_level(es, pa, pb, 0);
      hess(y, x) = hess(x, y);
    }
  }
  return hess;
}

HessianReport hessian_loss(const GapVector& e_hat, const CoefficientVector& mu, double nu, const RowMask& mask) {
  check_shapes(e_hat, mu);
  const auto ev = evaluate(mu, nu, true, mask);
  const auto configs = enumerate_configs(mu.num_qubits(), nu);
  const Eigen::VectorXd residual = masked(ev.gaps - e_hat.values, mask);

  std::vector<Eigen::MatrixXd> terms(configs.size());
  parallel_for(configs.size(), [&](std::size_t i) {
    const double r = residual(static_cast<Eigen::Index>(i));
    if (r != 0.0) terms[i] = r * gap_hessian(mu, configs[i]);
  });

  HessianReport out;
  out.matrix = ev.jacobian.transpose() * ev.jacobian;
  for (const auto& t : terms) {
    if (t.size() != 0) out.matrix += t;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(out.matrix, Eigen::EigenvaluesOnly);
  out.min_eigenvalue = solver.eigenvalues()(0);
  return out;
}

nlohmann::json to_json(const SolverReport& report) {
  return {{"lambda_hat", to_json(report.lambda_hat)},
          {"iterations", report.iterations},
          {"final_step_norm", report.final_step_norm},
          {"loss", report.loss},
          {"converged", report.converged}};
}

SolverReport solve_fixed_point(const GapVector& e_hat, const CoefficientVector& mu0, double nu,
                               const SolverOptions& options) {
  check_shapes(e_hat, mu0);
  const int n = mu0.num_qubits();
  const Eigen::VectorXd j0_inv = j_zero(n).cwiseInverse();
  constexpr int kMaxHalvings = 6;
  constexpr int kGrowthLimit = 3;

  SolverReport report;
  report.lambda_hat = clamp_to_cap(n, mu0.values());
  auto ev = evaluate(report.lambda_hat, nu, true, options.mask);
  Eigen::VectorXd residual = masked(ev.gaps - e_hat.values, options.mask);
  report.loss = loss_of(residual);

  int growth = 0;
  double previous_step = std::numeric_limits<double>::infinity();
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const Eigen::VectorXd step = -j0_inv.cwiseProduct(ev.jacobian.transpose() * residual);
    const double tolerance_slack = 1e-12 * report.loss + 1e-28;

    double scale = 1.0;
    bool accepted = false;
    CoefficientVector trial;
    Eigen::VectorXd trial_residual;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      trial = clamp_to_cap(n, report.lambda_hat.values() + scale * step);
      const auto g = gap_vector(trial, nu);
      trial_residual = masked(g.values - e_hat.values, options.mask);
      if (loss_of(trial_residual) <= report.loss + tolerance_slack) {
        accepted = true;
        break;
      }
    }

    const double step_norm = (trial.values() - report.lambda_hat.values()).norm();
    report.iterations = iter;
    report.final_step_norm = step_norm;
    report.step_norms.push_back(step_norm);
    if (!accepted) return report;

    report.lambda_hat = trial;
    if (step_norm < options.tol) {
      report.loss = loss_of(trial_residual);
      report.converged = true;
      return report;
    }
    growth = step_norm > previous_step ? growth + 1 : 0;
    if (growth >= kGrowthLimit) {
      report.loss = loss_of(trial_residual);
      return report;
    }
    previous_step = step_norm;

    ev = evaluate(report.lambda_hat, nu, true, options.mask);
    residual = masked(ev.gaps - e_hat.values, options.mask);
    report.loss = loss_of(residual);
  }
  return report;
}

SolverReport solve_gauss_newton(const GapVector& e_hat, const CoefficientVector& mu0, double nu,
                                const SolverOptions& options) {
  check_shapes(e_hat, mu0);
  const int n = mu0.num_qubits();
  constexpr int kMaxHalvings = 30;

  SolverReport report;
  report.lambda_hat = clamp_to_cap(n, mu0.values());
  for (int iter = 1; iter <= options.max_iter; ++iter) {
    const auto ev = evaluate(report.lambda_hat, nu, true, options.mask);
    const Eigen::VectorXd residual = masked(ev.gaps - e_hat.values, options.mask);
    report.loss = loss_of(residual);
    const Eigen::MatrixXd normal = ev.jacobian.transpose() * ev.jacobian;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff())) {
      throw std::runtime_error("gauss-newton: J^T J is singular");
    }
    const Eigen::VectorXd step = -ldlt.solve(ev.jacobian.transpose() * residual);

    double scale = 1.0;
    CoefficientVector trial;
    double trial_loss = 0.0;
    for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
      trial = clamp_to_cap(n, report.lambda_hat.values() + scale * step);
      trial_loss = loss_of(masked(gap_vector(trial, nu).values - e_hat.values, options.mask));
      if (trial_loss <= report.loss * (1.0 + 1e-12) + 1e-28) break;
    }
    const double step_norm = (trial.values() - report.lambda_hat.values()).norm();
    report.lambda_hat = trial;
    report.loss = trial_loss;
    report.iterations = iter;
    report.final_step_norm = step_norm;
    report.step_norms.push_back(step_norm);
    if (step_norm < options.tol) {
      report.converged = true;
      return report;
    }
  }
  return report;
}

std::vector<StabilityProbe> probe_stability(const CoefficientVector& lambda, double nu,
                                            const std::vector<double>& rhos, int samples_per_rho,
                                            const CounterStream& stream) {
  const auto e_star = gap_vector(lambda, nu);
  const auto m = static_cast<Eigen::Index>(e_star.size());
  std::vector<StabilityProbe> out;
  for (std::size_t r = 0; r < rhos.size(); ++r) {
    for (int s = 0; s < samples_per_rho; ++s) {
      const auto sub = stream.derive({r, static_cast<std::uint64_t>(s)});
      Eigen::VectorXd dir(m);
      for (Eigen::Index i = 0; i < m; ++i) dir(i) = normal(sub, static_cast<std::uint64_t>(i));
      GapVector e_hat = e_star;
      e_hat.values += rhos[r] * dir.normalized();
      const auto report = solve_fixed_point(e_hat, lambda, nu);
      out.push_back({rhos[r], (report.lambda_hat.values() - lambda.values()).norm() / rhos[r]});
    }
  }
  return out;
}

}  // namespace hamlearn
