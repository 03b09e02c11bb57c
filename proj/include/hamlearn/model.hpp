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
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "hamlearn/pauli.hpp"

namespace hamlearn {

/// Hard cap on any coefficient magnitude; true coefficients live in [-1, 1].
inline constexpr double kCoefficientCap = 2.0;

/// Real coefficients of H = sum_{a != 0} mu_a sigma^a, indexed by
/// coefficient_index(a).
class CoefficientVector {
 public:
  CoefficientVector() = default;
  explicit CoefficientVector(int n);
  CoefficientVector(int n, Eigen::VectorXd values);
  CoefficientVector(int n, std::initializer_list<double> values);

  int num_qubits() const { return n_; }
  Eigen::Index size() const { return values_.size(); }
  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }

  double operator[](const PauliString& a) const;
  double& operator[](const PauliString& a);

  /// Throws if any entry exceeds kCoefficientCap in magnitude.
  void check_bounded() const;
  double l1_norm() const { return values_.cwiseAbs().sum(); }

 private:
  int n_ = 0;
  Eigen::VectorXd values_;
};

/// {"n": n, "coeffs": {"X": 0.1, "ZZ": 0.3}}; omitted keys are zero.
nlohmann::json to_json(const CoefficientVector& mu);
CoefficientVector coefficients_from_json(const nlohmann::json& j);

/// Static field configuration. Qubit indices are 0-based here; the
/// distinguished qubit carries half the field.
struct ControlConfig {
  int k = 0;
  std::vector<std::uint8_t> s;     // signs, one bit per qubit
  std::vector<std::uint8_t> beta;  // axes in {1,2,3}
  double nu = 1.0;

  int num_qubits() const { return static_cast<int>(s.size()); }
  void validate() const;

  std::string s_bits() const;       // e.g. "010"
  std::string beta_string() const;  // e.g. "XXZ"
};

/// All n * 2^n * 3^n configurations: k outer, then s as an integer
/// (qubit 0 most significant), then beta as a base-3 integer.
std::vector<ControlConfig> enumerate_configs(int n, double nu);
std::size_t num_configs(int n);

DenseOperator build_hamiltonian(const CoefficientVector& mu);
/// H_ctrl without the field strength factor.
DenseOperator build_control(const ControlConfig& cfg);
/// H(mu) - nu * H_ctrl(cfg).
DenseOperator build_total(const CoefficientVector& mu, const ControlConfig& cfg);

/// Full spectrum of a Hermitian operator, energies ascending; states are
/// the matching columns.
struct EigenSystem {
  Eigen::VectorXd energies;
  Eigen::MatrixXcd states;
};

EigenSystem eigensystem(const DenseOperator& h);

/// Spectral norm of a Hermitian operator.
double operator_norm(const DenseOperator& h);

inline constexpr double kDegeneracyThreshold = 1e-8;
inline constexpr double kWeakGuardFraction = 0.1;

struct GapInfo {
  double gap = 0.0;        // E1 - E0
  double guard_gap = 0.0;  // E2 - E1, +inf for a single qubit
  bool degenerate = false;
  bool weakly_protected = false;  // guard gap below 0.1 * nu
};

GapInfo gap_info(const EigenSystem& es, double nu);
GapInfo exact_gap(const CoefficientVector& mu, const ControlConfig& cfg);

struct ProductStates {
  StateVector phi0;
  StateVector phi1;
  StateVector phi_plus;
};

ProductStates product_states(const ControlConfig& cfg);

/// +/- a single-qubit Pauli acting on one qubit.
struct SignedPauli {
  int qubit = 0;
  int axis = 1;
  int sign = 1;

  PauliString string(int n) const;
  StateVector apply(int n, const StateVector& psi) const;
  DenseOperator matrix(int n) const;
};

struct Observables {
  SignedPauli cosine;
  SignedPauli sine;
};

/// O_c swaps Phi0 <-> Phi1; O_s maps Phi0 -> -i Phi1 and Phi1 -> i Phi0.
Observables select_observables(const ControlConfig& cfg);

}  // namespace hamlearn
