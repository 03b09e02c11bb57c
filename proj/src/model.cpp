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

#include "hamlearn/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace hamlearn {

CoefficientVector::CoefficientVector(int n)
    : n_(n), values_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(num_coefficients(n)))) {}

CoefficientVector::CoefficientVector(int n, Eigen::VectorXd values) : n_(n), values_(std::move(values)) {
  if (static_cast<std::size_t>(values_.size()) != num_coefficients(n)) {
    throw std::invalid_argument("coefficient vector needs 4^n - 1 = " +
                                std::to_string(num_coefficients(n)) + " entries, got " +
                                std::to_string(values_.size()));
  }
}

CoefficientVector::CoefficientVector(int n, std::initializer_list<double> values)
    : CoefficientVector(n, Eigen::Map<const Eigen::VectorXd>(values.begin(),
                                                             static_cast<Eigen::Index>(values.size()))) {}

double CoefficientVector::operator[](const PauliString& a) const {
  return values_(static_cast<Eigen::Index>(coefficient_index(a)));
}

double& CoefficientVector::operator[](const PauliString& a) {
  return values_(static_cast<Eigen::Index>(coefficient_index(a)));
}

void CoefficientVector::check_bounded() const {
  for (Eigen::Index i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_(i)) || std::abs(values_(i)) > kCoefficientCap) {
      throw std::invalid_argument("coefficient " +
                                  pauli_from_coefficient_index(n_, static_cast<std::size_t>(i)).to_string() +
                                  " outside [-2, 2]");
    }
  }
}

nlohmann::json to_json(const CoefficientVector& mu) {
  nlohmann::json coeffs = nlohmann::json::object();
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu.values()(i) != 0.0) {
      coeffs[pauli_from_coefficient_index(mu.num_qubits(), static_cast<std::size_t>(i)).to_string()] =
          mu.values()(i);
    }
  }
  return {{"n", mu.num_qubits()}, {"coeffs", coeffs}};
}

CoefficientVector coefficients_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  CoefficientVector mu(n);
  if (j.contains("values")) {
    const auto values = j.at("values").get<std::vector<double>>();
    if (values.size() != num_coefficients(n)) {
      throw std::invalid_argument("\"values\" must list 4^n - 1 coefficients");
    }
    for (std::size_t i = 0; i < values.size(); ++i) mu.values()(static_cast<Eigen::Index>(i)) = values[i];
  }
  if (j.contains("coeffs")) {
    for (const auto& [key, value] : j.at("coeffs").items()) {
      const auto a = PauliString::parse(key);
      if (a.size() != n) throw std::invalid_argument("Pauli key '" + key + "' has wrong length");
      mu[a] = value.get<double>();
    }
  }
  mu.check_bounded();
  return mu;
}

void ControlConfig::validate() const {
  const int n = num_qubits();
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("control config has invalid size");
  if (beta.size() != s.size()) throw std::invalid_argument("control config: s and beta differ in length");
  if (k < 0 || k >= n) throw std::invalid_argument("control config: k out of range");
  for (std::size_t j = 0; j < s.size(); ++j) {
    if (s[j] > 1) throw std::invalid_argument("control config: sign bits must be 0/1");
    if (beta[j] < 1 || beta[j] > 3) throw std::invalid_argument("control config: beta entries must be 1..3");
  }
  if (!(nu > 0.0)) throw std::invalid_argument("control config: nu must be positive");
}

std::string ControlConfig::s_bits() const {
  std::string out;
  for (auto b : s) out.push_back(b != 0 ? '1' : '0');
  return out;
}

std::string ControlConfig::beta_string() const {
  std::string out;
  for (auto b : beta) out.push_back("IXYZ"[b]);
  return out;
}

std::size_t num_configs(int n) {
  std::size_t pow3 = 1;
  for (int j = 0; j < n; ++j) pow3 *= 3;
  return static_cast<std::size_t>(n) * (std::size_t{1} << n) * pow3;
}

std::vector<ControlConfig> enumerate_configs(int n, double nu) {
  if (n < 1 || n > kMaxQubits) throw std::invalid_argument("system size out of range");
  std::size_t pow3 = 1;
  for (int j = 0; j < n; ++j) pow3 *= 3;
  std::vector<ControlConfig> out;
  out.reserve(num_configs(n));
  for (int k = 0; k < n; ++k) {
    for (std::size_t sv = 0; sv < (std::size_t{1} << n); ++sv) {
      for (std::size_t bv = 0; bv < pow3; ++bv) {
        ControlConfig cfg;
        cfg.k = k;
        cfg.nu = nu;
        cfg.s.resize(static_cast<std::size_t>(n));
        cfg.beta.resize(static_cast<std::size_t>(n));
        std::size_t bits = sv;
        std::size_t digits = bv;
        for (int j = n - 1; j >= 0; --j) {
          cfg.s[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(bits & 1u);
          cfg.beta[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(digits % 3 + 1);
          bits >>= 1;
          digits /= 3;
        }
        out.push_back(std::move(cfg));
      }
    }
  }
  return out;
}

DenseOperator build_hamiltonian(const CoefficientVector& mu) {
  const int n = mu.num_qubits();
  const auto dim = Eigen::Index{1} << n;
  DenseOperator h = DenseOperator::Zero(dim, dim);
  for (Eigen::Index i = 0; i < mu.size(); ++i) {
    if (mu.values()(i) == 0.0) continue;
    h += mu.values()(i) * pauli_matrix(pauli_from_coefficient_index(n, static_cast<std::size_t>(i)));
  }
  return h;
}

namespace {

PauliString single_site(int n, int qubit, int axis) {
  std::vector<std::uint8_t> e(static_cast<std::size_t>(n), 0);
  e[static_cast<std::size_t>(qubit)] = static_cast<std::uint8_t>(axis);
  return PauliString(std::move(e));
}

}  // namespace

DenseOperator build_control(const ControlConfig& cfg) {
  cfg.validate();
  const int n = cfg.num_qubits();
  const auto dim = Eigen::Index{1} << n;
  DenseOperator h = DenseOperator::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    double coeff = cfg.s[static_cast<std::size_t>(j)] != 0 ? -1.0 : 1.0;
    if (j == cfg.k) coeff *= 0.5;
    h += coeff * pauli_matrix(single_site(n, j, cfg.beta[static_cast<std::size_t>(j)]));
  }
  return h;
}

DenseOperator build_total(const CoefficientVector& mu, const ControlConfig& cfg) {
  if (mu.num_qubits() != cfg.num_qubits()) {
    throw std::invalid_argument("coefficient vector and control config differ in system size");
  }
  return build_hamiltonian(mu) - cfg.nu * build_control(cfg);
}

EigenSystem eigensystem(const DenseOperator& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("eigensystem: matrix must be square");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("eigensystem: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigensystem: diagonalization failed");
  return {solver.eigenvalues(), solver.eigenvectors()};
}

double operator_norm(const DenseOperator& h) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().maxCoeff();
}

GapInfo gap_info(const EigenSystem& es, double nu) {
  GapInfo info;
  const auto& e = es.energies;
  info.gap = e(1) - e(0);
  info.guard_gap = e.size() > 2 ? e(2) - e(1) : std::numeric_limits<double>::infinity();
  info.degenerate = info.gap < kDegeneracyThreshold || info.guard_gap < kDegeneracyThreshold;
  info.weakly_protected = info.guard_gap < kWeakGuardFraction * nu;
  return info;
}

GapInfo exact_gap(const CoefficientVector& mu, const ControlConfig& cfg) {
  return gap_info(eigensystem(build_total(mu, cfg)), cfg.nu);
}

ProductStates product_states(const ControlConfig& cfg) {
  cfg.validate();
  const int n = cfg.num_qubits();
  std::vector<StateVector> factors;
  factors.reserve(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    factors.push_back(pauli_eigenstate(cfg.s[static_cast<std::size_t>(j)], cfg.beta[static_cast<std::size_t>(j)]));
  }
  ProductStates out;
  out.phi0 = tensor_product(factors);
  const auto kk = static_cast<std::size_t>(cfg.k);
  factors[kk] = pauli_eigenstate(1 - cfg.s[kk], cfg.beta[kk]);
  out.phi1 = tensor_product(factors);
  out.phi_plus = (out.phi0 + out.phi1) / std::sqrt(2.0);
  return out;
}

PauliString SignedPauli::string(int n) const { return single_site(n, qubit, axis); }

StateVector SignedPauli::apply(int n, const StateVector& psi) const {
  return static_cast<double>(sign) * apply_pauli(string(n), psi);
}

DenseOperator SignedPauli::matrix(int n) const {
  return static_cast<double>(sign) * pauli_matrix(string(n));
}

namespace {

struct ObservableEntry {
  int cos_axis, cos_sign, sin_axis, sin_sign;
};

// Indexed by [beta_k - 1][s_k].
constexpr ObservableEntry kObservableTable[3][2] = {
    {{3, +1, 2, +1}, {3, +1, 2, -1}},
    {{3, +1, 1, -1}, {3, +1, 1, +1}},
    {{1, +1, 2, -1}, {1, +1, 2, +1}},
};

bool table_entry_valid(int beta, int s) {
  const auto& e = kObservableTable[beta - 1][s];
  const auto phi0 = pauli_eigenstate(s, beta);
  const auto phi1 = pauli_eigenstate(1 - s, beta);
  const SignedPauli oc{0, e.cos_axis, e.cos_sign};
  const SignedPauli os{0, e.sin_axis, e.sin_sign};
  const Complex i1(0.0, 1.0);
  const double tol = 1e-14;
  return (oc.apply(1, phi0) - phi1).norm() < tol && (oc.apply(1, phi1) - phi0).norm() < tol &&
         (os.apply(1, phi0) + i1 * phi1).norm() < tol && (os.apply(1, phi1) - i1 * phi0).norm() < tol;
}

bool observable_table_checked() {
  for (int beta = 1; beta <= 3; ++beta) {
    for (int s = 0; s <= 1; ++s) {
      if (!table_entry_valid(beta, s)) {
        throw std::logic_error("observable table violates O_c/O_s requirements");
      }
    }
  }
  return true;
}

}  // namespace

Observables select_observables(const ControlConfig& cfg) {
  static const bool checked = observable_table_checked();
  (void)checked;
  cfg.validate();
  const auto kk = static_cast<std::size_t>(cfg.k);
  const auto& e = kObservableTable[cfg.beta[kk] - 1][cfg.s[kk]];
  return {SignedPauli{cfg.k, e.cos_axis, e.cos_sign}, SignedPauli{cfg.k, e.sin_axis, e.sin_sign}};
}

}  // namespace hamlearn
