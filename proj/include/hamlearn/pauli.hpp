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

#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace hamlearn {

using Complex = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;

/// Largest system size handled by the dense representation (dim 64).
inline constexpr int kMaxQubits = 6;

/// Tensor product of single-qubit Paulis, one symbol per qubit:
/// 0 = identity, 1 = X, 2 = Y, 3 = Z. Qubit 0 is the leftmost factor and
/// the most significant bit of computational-basis indices.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::vector<std::uint8_t> entries);

  static PauliString identity(int n);
  /// Inverse of index(): base-4 digits with qubit 0 most significant.
  static PauliString from_index(int n, std::size_t index);
  /// Parses the text form over {I,X,Y,Z}, e.g. "XZ".
  static PauliString parse(std::string_view text);

  int size() const { return static_cast<int>(entries_.size()); }
  std::uint8_t operator[](int j) const { return entries_[static_cast<std::size_t>(j)]; }
  std::span<const std::uint8_t> entries() const { return entries_; }

  std::size_t index() const;
  std::string to_string() const;
  bool is_identity() const;

  friend bool operator==(const PauliString&, const PauliString&) = default;

 private:
  std::vector<std::uint8_t> entries_;
};

/// Number of non-identity strings on n qubits, 4^n - 1.
std::size_t num_coefficients(int n);

/// Flat position of a non-identity string inside a coefficient vector.
std::size_t coefficient_index(const PauliString& a);
PauliString pauli_from_coefficient_index(int n, std::size_t i);

/// s(a): per-qubit indicator of a non-identity entry.
std::vector<std::uint8_t> support(const PauliString& a);
int weight(const PauliString& a);

/// True iff at every position the entries agree or one of them is identity.
bool compatible(const PauliString& a, const PauliString& b);
bool commutes(const PauliString& a, const PauliString& b);

DenseOperator pauli_matrix(const PauliString& a);

/// sigma^a |psi> without forming the matrix.
StateVector apply_pauli(const PauliString& a, const StateVector& psi);
/// <psi| sigma^a |psi>, real for normalized psi.
double pauli_expectation(const PauliString& a, const StateVector& psi);

/// Single-qubit (-1)^sign_bit eigenstate of sigma^axis:
/// |0,1>=|+>, |1,1>=|->, |0,2>=|+i>, |1,2>=|-i>, |0,3>=|0>, |1,3>=|1>.
StateVector pauli_eigenstate(int sign_bit, int axis);

/// Kronecker product of single-qubit states, first factor most significant.
StateVector tensor_product(std::span<const StateVector> factors);

}  // namespace hamlearn
