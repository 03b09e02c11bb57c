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

#include "hamlearn/pauli.hpp"

#include <cmath>
#include <stdexcept>

namespace hamlearn {

namespace {

constexpr std::string_view kSymbols = "IXYZ";

void check_size(int n) {
  if (n < 1 || n > kMaxQubits) {
    throw std::invalid_argument("system size must be in [1, " + std::to_string(kMaxQubits) +
                                "], got " + std::to_string(n));
  }
}

// Bit position of qubit j inside a basis index.
inline unsigned bit_of(int n, int j) { return static_cast<unsigned>(n - 1 - j); }

}  // namespace

PauliString::PauliString(std::vector<std::uint8_t> entries) : entries_(std::move(entries)) {
  check_size(size());
  for (auto e : entries_) {
    if (e > 3) throw std::invalid_argument("Pauli symbol out of range");
  }
}

PauliString PauliString::identity(int n) {
  check_size(n);
  return PauliString(std::vector<std::uint8_t>(static_cast<std::size_t>(n), 0));
}

PauliString PauliString::from_index(int n, std::size_t index) {
  check_size(n);
  if (index >= (std::size_t{1} << (2 * n))) throw std::out_of_range("Pauli index out of range");
  std::vector<std::uint8_t> entries(static_cast<std::size_t>(n));
  for (int j = n - 1; j >= 0; --j) {
    entries[static_cast<std::size_t>(j)] = static_cast<std::uint8_t>(index & 3u);
    index >>= 2;
  }
  return PauliString(std::move(entries));
}

PauliString PauliString::parse(std::string_view text) {
  std::vector<std::uint8_t> entries;
  entries.reserve(text.size());
  for (char c : text) {
    auto pos = kSymbols.find(c);
    if (pos == std::string_view::npos) {
      throw std::invalid_argument("invalid Pauli symbol '" + std::string(1, c) + "'");
    }
    entries.push_back(static_cast<std::uint8_t>(pos));
  }
  return PauliString(std::move(entries));
}

std::size_t PauliString::index() const {
  std::size_t idx = 0;
  for (auto e : entries_) idx = (idx << 2) | e;
  return idx;
}

std::string PauliString::to_string() const {
  std::string out;
  out.reserve(entries_.size());
  for (auto e : entries_) out.push_back(kSymbols[e]);
  return out;
}

bool PauliString::is_identity() const {
  for (auto e : entries_) {
    if (e != 0) return false;
  }
  return true;
}

std::size_t num_coefficients(int n) {
  check_size(n);
  return (std::size_t{1} << (2 * n)) - 1;
}

std::size_t coefficient_index(const PauliString& a) {
  if (a.is_identity()) throw std::invalid_argument("identity string has no coefficient slot");
  return a.index() - 1;
}

PauliString pauli_from_coefficient_index(int n, std::size_t i) {
  return PauliString::from_index(n, i + 1);
}

std::vector<std::uint8_t> support(const PauliString& a) {
  std::vector<std::uint8_t> s(static_cast<std::size_t>(a.size()));
  for (int j = 0; j < a.size(); ++j) s[static_cast<std::size_t>(j)] = a[j] != 0 ? 1 : 0;
  return s;
}

int weight(const PauliString& a) {
  int w = 0;
  for (auto e : a.entries()) w += e != 0 ? 1 : 0;
  return w;
}

bool compatible(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Pauli strings differ in length");
  for (int j = 0; j < a.size(); ++j) {
    if (a[j] != b[j] && a[j] != 0 && b[j] != 0) return false;
  }
  return true;
}

bool commutes(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) throw std::invalid_argument("Pauli strings differ in length");
  int clashes = 0;
  for (int j = 0; j < a.size(); ++j) {
    if (a[j] != b[j] && a[j] != 0 && b[j] != 0) ++clashes;
  }
  return clashes % 2 == 0;
}

namespace {

// sigma^a |x> = phase * |x ^ flip>; returns (flip, phase) for column x.
struct PauliAction {
  std::size_t flip = 0;
  Complex phase{1.0, 0.0};
};

PauliAction act_on_basis(const PauliString& a, std::size_t x) {
  const int n = a.size();
  PauliAction r;
  for (int j = 0; j < n; ++j) {
    const unsigned bit = bit_of(n, j);
    const bool one = ((x >> bit) & 1u) != 0;
    switch (a[j]) {
      case 1:
        r.flip |= std::size_t{1} << bit;
        break;
      case 2:
        r.flip |= std::size_t{1} << bit;
        r.phase *= one ? Complex(0.0, -1.0) : Complex(0.0, 1.0);
        break;
      case 3:
        if (one) r.phase = -r.phase;
        break;
      default:
        break;
    }
  }
  return r;
}

}  // namespace

DenseOperator pauli_matrix(const PauliString& a) {
  const std::size_t dim = std::size_t{1} << a.size();
  DenseOperator m = DenseOperator::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t x = 0; x < dim; ++x) {
    const auto act = act_on_basis(a, x);
    m(static_cast<Eigen::Index>(x ^ act.flip), static_cast<Eigen::Index>(x)) = act.phase;
  }
  return m;
}

StateVector apply_pauli(const PauliString& a, const StateVector& psi) {
  const std::size_t dim = std::size_t{1} << a.size();
  if (static_cast<std::size_t>(psi.size()) != dim) {
    throw std::invalid_argument("state dimension does not match Pauli string");
  }
  StateVector out(psi.size());
  for (std::size_t x = 0; x < dim; ++x) {
    const auto act = act_on_basis(a, x);
    out(static_cast<Eigen::Index>(x ^ act.flip)) = act.phase * psi(static_cast<Eigen::Index>(x));
  }
  return out;
}

double pauli_expectation(const PauliString& a, const StateVector& psi) {
  return psi.dot(apply_pauli(a, psi)).real();
}

StateVector pauli_eigenstate(int sign_bit, int axis) {
  if (sign_bit != 0 && sign_bit != 1) throw std::invalid_argument("sign bit must be 0 or 1");
  const double r = 1.0 / std::sqrt(2.0);
  StateVector v(2);
  switch (axis) {
    case 1:
      v << r, (sign_bit == 0 ? r : -r);
      break;
    case 2:
      v << r, (sign_bit == 0 ? Complex(0.0, r) : Complex(0.0, -r));
      break;
    case 3:
      if (sign_bit == 0) {
        v << 1.0, 0.0;
      } else {
        v << 0.0, 1.0;
      }
      break;
    default:
      throw std::invalid_argument("eigenstate axis must be 1, 2 or 3");
  }
  return v;
}

StateVector tensor_product(std::span<const StateVector> factors) {
  StateVector out = StateVector::Ones(1);
  for (const auto& f : factors) {
    StateVector next(out.size() * f.size());
    for (Eigen::Index i = 0; i < out.size(); ++i) {
      next.segment(i * f.size(), f.size()) = out(i) * f;
    }
    out = std::move(next);
  }
  return out;
}

}  // namespace hamlearn
