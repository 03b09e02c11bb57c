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

// Independent reference computations used only by the tests. Nothing here
// calls into the library's operator construction or eigen routines.
#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Eigen::Matrix2cd sigma(int axis) {
  Eigen::Matrix2cd m;
  const cd i(0.0, 1.0);
  switch (axis) {
    case 0:
      m << 1, 0, 0, 1;
      break;
    case 1:
      m << 0, 1, 1, 0;
      break;
    case 2:
      m << 0, -i, i, 0;
      break;
    default:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

inline Mat kron(const Mat& a, const Mat& b) {
  Mat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

/// sigma^{a_0} x sigma^{a_1} x ... by repeated Kronecker products.
inline Mat pauli(const std::vector<int>& a) {
  Mat m = Mat::Identity(1, 1);
  for (int x : a) m = kron(m, sigma(x));
  return m;
}

inline std::vector<int> digits(int n, std::size_t index) {
  std::vector<int> a(static_cast<std::size_t>(n));
  for (int j = n - 1; j >= 0; --j) {
    a[static_cast<std::size_t>(j)] = static_cast<int>(index % 4);
    index /= 4;
  }
  return a;
}

/// sum_a mu_a sigma^a with mu indexed by (base-4 index - 1).
inline Mat hamiltonian(int n, const Eigen::VectorXd& mu) {
  const auto dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < mu.size(); ++i) h += mu(i) * pauli(digits(n, static_cast<std::size_t>(i + 1)));
  return h;
}

/// Control term on qubit j alone: sigma^{beta_j} placed at position j.
inline Mat single_site(int n, int j, int axis) {
  std::vector<int> a(static_cast<std::size_t>(n), 0);
  a[static_cast<std::size_t>(j)] = axis;
  return pauli(a);
}

inline Mat control(int n, int k, const std::vector<int>& s, const std::vector<int>& beta) {
  const auto dim = Eigen::Index{1} << n;
  Mat h = Mat::Zero(dim, dim);
  for (int j = 0; j < n; ++j) {
    const double sign = s[static_cast<std::size_t>(j)] ? -1.0 : 1.0;
    const double w = j == k ? 0.5 : 1.0;
    h += w * sign * single_site(n, j, beta[static_cast<std::size_t>(j)]);
  }
  return h;
}

struct Cfg {
  int k;
  std::vector<int> s;
  std::vector<int> beta;
};

/// Same ordering convention as the library, rebuilt from the definition:
/// k outer, then s as an integer, then beta as a base-3 integer (first
/// qubit most significant).
inline std::vector<Cfg> configs(int n) {
  std::vector<Cfg> out;
  int n3 = 1;
  for (int j = 0; j < n; ++j) n3 *= 3;
  for (int k = 0; k < n; ++k) {
    for (int s = 0; s < (1 << n); ++s) {
      for (int b = 0; b < n3; ++b) {
        Cfg c{k, std::vector<int>(static_cast<std::size_t>(n)), std::vector<int>(static_cast<std::size_t>(n))};
        int bb = b;
        for (int j = n - 1; j >= 0; --j) {
          c.s[static_cast<std::size_t>(j)] = (s >> (n - 1 - j)) & 1;
          c.beta[static_cast<std::size_t>(j)] = 1 + bb % 3;
          bb /= 3;
        }
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

inline Eigen::VectorXd spectrum(const Mat& h) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

inline double gap(int n, const Eigen::VectorXd& mu, const Cfg& c, double nu) {
  const auto e = spectrum(hamiltonian(n, mu) - nu * control(n, c.k, c.s, c.beta));
  return e(1) - e(0);
}

inline Eigen::VectorXd gaps(int n, const Eigen::VectorXd& mu, double nu) {
  const auto cs = configs(n);
  Eigen::VectorXd out(static_cast<Eigen::Index>(cs.size()));
  for (std::size_t i = 0; i < cs.size(); ++i) out(static_cast<Eigen::Index>(i)) = gap(n, mu, cs[i], nu);
  return out;
}

/// Central-difference Jacobian of the gap vector.
inline Eigen::MatrixXd fd_jacobian(int n, const Eigen::VectorXd& mu, double nu, double h = 1e-5) {
  const auto m0 = gaps(n, mu, nu).size();
  Eigen::MatrixXd j(m0, mu.size());
  for (Eigen::Index a = 0; a < mu.size(); ++a) {
    Eigen::VectorXd p = mu, m = mu;
    p(a) += h;
    m(a) -= h;
    j.col(a) = (gaps(n, p, nu) - gaps(n, m, nu)) / (2 * h);
  }
  return j;
}

/// Single-qubit field vector v with H_tot = v . sigma.
inline Eigen::Vector3d single_qubit_field(const Eigen::Vector3d& mu, int s, int beta, double nu) {
  Eigen::Vector3d v = mu;
  v(beta - 1) -= 0.5 * nu * (s ? -1.0 : 1.0);
  return v;
}

/// Gap of v . sigma is 2 |v|.
inline double single_qubit_gap(const Eigen::Vector3d& mu, int s, int beta, double nu) {
  return 2.0 * single_qubit_field(mu, s, beta, nu).norm();
}

/// Hessian of 2 |v| with respect to v.
inline Eigen::Matrix3d norm_hessian(const Eigen::Vector3d& v) {
  const double r = v.norm();
  return 2.0 * (Eigen::Matrix3d::Identity() / r - v * v.transpose() / (r * r * r));
}

/// exp(-i H t) by diagonalisation with Eigen's solver.
inline Mat evolve(const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(h);
  const cd i(0.0, 1.0);
  Eigen::VectorXcd ph(es.eigenvalues().size());
  for (Eigen::Index j = 0; j < ph.size(); ++j) ph(j) = std::exp(-i * es.eigenvalues()(j) * t);
  return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

/// Deterministic pseudo-random doubles in [lo, hi) for test inputs.
class Lcg {
 public:
  explicit Lcg(std::uint64_t seed) : x_(seed * 2862933555777941757ULL + 3037000493ULL) {}
  double next(double lo = 0.0, double hi = 1.0) {
    x_ = x_ * 6364136223846793005ULL + 1442695040888963407ULL;
    return lo + (hi - lo) * static_cast<double>(x_ >> 11) * 0x1.0p-53;
  }
  int integer(int bound) { return static_cast<int>(next() * bound); }

 private:
  std::uint64_t x_;
};

inline Eigen::VectorXd random_mu(Lcg& rng, int n, double scale = 1.0) {
  Eigen::VectorXd mu((Eigen::Index{1} << (2 * n)) - 1);
  for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = rng.next(-scale, scale);
  return mu;
}

}  // namespace oracle
