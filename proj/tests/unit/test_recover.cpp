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

#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "hamlearn/recover.hpp"
#include "oracles.hpp"

using namespace hamlearn;

namespace {

const CoefficientVector kLambda1(1, {0.1, 0.5, 0.3});
const CoefficientVector kGuess1(1, {0.09, 0.51, 0.29});
const CoefficientVector kLambda2(2, {0.1, 0.2, 0.3, 0.5, 0.6, 0.3, 0.2, 0.1, 0.1, 0.2, 0.1, 0.1, 0.3, 0.22, 0.15});
const CoefficientVector kGuess2(2, {0.11, 0.21, 0.32, 0.51, 0.63, 0.31, 0.22, 0.11, 0.11, 0.22, 0.11, 0.11, 0.33, 0.22,
                                    0.15});

double fd_loss(const GapVector& e_hat, int n, Eigen::VectorXd mu, double nu, Eigen::Index a, double h) {
  mu(a) += h;
  const double up = 0.5 * (e_hat.values - oracle::gaps(n, mu, nu)).squaredNorm();
  mu(a) -= 2 * h;
  const double down = 0.5 * (e_hat.values - oracle::gaps(n, mu, nu)).squaredNorm();
  return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("gap_vector") {
  const auto g0 = gap_vector(CoefficientVector(1), 3.0);
  CHECK(g0.size() == 6);
  for (Eigen::Index i = 0; i < 6; ++i) CHECK(g0.values(i) == doctest::Approx(3.0));
  const auto g1 = gap_vector(kLambda1, 3.0);
  // Config 2 is (k=0, s=0, beta=Z).
  CHECK(g1.values(2) == doctest::Approx(2.60768).epsilon(1e-5));
  for (int i = 0; i < 6; ++i) {
    const int s = i / 3, beta = 1 + i % 3;
    CHECK(g1.values(i) == doctest::Approx(oracle::single_qubit_gap(kLambda1.values(), s, beta, 3.0)).epsilon(1e-13));
  }
  const auto g2 = gap_vector(kLambda2, 5.0);
  CHECK(g2.size() == 72);
  CHECK((g2.values - oracle::gaps(2, kLambda2.values(), 5.0)).cwiseAbs().maxCoeff() < 1e-11);
  CHECK((g2.values.array() >= 0.0).all());
}

TEST_CASE("jacobian matches central differences") {
  oracle::Lcg rng(61);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::VectorXd mu = oracle::random_mu(rng, 2, 0.5);
    const auto j = jacobian(CoefficientVector(2, mu), 10.0);
    const auto fd = oracle::fd_jacobian(2, mu, 10.0, 1e-5);
    CHECK((j - fd).cwiseAbs().maxCoeff() <= 1e-6);
  }
  const auto j1 = jacobian(kLambda1, 3.0);
  const auto fd1 = oracle::fd_jacobian(1, kLambda1.values(), 3.0, 1e-5);
  CHECK((j1 - fd1).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("jacobian limit for strong fields") {
  const auto j = jacobian(kLambda1, 1e3);
  // Row 2 is (s=0, beta=Z); column 2 is Z.
  CHECK(j(2, 2) == doctest::Approx(-kJacobianScale).epsilon(2e-3));
  // Off-axis entries are 2 v_a / |v| = O(1/nu).
  const Eigen::Vector3d v = oracle::single_qubit_field(kLambda1.values(), 0, 3, 1e3);
  for (int a = 0; a < 3; ++a) CHECK(j(2, a) == doctest::Approx(2.0 * v(a) / v.norm()).epsilon(1e-10));
  CHECK(std::abs(j(2, 0)) < 5e-3);
  CHECK(std::abs(j(2, 1)) < 5e-3);
  const auto fd = oracle::fd_jacobian(1, kLambda1.values(), 1e3, 1e-5);
  CHECK(fd(2, 2) == doctest::Approx(-2.0).epsilon(2e-3));

  // Incompatible strings vanish as 1/nu.
  const auto j2a = jacobian(kLambda2, 1e2);
  const auto j2b = jacobian(kLambda2, 1e3);
  const auto cs = enumerate_configs(2, 1.0);
  double worst_a = 0.0, worst_b = 0.0;
  for (std::size_t r = 0; r < cs.size(); ++r) {
    std::vector<std::uint8_t> beta(cs[r].beta.begin(), cs[r].beta.end());
    for (std::size_t col = 0; col < 15; ++col) {
      if (compatible(pauli_from_coefficient_index(2, col), PauliString(beta))) continue;
      worst_a = std::max(worst_a, std::abs(j2a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))));
      worst_b = std::max(worst_b, std::abs(j2b(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col))));
    }
  }
  CHECK(worst_b < 0.2 * worst_a);
  CHECK(worst_b < 0.05);
}

TEST_CASE("jacobian rejects degenerate spectra") {
  // v = mu - nu/2 e_z vanishes for (s=0, beta=Z) at nu = 1.
  CHECK_THROWS_AS(jacobian(CoefficientVector(1, {0.0, 0.0, 0.5}), 1.0), std::domain_error);
  const auto mask = nondegenerate_rows(CoefficientVector(1, {0.0, 0.0, 0.5}), 1.0);
  CHECK(mask[2] == 0);
  CHECK(mask[0] == 1);
}

TEST_CASE("j_zero") {
  const auto j1 = j_zero(1, 1.0);
  CHECK(j1 == Eigen::Vector3d(2, 2, 2));
  const auto j2 = j_zero(2, 1.0);
  for (std::size_t i = 0; i < 15; ++i) {
    const int w = weight(pauli_from_coefficient_index(2, i));
    CHECK(j2(static_cast<Eigen::Index>(i)) == (w == 1 ? 12.0 : 8.0));
  }
  CHECK(j_zero(2)(0) == 4.0 * 12.0);

  // The convention constant agrees with the finite-difference Jacobian.
  oracle::Lcg rng(67);
  const Eigen::VectorXd mu = oracle::random_mu(rng, 2, 0.5);
  const auto fd = oracle::fd_jacobian(2, mu, 1e3, 1e-5);
  const Eigen::MatrixXd jtj = fd.transpose() * fd;
  const Eigen::MatrixXd diff = jtj - Eigen::MatrixXd(j_zero(2).asDiagonal());
  CHECK(diff.norm() / j_zero(2).maxCoeff() <= 0.1);
  CHECK((jacobian(CoefficientVector(2, mu), 1e3).transpose() * jacobian(CoefficientVector(2, mu), 1e3) -
         Eigen::MatrixXd(j_zero(2).asDiagonal()))
            .norm() <= 0.1 * j_zero(2).maxCoeff());
}

TEST_CASE("J^T J approaches J0 as 1/nu") {
  oracle::Lcg rng(71);
  const CoefficientVector mu(2, oracle::random_mu(rng, 2, 0.5));
  const Eigen::MatrixXd j0 = j_zero(2).asDiagonal();
  std::vector<double> norms;
  for (double nu : {20.0, 40.0, 80.0}) {
    const auto j = jacobian(mu, nu);
    norms.push_back((j.transpose() * j - j0).norm());
  }
  for (std::size_t i = 1; i < norms.size(); ++i) {
    CHECK(norms[i] / norms[i - 1] >= 0.3);
    CHECK(norms[i] / norms[i - 1] <= 0.7);
  }
}

TEST_CASE("loss") {
  const auto e = gap_vector(kLambda2, 5.0);
  CHECK(loss(e, kLambda2, 5.0) == 0.0);
  auto bumped = e;
  bumped.values(17) += 1.0;
  CHECK(loss(bumped, kLambda2, 5.0) == doctest::Approx(0.5).epsilon(1e-12));

  oracle::Lcg rng(73);
  const Eigen::VectorXd mu = oracle::random_mu(rng, 2, 0.5);
  GapVector target = e;
  for (Eigen::Index i = 0; i < target.values.size(); ++i) target.values(i) += rng.next(-0.1, 0.1);
  const Eigen::VectorXd r = target.values - oracle::gaps(2, mu, 5.0);
  double direct = 0.0;
  for (Eigen::Index i = 0; i < r.size(); ++i) direct += r(i) * r(i);
  CHECK(loss(target, CoefficientVector(2, mu), 5.0) == doctest::Approx(0.5 * direct).epsilon(1e-12));

  RowMask mask(72, 1);
  mask[17] = 0;
  CHECK(loss(bumped, kLambda2, 5.0, mask) == 0.0);
  CHECK_THROWS(loss(gap_vector(kLambda1, 5.0), kLambda2, 5.0));
}

TEST_CASE("loss_gradient") {
  const auto e = gap_vector(kLambda2, 5.0);
  CHECK(loss_gradient(e, kLambda2, 5.0).cwiseAbs().maxCoeff() < 1e-13);

  oracle::Lcg rng(79);
  const Eigen::VectorXd mu = kLambda2.values() + 0.05 * oracle::random_mu(rng, 2);
  const auto g = loss_gradient(e, CoefficientVector(2, mu), 5.0);
  for (Eigen::Index a = 0; a < 15; ++a) CHECK(std::abs(g(a) - fd_loss(e, 2, mu, 5.0, a, 1e-5)) <= 1e-6);

  // Linear response around the minimiser.
  const auto j = jacobian(kLambda2, 5.0);
  const Eigen::MatrixXd jtj = j.transpose() * j;
  for (Eigen::Index a : {0, 6, 14}) {
    Eigen::VectorXd shifted = kLambda2.values();
    shifted(a) += 1e-6;
    const auto ga = loss_gradient(e, CoefficientVector(2, shifted), 5.0);
    CHECK((ga - 1e-6 * jtj.col(a)).norm() <= 1e-3 * 1e-6 * jtj.col(a).norm());
  }
}

TEST_CASE("second derivatives match the analytic norm Hessian for one qubit") {
  for (const auto& c0 : enumerate_configs(1, 1.0)) {
    auto c = c0;
    c.nu = 3.0;
    const Eigen::Vector3d v = oracle::single_qubit_field(kLambda1.values(), c.s[0], c.beta[0], 3.0);
    const Eigen::Matrix3d expect = oracle::norm_hessian(v);
    const auto h = gap_hessian(kLambda1, c);
    CHECK((h - expect).cwiseAbs().maxCoeff() < 1e-10);
    const auto xy = second_derivative_gap(kLambda1, c, PauliString::parse("X"), PauliString::parse("Y"));
    CHECK(xy == doctest::Approx(expect(0, 1)).epsilon(1e-10));
  }
}

TEST_CASE("second derivatives match finite differences of the Jacobian at n=2") {
  oracle::Lcg rng(83);
  const Eigen::VectorXd mu = oracle::random_mu(rng, 2, 0.4);
  const auto cs = enumerate_configs(2, 6.0);
  for (std::size_t r : {0u, 17u, 40u, 71u}) {
    const auto h = gap_hessian(CoefficientVector(2, mu), cs[r]);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() < 1e-12);
    for (Eigen::Index b = 0; b < 15; b += 4) {
      Eigen::VectorXd up = mu, down = mu;
      up(b) += 1e-3;
      down(b) -= 1e-3;
      const Eigen::VectorXd col = (jacobian(CoefficientVector(2, up), 6.0).row(static_cast<Eigen::Index>(r)) -
                                   jacobian(CoefficientVector(2, down), 6.0).row(static_cast<Eigen::Index>(r)))
                                      .transpose() /
                                  2e-3;
      CHECK((h.col(b) - col).cwiseAbs().maxCoeff() <= 1e-5);
    }
  }
}

TEST_CASE("second derivatives decay as 1/nu") {
  const auto cs = enumerate_configs(2, 1.0);
  auto c = cs[5];
  c.nu = 200.0;
  const double a = gap_hessian(kLambda2, c).norm();
  c.nu = 400.0;
  const double b = gap_hessian(kLambda2, c).norm();
  CHECK(b / a == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("hessian_loss") {
  const auto e = gap_vector(kLambda2, 5.0);
  const auto rep = hessian_loss(e, kLambda2, 5.0);
  const auto j = jacobian(kLambda2, 5.0);
  CHECK((rep.matrix - j.transpose() * j).cwiseAbs().maxCoeff() < 1e-12);

  // Finite differences of the loss gradient at a point with nonzero residual.
  oracle::Lcg rng(89);
  const Eigen::VectorXd mu = kLambda2.values() + 0.05 * oracle::random_mu(rng, 2);
  const auto h = hessian_loss(e, CoefficientVector(2, mu), 5.0).matrix;
  for (Eigen::Index b = 0; b < 15; b += 3) {
    Eigen::VectorXd up = mu, down = mu;
    up(b) += 1e-3;
    down(b) -= 1e-3;
    const Eigen::VectorXd col =
        (loss_gradient(e, CoefficientVector(2, up), 5.0) - loss_gradient(e, CoefficientVector(2, down), 5.0)) / 2e-3;
    CHECK((h.col(b) - col).cwiseAbs().maxCoeff() <= 1e-4);
  }

  for (double nu : {20.0, 50.0, 100.0}) {
    const auto near = hessian_loss(gap_vector(kLambda2, nu), CoefficientVector(2, mu), nu);
    CHECK(near.min_eigenvalue >= kJacobianScale * kJacobianScale * 2.0);
  }
}

TEST_CASE("fixed point from the truth") {
  const auto e = gap_vector(kLambda1, 3.0);
  const auto r = solve_fixed_point(e, kLambda1, 3.0);
  CHECK(r.converged);
  CHECK(r.iterations <= 1);
}

TEST_CASE("fixed point recovers the single-qubit instance") {
  const auto e = gap_vector(kLambda1, 3.0);
  const auto r = solve_fixed_point(e, kGuess1, 3.0);
  CHECK(r.converged);
  CHECK((r.lambda_hat.values() - kLambda1.values()).norm() <= 1e-9);
  // Geometric contraction of successive steps inside the basin.
  for (std::size_t i = 1; i + 1 < r.step_norms.size(); ++i) {
    if (r.step_norms[i - 1] < 1e-12) break;
    CHECK(r.step_norms[i] / r.step_norms[i - 1] <= 0.9);
  }
  const double bound = std::ceil(std::log2((kGuess1.values() - r.lambda_hat.values()).norm() / 1e-10)) + 10;
  CHECK(r.iterations <= bound);
  const auto j = to_json(r);
  CHECK(j.at("converged") == true);
}

TEST_CASE("fixed point and Gauss-Newton agree on the two-qubit instance") {
  const auto e = gap_vector(kLambda2, 5.0);
  const auto fp = solve_fixed_point(e, kGuess2, 5.0);
  const auto gn = solve_gauss_newton(e, kGuess2, 5.0);
  CHECK(fp.converged);
  CHECK(gn.converged);
  CHECK((fp.lambda_hat.values() - gn.lambda_hat.values()).norm() <= 1e-8);
  CHECK((gn.lambda_hat.values() - kLambda2.values()).norm() <= 1e-8);
}

TEST_CASE("Gauss-Newton from far initial guesses") {
  const auto e = gap_vector(kLambda2, 5.0);
  oracle::Lcg rng(97);
  int converged = 0;
  for (double offset : {0.1, 0.3, 0.5, 1.0}) {
    Eigen::VectorXd dir = oracle::random_mu(rng, 2);
    dir.normalize();
    const CoefficientVector guess(2, Eigen::VectorXd(kLambda2.values() + offset * dir));
    const auto gn = solve_gauss_newton(e, guess, 5.0);
    if (gn.converged && (gn.lambda_hat.values() - kLambda2.values()).norm() < 1e-8) ++converged;
  }
  CHECK(converged >= 3);
}

TEST_CASE("recovery error is proportional to the gap perturbation") {
  const auto probes = probe_stability(kLambda2, 5.0, {1e-4, 1e-3, 1e-2}, 4, CounterStream(5));
  CHECK(probes.size() == 12);
  double lo = 1e300, hi = 0.0;
  for (const auto& p : probes) {
    lo = std::min(lo, p.ratio);
    hi = std::max(hi, p.ratio);
  }
  CHECK(hi < 1.0);
  CHECK(hi / lo < 10.0);
}
