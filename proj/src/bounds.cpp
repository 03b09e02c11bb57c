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

#include "hamlearn/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include <Eigen/Dense>

namespace hamlearn::bounds {

void BoundParams::validate() const {
  if (!(epsilon >= 0.0)) throw std::invalid_argument("bounds: epsilon must be >= 0");
  if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("bounds: nu must lie in [0, 1)");
  if (!(T >= 0.0) || !(L >= 0.0)) throw std::invalid_argument("bounds: T and L must be >= 0");
  if (!(q > 0.0 && q <= 1.0)) throw std::invalid_argument("bounds: q must lie in (0, 1]");
  if (!(k_factor > 2.0 / q)) throw std::invalid_argument("bounds: k_factor must exceed 2 / q");
}

double w_norm(double epsilon, double nu_x, double nu_y, double nu_z) {
  return std::sqrt((1.0 + nu_z) * (1.0 + nu_z) + nu_y * nu_y + (nu_x + epsilon) * (nu_x + epsilon));
}

WDiffCheck w_diff_bound_check(double epsilon, const std::array<double, 3>& nu_vec) {
  const double nu = std::sqrt(nu_vec[0] * nu_vec[0] + nu_vec[1] * nu_vec[1] + nu_vec[2] * nu_vec[2]);
  WDiffCheck out;
  out.lhs = std::abs(w_norm(epsilon, nu_vec[0], nu_vec[1], nu_vec[2]) - w_norm(0.0, nu_vec[0], nu_vec[1], nu_vec[2]));
  out.rhs = epsilon * (2.0 * nu + epsilon);
  out.ok = out.lhs <= out.rhs + 1e-12;
  return out;
}

double unitary_diff_bound(double epsilon, double nu, double t) {
  if (!(nu >= 0.0 && nu < 1.0)) throw std::invalid_argument("bounds: nu must lie in [0, 1)");
  if (!(t >= 0.0)) throw std::invalid_argument("bounds: t must be >= 0");
  const double c = epsilon * (2.0 * nu + epsilon);
  return 2.0 * c * t + (2.0 * c + epsilon) * std::min(t, 1.0 / (1.0 - nu));
}

namespace {

using Mat2 = Eigen::Matrix2cd;
using cd = std::complex<double>;

// exp(-i t a.sigma) = cos(|a| t) I - i sin(|a| t) (a / |a|).sigma
Mat2 su2_evolution(const std::array<double, 3>& a, double t) {
  const double norm = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  Mat2 u = Mat2::Identity();
  if (norm == 0.0) return u;
  const double c = std::cos(norm * t);
  const double s = std::sin(norm * t);
  const double x = a[0] / norm, y = a[1] / norm, z = a[2] / norm;
  const cd i(0.0, 1.0);
  u(0, 0) = c - i * s * z;
  u(1, 1) = c + i * s * z;
  u(0, 1) = -i * s * cd(x, -y);
  u(1, 0) = -i * s * cd(x, y);
  return u;
}

std::array<double, 3> field(double epsilon, double nu, const std::array<double, 3>& p) {
  return {nu * p[0] + epsilon, nu * p[1], 1.0 + nu * p[2]};
}

}  // namespace

double exact_unitary_distance(double epsilon, double nu, double t, const std::array<double, 3>& p) {
  const Mat2 d = su2_evolution(field(epsilon, nu, p), t) - su2_evolution(field(0.0, nu, p), t);
  Eigen::JacobiSVD<Mat2> svd(d);
  return svd.singularValues()(0);
}

std::vector<UnitarySample> sample_unitary_bound(int samples, const CounterStream& stream) {
  std::vector<UnitarySample> out;
  out.reserve(static_cast<std::size_t>(std::max(samples, 0)));
  for (int i = 0; i < samples; ++i) {
    const auto s = stream.derive(static_cast<std::uint64_t>(i));
    UnitarySample row;
    row.epsilon = 0.2 * s.uniform(0);
    row.nu = 0.9 * s.uniform(1);
    row.t = 20.0 * s.uniform(2);
    // Uniform on the sphere: z uniform in [-1, 1], azimuth uniform.
    const double z = 2.0 * s.uniform(3) - 1.0;
    const double phi = 2.0 * std::numbers::pi * s.uniform(4);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    row.direction = {r * std::cos(phi), r * std::sin(phi), z};
    row.exact = exact_unitary_distance(row.epsilon, row.nu, row.t, row.direction);
    row.bound = unitary_diff_bound(row.epsilon, row.nu, row.t);
    row.ok = row.exact <= row.bound + 1e-9;
    out.push_back(row);
  }
  return out;
}

double verify_unitary_bound(int samples, const CounterStream& stream) {
  if (samples < 1) throw std::invalid_argument("bounds: need at least one sample");
  const auto rows = sample_unitary_bound(samples, stream);
  const auto ok = std::count_if(rows.begin(), rows.end(), [](const UnitarySample& r) { return r.ok; });
  return static_cast<double>(ok) / samples;
}

double tv_single_experiment_raw(const BoundParams& p, TvConstants constants) {
  p.validate();
  const double time_coeff = p.epsilon * (2.0 * p.nu + p.epsilon);
  const double count_coeff = p.epsilon * (2.0 * p.nu + p.epsilon + 1.0) / (1.0 - p.nu);
  if (constants == TvConstants::Stated) return time_coeff * p.T + 0.5 * count_coeff * p.L;
  return 2.0 * time_coeff * p.T + count_coeff * p.L;
}

double tv_single_experiment_bound(const BoundParams& p, TvConstants constants) {
  return std::clamp(tv_single_experiment_raw(p, constants), 0.0, 1.0);
}

double tv_adaptive_raw(const BoundParams& p) {
  p.validate();
  return p.epsilon * (4.0 * p.nu + 3.0 * p.epsilon) * p.T +
         p.epsilon * (2.0 * p.nu + p.epsilon + 1.0) / (1.0 - p.nu) * p.L;
}

double tv_adaptive_bound(const BoundParams& p) { return std::clamp(tv_adaptive_raw(p), 0.0, 1.0); }

double time_lower_bound(const BoundParams& p) {
  p.validate();
  if (p.epsilon == 0.0) throw std::invalid_argument("bounds: time lower bound needs epsilon > 0");
  const double k = p.k_factor;
  const double numerator =
      2.0 * (p.q - 2.0 / k) - 1.0 - k * p.epsilon * (2.0 * p.nu + p.epsilon + 1.0) * p.L / (1.0 - p.nu);
  if (numerator <= 0.0) return 0.0;
  return numerator / (k * p.epsilon * (4.0 * p.nu + 3.0 * p.epsilon));
}

double exact_single_experiment_tv(double epsilon, double nu, double t, const std::array<double, 3>& p) {
  Eigen::Vector2cd plus;
  plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  const Eigen::Vector2cd a = su2_evolution(field(epsilon, nu, p), t) * plus;
  const Eigen::Vector2cd b = su2_evolution(field(0.0, nu, p), t) * plus;
  // Two outcomes: TV equals the difference in Pr[0].
  return std::abs(std::norm(a(0)) - std::norm(b(0)));
}

}  // namespace hamlearn::bounds
