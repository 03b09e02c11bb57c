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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "hamlearn/rfe.hpp"
#include "oracles.hpp"

using namespace hamlearn;

namespace {

RfeConfig config(double phi, double eps) {
  RfeConfig c;
  c.phi_max = phi;
  c.epsilon = eps;
  return c;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const auto m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

TEST_CASE("exact oracle recovers theta = 0") {
  auto oracle = exact_oracle(0.0);
  const auto r = rfe_estimate(oracle, config(10.0, 1e-6));
  CHECK(std::abs(r.theta_hat) <= 1e-6);
}

TEST_CASE("exact oracle recovers the single-qubit gap") {
  const double theta = oracle::single_qubit_gap({0.1, 0.5, 0.3}, 0, 3, 3.0);
  CHECK(theta == doctest::Approx(2.60768).epsilon(1e-5));
  auto o = exact_oracle(theta);
  const auto r = rfe_estimate(o, config(10.0, 1e-8));
  CHECK(std::abs(r.theta_hat - theta) <= 1e-8);
  CHECK(r.rounds <= config(10.0, 1e-8).round_budget());
}

TEST_CASE("exact oracle succeeds across the whole prior interval") {
  for (int i = 0; i <= 200; ++i) {
    const double theta = 7.0 * i / 200.0;
    auto o = exact_oracle(theta);
    const auto r = rfe_estimate(o, config(7.0, 1e-7));
    CHECK(std::abs(r.theta_hat - theta) <= 1e-7);
  }
}

TEST_CASE("bounded quadrature errors below 1/sqrt(8) never mislead a decision") {
  const double margin = 1e-3;
  const double amp = 1.0 / std::sqrt(8.0) - margin;
  for (int trial = 0; trial < 300; ++trial) {
    const CounterStream noise(static_cast<std::uint64_t>(trial));
    const double theta = 9.0 * noise.uniform(1000000);
    FunctionOracle o([&](double t, Quadrature q, std::uint64_t i) {
      const double truth = q == Quadrature::Cosine ? std::cos(theta * t) : std::sin(theta * t);
      return truth + amp * (2.0 * noise.uniform(i) - 1.0);
    });
    auto cfg = config(10.0, 1e-6);
    cfg.votes = 1;
    const auto r = rfe_estimate(o, cfg);
    CHECK(std::abs(r.theta_hat - theta) <= 1e-6);
  }
}

TEST_CASE("occasional arbitrary outputs are absorbed by votes and medians") {
  // Each call is garbage with probability 0.1; otherwise truth plus noise of
  // magnitude below 1/sqrt(8). A vote is then right with probability >= 0.81;
  // Hoeffding with 40 rounds and delta = 0.05 asks for N_v >= 33.
  const double amp = 1.0 / std::sqrt(8.0) - 1e-3;
  const double delta = 0.05;
  int failures = 0;
  const int trials = 1000;
  for (int trial = 0; trial < trials; ++trial) {
    const CounterStream noise(1000u + static_cast<std::uint64_t>(trial));
    const double theta = 9.0 * noise.uniform(1u << 30);
    FunctionOracle o([&](double t, Quadrature q, std::uint64_t i) {
      const auto s = noise.derive(i);
      if (s.uniform(0) < 0.1) return 2.0 * s.uniform(1) - 1.0;
      const double truth = q == Quadrature::Cosine ? std::cos(theta * t) : std::sin(theta * t);
      return truth + amp * (2.0 * s.uniform(2) - 1.0);
    });
    auto cfg = config(10.0, 1e-6);
    cfg.votes = 33;
    const auto r = rfe_estimate(o, cfg);
    failures += std::abs(r.theta_hat - theta) > 1e-6 ? 1 : 0;
  }
  CHECK(static_cast<double>(failures) / trials <= delta);
}

TEST_CASE("time accounting equals the sum over calls") {
  const double theta = 1.234;
  FunctionOracle o(
      [&](double t, Quadrature q, std::uint64_t) { return q == Quadrature::Cosine ? std::cos(theta * t) : std::sin(theta * t); },
      96);
  std::vector<OracleCall> calls;
  o.set_trace(&calls);
  std::vector<RfeTraceRow> rows;
  auto cfg = config(5.0, 1e-5);
  cfg.medians = 3;
  const auto r = rfe_median_estimate(o, cfg);
  double sum = 0.0;
  for (const auto& c : calls) sum += c.t * 96;
  CHECK(r.time_used == doctest::Approx(sum).epsilon(1e-14));
  CHECK(o.total_time() == doctest::Approx(sum).epsilon(1e-14));
  CHECK(static_cast<std::size_t>(o.calls()) == calls.size());
  CHECK(o.experiments() == 96 * o.calls());

  auto o2 = exact_oracle(theta);
  const auto single = rfe_estimate(o2, config(5.0, 1e-5), &rows);
  CHECK(rows.size() * 2 == static_cast<std::size_t>(single.calls));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].b - rows[i].a <= rows[i - 1].b - rows[i - 1].a + 1e-15);
    CHECK(rows[i].a <= theta);
    CHECK(rows[i].b >= theta);
  }
}

TEST_CASE("halving epsilon adds at most two rounds and about doubles the time") {
  const double theta = 3.3;
  for (double eps : {1e-3, 1e-4, 1e-5, 1e-6}) {
    auto a = exact_oracle(theta);
    auto b = exact_oracle(theta);
    const auto ra = rfe_estimate(a, config(10.0, eps));
    const auto rb = rfe_estimate(b, config(10.0, eps / 2));
    CHECK(rb.rounds - ra.rounds <= 2);
    CHECK(rb.rounds - ra.rounds >= 1);
    CHECK(rb.time_used / ra.time_used <= 2.25 * (1.0 + 1e-4));
    CHECK(rb.time_used / ra.time_used >= 1.4);
  }
}

TEST_CASE("median-boosted error scales as 1/T with biased, shot-noisy quadratures") {
  std::vector<double> times, errors;
  for (double eps : {1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7}) {
    std::vector<double> errs, ts;
    for (int trial = 0; trial < 21; ++trial) {
      const CounterStream rng(static_cast<std::uint64_t>(trial) * 7919u + 1);
      const double theta = 0.5 + 8.0 * rng.uniform(1u << 31);
      FunctionOracle o(
          [&](double t, Quadrature q, std::uint64_t i) {
            const double truth = q == Quadrature::Cosine ? std::cos(theta * t) : std::sin(theta * t);
            const double p = std::clamp(0.5 * (1.0 + truth + 0.2), 0.0, 1.0);
            return quadrature_estimate(sample_fraction(p, 96, rng.derive(i)));
          },
          96);
      auto cfg = config(10.0, eps);
      cfg.medians = 7;
      const auto r = rfe_median_estimate(o, cfg);
      errs.push_back(std::abs(r.theta_hat - theta));
      ts.push_back(r.time_used);
    }
    std::nth_element(errs.begin(), errs.begin() + 10, errs.end());
    std::nth_element(ts.begin(), ts.begin() + 10, ts.end());
    errors.push_back(errs[10]);
    times.push_back(ts[10]);
  }
  const double s = slope(times, errors);
  CHECK(s >= -1.25);
  CHECK(s <= -0.75);
}

TEST_CASE("median_boost") {
  const std::vector<double> one{1.0};
  CHECK(median_boost(one) == 1.0);
  const std::vector<double> three{1.0, 2.0, 100.0};
  CHECK(median_boost(three) == 2.0);
  std::vector<double> eleven{5.0, 5.0 + 1e-7, 5.0 - 2e-7, 1e9, -3.0, 5.0 + 3e-7, 5.0, 42.0, 5.0 - 1e-7, 5.0 + 9e-8, 5.0};
  CHECK(std::abs(median_boost(eleven) - 5.0) <= 1e-6);
  const std::vector<double> even{1.0, 4.0, 2.0, 3.0};
  CHECK(median_boost(even) == 2.5);
  CHECK_THROWS_AS(median_boost(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("required_nu_and_shots") {
  const auto a = required_nu_and_shots(1.0);
  CHECK(a.nu_min == 96.0);
  CHECK(a.shots == 96);
  const auto b = required_nu_and_shots(0.1 + 0.5 + 0.3);
  CHECK(b.nu_min == doctest::Approx(86.4));
  CHECK(b.shots == 96);
  CHECK_THROWS(required_nu_and_shots(0.0));
}

TEST_CASE("gap_upper_bound dominates every gap") {
  oracle::Lcg rng(53);
  for (int n = 1; n <= 2; ++n) {
    for (int trial = 0; trial < 5; ++trial) {
      const CoefficientVector mu(n, oracle::random_mu(rng, n));
      const double nu = rng.next(0.5, 10.0);
      CHECK(gap_upper_bound(mu, nu) == doctest::Approx(2.0 * (mu.values().cwiseAbs().sum() + nu * (n - 0.5))));
      for (const auto& c : enumerate_configs(n, nu)) CHECK(exact_gap(mu, c).gap <= gap_upper_bound(mu, nu));
    }
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(config(0.0, 1e-3).validate(), std::invalid_argument);
  CHECK_THROWS_AS(config(1.0, 0.0).validate(), std::invalid_argument);
  auto c = config(1.0, 1e-3);
  c.shots_per_quadrature = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  CHECK(config(10.0, 1e-6).round_budget() ==
        static_cast<int>(std::ceil(std::log(10.0 / 2e-6) / std::log(1.5))) + 1);
  auto o = exact_oracle(1.0);
  CHECK_THROWS_AS(o.query(-1.0, Quadrature::Cosine), std::invalid_argument);
}
