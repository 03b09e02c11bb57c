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

#include "hamlearn/simkernel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamlearn {

void NoiseModel::validate() const {
  if (!(eta >= 0.0 && eta < 0.5)) throw std::invalid_argument("bit-flip rate must lie in [0, 0.5)");
}

PhaseEstimationExperiment::PhaseEstimationExperiment(const CoefficientVector& mu, const ControlConfig& cfg)
    : cfg_(cfg), es_(eigensystem(build_total(mu, cfg))), gap_(gap_info(es_, cfg.nu)),
      obs_(select_observables(cfg)) {
  const int n = cfg.num_qubits();
  const auto states = product_states(cfg);
  const auto& v = es_.states;
  initial_ = v.adjoint() * states.phi_plus;
  cos_eig_ = v.adjoint() * obs_.cosine.matrix(n) * v;
  sin_eig_ = v.adjoint() * obs_.sine.matrix(n) * v;
}

Eigen::VectorXcd PhaseEstimationExperiment::evolved_amplitudes(double t) const {
  if (!(t >= 0.0)) throw std::invalid_argument("evolution time must be non-negative");
  Eigen::VectorXcd a(initial_.size());
  const double e0 = es_.energies(0);
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    // Energies shifted by E0; the global phase cancels in expectation values.
    const double phase = -(es_.energies(j) - e0) * t;
    a(j) = initial_(j) * Complex(std::cos(phase), std::sin(phase));
  }
  return a;
}

double PhaseEstimationExperiment::expectation(double t, const SignedPauli& observable) const {
  const int n = cfg_.num_qubits();
  const auto a = evolved_amplitudes(t);
  const Eigen::VectorXcd psi = es_.states * a;
  return observable.sign * pauli_expectation(observable.string(n), psi);
}

double PhaseEstimationExperiment::expectation(double t, Quadrature q) const {
  const auto a = evolved_amplitudes(t);
  const auto& o = q == Quadrature::Cosine ? cos_eig_ : sin_eig_;
  const Complex value = a.dot(o * a);
  if (std::abs(value.imag()) > 1e-10) throw std::logic_error("expectation value of a Hermitian observable is complex");
  return value.real();
}

double PhaseEstimationExperiment::prob_bit0(double t, Quadrature q, const NoiseModel& noise) const {
  return apply_bit_flip(0.5 * (1.0 + expectation(t, q)), noise);
}

double PhaseEstimationExperiment::sample(double t, Quadrature q, const NoiseModel& noise, int shots,
                                         const CounterStream& stream) const {
  return sample_fraction(prob_bit0(t, q, noise), shots, stream);
}

double evolved_expectation(const CoefficientVector& mu, const ControlConfig& cfg, double t,
                           const SignedPauli& observable) {
  return PhaseEstimationExperiment(mu, cfg).expectation(t, observable);
}

double prob_bit0(const CoefficientVector& mu, const ControlConfig& cfg, double t, Quadrature q,
                 const NoiseModel& noise) {
  return PhaseEstimationExperiment(mu, cfg).prob_bit0(t, q, noise);
}

double apply_bit_flip(double p, const NoiseModel& noise) {
  noise.validate();
  p = std::clamp(p, 0.0, 1.0);
  return (1.0 - noise.eta) * p + noise.eta * (1.0 - p);
}

double sample_fraction(double p, int shots, const CounterStream& stream) {
  if (shots < 1) throw std::invalid_argument("shots must be at least 1");
  std::int64_t zeros = 0;
  for (int i = 0; i < shots; ++i) {
    if (stream.uniform(static_cast<std::uint64_t>(i)) < p) ++zeros;
  }
  return static_cast<double>(zeros) / shots;
}

double sample(const CoefficientVector& mu, const ControlConfig& cfg, double t, Quadrature q,
              const NoiseModel& noise, int shots, const CounterStream& stream) {
  return PhaseEstimationExperiment(mu, cfg).sample(t, q, noise, shots, stream);
}

double quadrature_estimate(double fraction) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("fraction must lie in [0, 1]");
  return 2.0 * fraction - 1.0;
}

}  // namespace hamlearn
