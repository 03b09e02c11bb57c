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

#include "hamlearn/model.hpp"
#include "hamlearn/rng.hpp"

namespace hamlearn {

/// Classical bit flip of the measured outcome with probability eta.
struct NoiseModel {
  double eta = 0.0;
  void validate() const;
};

enum class Quadrature : std::uint8_t { Cosine = 0, Sine = 1 };

inline char quadrature_symbol(Quadrature q) { return q == Quadrature::Cosine ? 'c' : 's'; }

/// One sampled experiment setting, as dumped to the outcome CSV.
struct ExperimentOutcome {
  std::size_t config_index = 0;
  double t = 0.0;
  Quadrature quadrature = Quadrature::Cosine;
  int shots = 0;
  double fraction_of_zeros = 0.0;
};

/// Exact simulation of the phase-estimation experiment for one (mu, cfg):
/// prepare Phi_+, evolve under H_tot for time t, measure O_c or O_s on the
/// distinguished qubit. The eigensystem is computed once and reused for
/// every evolution time.
class PhaseEstimationExperiment {
 public:
  PhaseEstimationExperiment(const CoefficientVector& mu, const ControlConfig& cfg);

  /// <Phi_+| e^{iHt} O e^{-iHt} |Phi_+> for an arbitrary signed Pauli.
  double expectation(double t, const SignedPauli& observable) const;
  double expectation(double t, Quadrature q) const;

  /// Pr[b = 0] after the bit-flip channel.
  double prob_bit0(double t, Quadrature q, const NoiseModel& noise) const;

  /// Fraction of zeros among `shots` Bernoulli draws taken from `stream`.
  double sample(double t, Quadrature q, const NoiseModel& noise, int shots,
                const CounterStream& stream) const;

  const ControlConfig& config() const { return cfg_; }
  const EigenSystem& spectrum() const { return es_; }
  const GapInfo& gap() const { return gap_; }
  const Observables& observables() const { return obs_; }

 private:
  Eigen::VectorXcd evolved_amplitudes(double t) const;

  ControlConfig cfg_;
  EigenSystem es_;
  GapInfo gap_;
  Observables obs_;
  Eigen::VectorXcd initial_;  // Phi_+ in the eigenbasis
  Eigen::MatrixXcd cos_eig_;  // O_c in the eigenbasis
  Eigen::MatrixXcd sin_eig_;  // O_s in the eigenbasis
};

double evolved_expectation(const CoefficientVector& mu, const ControlConfig& cfg, double t,
                           const SignedPauli& observable);

double prob_bit0(const CoefficientVector& mu, const ControlConfig& cfg, double t, Quadrature q,
                 const NoiseModel& noise);

/// Applies the flip channel to an ideal probability of reading 0.
double apply_bit_flip(double p, const NoiseModel& noise);

/// Fraction of zeros among `shots` independent draws with Pr[0] = p.
double sample_fraction(double p, int shots, const CounterStream& stream);

double sample(const CoefficientVector& mu, const ControlConfig& cfg, double t, Quadrature q,
              const NoiseModel& noise, int shots, const CounterStream& stream);

/// 2 * fraction - 1.
double quadrature_estimate(double fraction);

}  // namespace hamlearn
