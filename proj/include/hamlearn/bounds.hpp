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

#include <array>
#include <cstdint>
#include <vector>

#include "hamlearn/rng.hpp"

namespace hamlearn::bounds {

/// Parameters of the Z vs Z + eps X discrimination task.
struct BoundParams {
  double epsilon = 0.0;
  double nu = 0.0;        // field strength, in [0, 1)
  double T = 0.0;         // total evolution time
  double L = 0.0;         // number of Hamiltonian evolutions
  double q = 1.0;         // success probability, in (0, 1]
  double k_factor = 3.0;  // Markov truncation factor, > 2 / q

  void validate() const;
};

/// Which constants to use for the single-experiment TV bound. The derivation
/// concludes with 2 eps (2 nu + eps) T + eps (2 nu + eps + 1) L / (1 - nu);
/// the headline statement carries half of each coefficient.
enum class TvConstants : std::uint8_t { Derived, Stated };

/// || (1 + nu_z) Z + nu_y Y + (nu_x + eps) X ||.
double w_norm(double epsilon, double nu_x, double nu_y, double nu_z);

struct WDiffCheck {
  double lhs = 0.0;  // |w(eps) - w(0)|
  double rhs = 0.0;  // eps (2 nu + eps)
  bool ok = false;
};

/// nu_vec components (x, y, z); the bound uses nu = || nu_vec ||.
WDiffCheck w_diff_bound_check(double epsilon, const std::array<double, 3>& nu_vec);

/// 2 eps (2 nu + eps) t + (2 eps (2 nu + eps) + eps) min(t, 1 / (1 - nu)).
double unitary_diff_bound(double epsilon, double nu, double t);

/// Exact || exp(-it(Z + nu P + eps X)) - exp(-it(Z + nu P)) || for the unit
/// direction p = (p_x, p_y, p_z) of P.
double exact_unitary_distance(double epsilon, double nu, double t, const std::array<double, 3>& p);

struct UnitarySample {
  double epsilon = 0.0;
  double nu = 0.0;
  double t = 0.0;
  std::array<double, 3> direction{};
  double exact = 0.0;
  double bound = 0.0;
  bool ok = false;
};

/// Draws eps in [0, 0.2], nu in [0, 0.9], t in [0, 20] and P uniform on the
/// Bloch sphere; sample i depends only on (stream, i).
std::vector<UnitarySample> sample_unitary_bound(int samples, const CounterStream& stream);

/// Fraction of samples where the exact distance is within the bound
/// (1e-9 slack).
double verify_unitary_bound(int samples, const CounterStream& stream);

/// Unclipped single-experiment TV bound.
double tv_single_experiment_raw(const BoundParams& p, TvConstants constants = TvConstants::Derived);
/// Same, clipped to [0, 1].
double tv_single_experiment_bound(const BoundParams& p, TvConstants constants = TvConstants::Derived);

/// eps (4 nu + 3 eps) T + eps (2 nu + eps + 1) L / (1 - nu), clipped to [0, 1].
double tv_adaptive_raw(const BoundParams& p);
double tv_adaptive_bound(const BoundParams& p);

/// Smallest expected total evolution time T0 compatible with success
/// probability q, Markov factor k and expected evolution count L0 = p.L:
/// [2 (q - 2/k) - 1 - k eps (2 nu + eps + 1) L0 / (1 - nu)] / [k eps (4 nu + 3 eps)],
/// floored at 0.
double time_lower_bound(const BoundParams& p);

/// Exact TV distance between the Z-basis outcome distributions of |+>
/// evolved for time t under Z + nu P + eps X versus Z + nu P.
double exact_single_experiment_tv(double epsilon, double nu, double t, const std::array<double, 3>& p);

}  // namespace hamlearn::bounds
