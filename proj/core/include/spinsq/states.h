// Copyright 2026 The spinsq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <vector>

#include "spinsq/fock.h"

namespace spinsq {

/// N photons each in (|H> + |V>)/sqrt(2). Measuring n_H gives Binomial(N, 1/2).
TwoModeState uncorrelated_state(int photons);

/// (|(N-1)/2, (N+1)/2> + |(N+1)/2, (N-1)/2>)/sqrt(2), N odd and >= 3.
TwoModeState yurke_state(int photons);

/// Twin-Fock state |N/2, N/2>, N even and >= 2.
TwoModeState holland_burnett_state(int photons);

/// Two-mode squeezed vacuum from type-I down-conversion, truncated to at most
/// `max_photons` (even) and renormalized over the kept even-N components.
class PdcState {
  public:
    double squeezing() const { return squeezing_; }
    int max_photons() const { return max_photons_; }
    /// Amplitude of the |N/2, N/2> component; zero for odd N or N > max.
    double amplitude(int photons) const;
    /// Probability that the source emits exactly `photons`.
    double weight(int photons) const;
    /// The normalized N-photon component, i.e. the Holland-Burnett state.
    TwoModeState postselect(int photons) const;

  private:
    friend PdcState pdc_state(double squeezing, int max_photons);
    PdcState(double squeezing, int max_photons, std::vector<double> amplitudes);

    double squeezing_;
    int max_photons_;
    std::vector<double> amplitudes_;  // indexed by N/2
};

/// Throws std::invalid_argument for r < 0 or an odd / negative cutoff.
PdcState pdc_state(double squeezing, int max_photons = 6);

/// Heralded output of a one-photon subtraction in the diagonal basis. The
/// D branch is a_D|psi>, the DPerp branch a_DPerp|psi>, each normalized, with
/// weights proportional to their squared norms and summing to one. A branch
/// with zero weight holds an empty zero vector.
struct SubtractionBranches {
    double d_weight = 0.0;
    FourModeState d_branch{0};
    double d_perp_weight = 0.0;
    FourModeState d_perp_branch{0};
};

/// Throws std::invalid_argument on vacuum input.
SubtractionBranches subtract_one_photon_diagonal(const FourModeState &state);

}  // namespace spinsq
