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

#include "spinsq/states.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinsq {

namespace {

double binomial(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) {
        c = c * (n - k + j) / j;
    }
    return c;
}

}  // namespace

TwoModeState uncorrelated_state(int photons) {
    if (photons < 1) {
        throw std::invalid_argument("uncorrelated_state needs N >= 1, got " + std::to_string(photons));
    }
    TwoModeBasis basis(photons);
    ComplexVector amps(basis.dimension());
    const double scale = std::pow(2.0, -0.5 * photons);
    for (int k = 0; k <= photons; ++k) {
        amps(k) = std::sqrt(binomial(photons, k)) * scale;
    }
    return TwoModeState(basis, std::move(amps));
}

TwoModeState yurke_state(int photons) {
    if (photons < 3 || photons % 2 == 0) {
        throw std::invalid_argument("Yurke states need odd N >= 3, got " + std::to_string(photons));
    }
    TwoModeBasis basis(photons);
    ComplexVector amps = ComplexVector::Zero(basis.dimension());
    amps((photons - 1) / 2) = 1.0 / std::sqrt(2.0);
    amps((photons + 1) / 2) = 1.0 / std::sqrt(2.0);
    return TwoModeState(basis, std::move(amps));
}

TwoModeState holland_burnett_state(int photons) {
    if (photons < 2 || photons % 2 != 0) {
        throw std::invalid_argument("Holland-Burnett states need even N >= 2, got " + std::to_string(photons));
    }
    return TwoModeState::fock(photons / 2, photons / 2);
}

PdcState::PdcState(double squeezing, int max_photons, std::vector<double> amplitudes)
    : squeezing_(squeezing), max_photons_(max_photons), amplitudes_(std::move(amplitudes)) {}

double PdcState::amplitude(int photons) const {
    if (photons < 0 || photons % 2 != 0 || photons > max_photons_) {
        return 0.0;
    }
    return amplitudes_[photons / 2];
}

double PdcState::weight(int photons) const {
    double a = amplitude(photons);
    return a * a;
}

TwoModeState PdcState::postselect(int photons) const {
    if (photons < 0 || photons % 2 != 0 || photons > max_photons_) {
        throw std::invalid_argument("no " + std::to_string(photons) + "-photon component within the truncation");
    }
    return TwoModeState::fock(photons / 2, photons / 2);
}

PdcState pdc_state(double squeezing, int max_photons) {
    if (!(squeezing >= 0.0) || !std::isfinite(squeezing)) {
        throw std::invalid_argument("squeezing parameter must be finite and >= 0");
    }
    if (max_photons < 0 || max_photons % 2 != 0) {
        throw std::invalid_argument("PDC truncation must be even and >= 0, got " + std::to_string(max_photons));
    }
    // (1/cosh r) (tanh r)^{N/2} before truncation
    const double t = std::tanh(squeezing);
    std::vector<double> amps;
    double total = 0.0;
    for (int n = 0; n <= max_photons; n += 2) {
        double a = std::pow(t, n / 2) / std::cosh(squeezing);
        amps.push_back(a);
        total += a * a;
    }
    const double scale = 1.0 / std::sqrt(total);
    for (double &a : amps) {
        a *= scale;
    }
    return PdcState(squeezing, max_photons, std::move(amps));
}

SubtractionBranches subtract_one_photon_diagonal(const FourModeState &state) {
    if (state.photons() == 0 || state.is_zero()) {
        throw std::invalid_argument("photon subtraction needs a nonzero state with at least one photon");
    }
    FourModeState d = apply_annihilation(state, LoweringMode::D);
    FourModeState d_perp = apply_annihilation(state, LoweringMode::DPerp);
    const double nd = d.norm_squared();
    const double np = d_perp.norm_squared();
    const double total = nd + np;
    if (total == 0.0) {
        throw std::invalid_argument("photon subtraction annihilated the state");
    }
    SubtractionBranches out;
    out.d_weight = nd / total;
    out.d_perp_weight = np / total;
    out.d_branch = nd > 0.0 ? d.normalized() : FourModeState(d.photons());
    out.d_perp_branch = np > 0.0 ? d_perp.normalized() : FourModeState(d_perp.photons());
    return out;
}

}  // namespace spinsq
