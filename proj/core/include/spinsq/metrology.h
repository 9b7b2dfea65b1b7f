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
#include "spinsq/interferometer.h"

namespace spinsq {

struct FisherOptions {
    double step = 1e-4;           // finite-difference step h, radians
    double probability_floor = 1e-12;  // eps_p
    double derivative_floor = 1e-8;    // eps_d
};

struct FisherValue {
    double value = 0.0;
    /// Some p_m fell below the probability floor while its derivative did not
    /// vanish, so the estimate may be dominated by a near-singular term.
    bool ill_conditioned = false;
};

/// Classical Fisher information sum_m (dp_m/dphi)^2 / p_m of the outcome
/// distribution, with derivatives from a five-point central stencil.
///
/// An outcome with p_m below the probability floor and a vanishing derivative
/// sits at a zero of a smooth nonnegative function; its contribution is the
/// limit 2 p_m'' rather than 0/0. This is what makes F of the ideal Yurke
/// state at phi = 0 come out as Var(S3) instead of dropping the outcomes
/// that are empty exactly at the bias point.
FisherValue fisher_information(const DistributionFn &distribution, double phi, const FisherOptions &options = {});

struct FisherCurve {
    PhaseGrid grid;
    std::vector<double> values;
    std::vector<bool> ill_conditioned;
    double step = 0.0;
    double max_value = 0.0;
    double phase_at_max = 0.0;
};

struct Peak {
    double phase;
    double value;
};

/// Quadratic interpolation through the discrete maximum and its neighbours.
/// Ties (within 1e-9 relative) resolve to the grid point closest to phi = 0;
/// a non-concave triple or an edge maximum returns the grid point itself.
Peak locate_peak(const PhaseGrid &grid, const std::vector<double> &values);

FisherCurve fisher_curve(const DistributionFn &distribution, const PhaseGrid &grid,
                         const FisherOptions &options = {});

/// min over unit n orthogonal to <S> of Delta S_n / sqrt(N). Throws
/// std::domain_error when the mean spin vector vanishes.
double squeezing_parameter_xi_s(const TwoModeState &state);

/// Delta S1 / |<S2>| at phi = 0. Throws std::domain_error for a vanishing
/// fringe slope.
double squeezing_phase_error(const TwoModeState &state);

/// squeezing_phase_error * sqrt(N).
double squeezing_parameter_xi_r(const TwoModeState &state);

double shot_noise_limit(int photons);
double optimal_phase_error(double fisher);
/// F / N: the Fisher information relative to N uncorrelated photons.
double quantum_advantage(double fisher, int photons);
/// Ratio of two S1 variances, reference over squeezed.
double noise_suppression(double reference_variance, double squeezed_variance);

/// Squeezing figures read off a fringe model instead of a pure state, as done
/// for measured data where only the S1 statistics are available: the fringe
/// slope and S1 variance at the bias phase, the resulting phase error, and
/// the S1-direction squeezing ratio Delta S1 / sqrt(N).
struct FringeSqueezing {
    double phase = 0.0;
    double mean = 0.0;
    double slope = 0.0;
    double variance = 0.0;
    double phase_error = 0.0;
    double xi_s = 0.0;
    double xi_r = 0.0;
};

FringeSqueezing fringe_squeezing(const DistributionFn &distribution, int photons, double phi = 0.0,
                                 double step = 1e-4);

struct SensitivityReport {
    int photons = 0;
    double xi_s = 0.0;
    double xi_r = 0.0;
    double phase_error_squeezing = 0.0;
    double phase_error_snl = 0.0;
    double phase_error_optimal = 0.0;
    double fisher_max = 0.0;
    double phase_at_fisher_max = 0.0;
    double advantage = 0.0;
};

/// Pure-state squeezing parameters plus the Fisher summary of `curve`.
SensitivityReport sensitivity_report(const TwoModeState &state, const FisherCurve &curve);
/// Same, with squeezing figures taken from a fringe model.
SensitivityReport sensitivity_report(const FringeSqueezing &squeezing, int photons, const FisherCurve &curve);

}  // namespace spinsq
