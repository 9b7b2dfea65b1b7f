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

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "spinsq/detector.h"
#include "spinsq/distinguishability.h"
#include "spinsq/interferometer.h"
#include "spinsq/metrology.h"

namespace spinsq {

/// Global: one phase offset phi0 shared by all records, with the
/// interferometer phase at record i equal to label_i - phi0.
/// PerPoint: an independent phase per record. The model is symmetric under
/// phi -> pi - phi, so per-record phases are folded onto the branch that
/// agrees with a common offset, and phase_offset is their circular mean.
enum class FitMode { Global, PerPoint };

/// Parameters of the fringe model M * P_{m,I,s}(phi).
struct FringeParameters {
    double phase_offset = 0.0;
    double indistinguishability = 1.0;
    double scale = 1.0;
    double noise = 0.0;
};

struct FitOptions {
    FitMode mode = FitMode::Global;
    int phase_starts = 8;
    /// Holds s fixed instead of fitting it.
    std::optional<double> pinned_noise;
    /// Skips the multi-start and refines from this point only.
    std::optional<FringeParameters> warm_start;
    double tolerance = 1e-10;
    int max_evaluations = 10000;
};

struct FitResult {
    FitMode mode = FitMode::Global;
    FringeParameters parameters;
    /// Interferometer phase assigned to each record.
    std::vector<double> phases;
    /// M P_{m,I,s}(phi_i) - D'_m(phi_i).
    std::vector<std::vector<double>> residuals;
    double residual_sum_of_squares = 0.0;
    bool converged = false;
    int evaluations = 0;
    /// Objective at each multi-start initial point.
    std::vector<double> start_objectives;
    /// Sandwich standard errors for (phi0, I, M, s) under Poisson counting
    /// noise; NaN for pinned parameters and in per-point mode.
    std::array<double, 4> standard_errors{};
    /// Row-major 4x4 covariance proxy matching standard_errors.
    std::array<double, 16> covariance{};
};

/// Least-squares objective sum_i sum_m (M P_{m,I,s}(label_i - phi0) - D'_im)^2.
double fringe_objective(const MismatchModel &model, std::span<const double> labels,
                        const std::vector<std::vector<double>> &rescaled, const FringeParameters &parameters);

/// Fits the mismatch-plus-noise fringe model to rescaled coincidence counts.
/// Records must all carry N+1 counts for one odd N >= 3. Throws
/// std::invalid_argument for empty or malformed input and std::domain_error
/// for all-zero data; non-convergence is reported through `converged`.
FitResult fit_fringe(std::span<const CoincidenceRecord> records, const EfficiencyTable &table,
                     const FitOptions &options = {});

/// Wraps an angle into [-pi, pi).
double wrap_phase(double phi);

/// Per-iteration seed derived from a master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

/// Linear-interpolation quantile of unsorted samples, q in [0, 1].
double quantile(std::vector<double> samples, double q);

struct MonteCarloOptions {
    int iterations = 200;
    std::uint64_t seed = 0;
    PhaseGrid grid = PhaseGrid::default_grid();
    FitOptions fit;
    FisherOptions fisher;
    /// 0 picks std::thread::hardware_concurrency().
    unsigned threads = 0;
};

struct MonteCarloBand {
    PhaseGrid grid = PhaseGrid::default_grid();
    /// samples[j] holds F(phi_j) for every successful iteration, in
    /// iteration order.
    std::vector<std::vector<double>> samples;
    std::vector<double> q025;
    std::vector<double> q50;
    std::vector<double> q975;
    int iterations = 0;
    int failed = 0;
    std::uint64_t seed = 0;
};

/// Repeats {Poisson-resample raw counts, rescale, fit, Fisher curve of the
/// fitted P_{m,I,s}} and aggregates per-phase quantiles. Each refit starts
/// from `base` (the fit of the unperturbed data, computed when absent).
/// Iterations whose fit throws or fails to converge are counted in `failed`
/// and excluded.
MonteCarloBand monte_carlo_fisher(std::span<const CoincidenceRecord> records, const EfficiencyTable &table,
                                  const MonteCarloOptions &options, const std::optional<FitResult> &base = {});

struct PhaseEstimate {
    double phase = 0.0;
    double log_likelihood = 0.0;
    /// -d^2 log L / dphi^2 at the estimate.
    double observed_information = 0.0;
    /// The maximum sits on (or within 1e-6 of the width of) the interval edge.
    bool at_boundary = false;
    int evaluations = 0;
};

/// Maximum-likelihood phase from multinomial outcome counts: coarse scan,
/// golden-section refinement of the best bracket, then a Newton polish.
PhaseEstimate mle_phase(std::span<const double> counts, const DistributionFn &model, double lower, double upper);

/// Multinomial draw of `shots` outcomes from `probabilities`.
std::vector<double> sample_multinomial(std::span<const double> probabilities, long long shots,
                                       std::mt19937_64 &engine);

}  // namespace spinsq
