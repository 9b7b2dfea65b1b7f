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

#include "spinsq/metrology.h"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "spinsq/distinguishability.h"
#include "spinsq/interferometer.h"
#include "spinsq/states.h"

using namespace spinsq;

namespace {

constexpr double kPi = std::numbers::pi;

DistributionFn ideal(const TwoModeState &state) {
    return [state](double phi) { return outcome_distribution(state, phi); };
}

}  // namespace

TEST(metrology, single_photon_closed_form) {
    const DistributionFn closed = [](double phi) {
        return std::vector<double>{0.5 * (1.0 - std::sin(phi)), 0.5 * (1.0 + std::sin(phi))};
    };
    const auto from_state = ideal(uncorrelated_state(1));
    for (double phi : PhaseGrid::linspace(-3.0, 3.0, 41).phases()) {
        EXPECT_NEAR(fisher_information(closed, phi).value, 1.0, 1e-4) << phi;
        EXPECT_NEAR(fisher_information(from_state, phi).value, 1.0, 1e-4) << phi;
    }
}

TEST(metrology, yurke_fisher) {
    const auto f = ideal(yurke_state(5));
    EXPECT_NEAR(fisher_information(f, 0.0).value, 17.0, 1e-4);
    EXPECT_FALSE(fisher_information(f, 0.0).ill_conditioned);
    const auto y3 = ideal(yurke_state(3));
    EXPECT_NEAR(fisher_information(y3, 0.0).value, 7.0, 1e-4);
    for (double phi : {0.1, 0.5, 1.3, 2.2, 3.0}) {
        EXPECT_NEAR(fisher_information(f, phi).value, fisher_information(f, -phi).value, 1e-8);
    }
    const auto curve = fisher_curve(f, PhaseGrid::default_grid());
    EXPECT_NEAR(curve.max_value, 17.0, 1e-4);
    EXPECT_NEAR(curve.phase_at_max, 0.0, 1e-12);
    EXPECT_DOUBLE_EQ(curve.step, 1e-4);
}

TEST(metrology, uncorrelated_fisher) {
    const auto f = ideal(uncorrelated_state(5));
    for (double phi : PhaseGrid::default_grid().phases()) {
        if (std::abs(std::abs(phi) - kPi / 2) < 1e-9) {
            continue;
        }
        EXPECT_NEAR(fisher_information(f, phi).value, 5.0, 1e-4) << phi;
    }
}

TEST(metrology, fully_noisy_is_blind) {
    MismatchModel model(5);
    const DistributionFn f = [&](double phi) { return model.distribution(0.9, 1.0, phi); };
    for (double phi : PhaseGrid::default_grid().phases()) {
        EXPECT_NEAR(fisher_information(f, phi).value, 0.0, 1e-12);
    }
}

TEST(metrology, ill_conditioned_flag) {
    const DistributionFn f = [](double phi) {
        const double a = 5e-13 + 1e-6 * std::sin(phi);
        return std::vector<double>{a, 1.0 - a};
    };
    EXPECT_TRUE(fisher_information(f, 0.0).ill_conditioned);
    EXPECT_THROW(fisher_information(f, 0.0, FisherOptions{0.0, 1e-12, 1e-8}), std::invalid_argument);
}

TEST(metrology, richardson) {
    MismatchModel model(5);
    const DistributionFn f = [&](double phi) { return model.distribution(0.9, 0.05, phi); };
    FisherOptions half;
    half.step = 0.5e-4;
    for (double phi : PhaseGrid::default_grid().phases()) {
        const double a = fisher_information(f, phi).value;
        const double b = fisher_information(f, phi, half).value;
        EXPECT_LT(std::abs(a - b) / a, 1e-4) << phi;
    }
}

TEST(metrology, noise_monotone) {
    MismatchModel model(5);
    for (double phi : {-1.0, -0.2, 0.0, 0.21, 0.8, 2.0}) {
        double previous = std::numeric_limits<double>::infinity();
        for (int k = 0; k <= 10; ++k) {
            const double s = 0.1 * k;
            const DistributionFn f = [&](double x) { return model.distribution(0.9, s, x); };
            const double v = fisher_information(f, phi).value;
            EXPECT_LE(v, previous + 1e-9) << "phi=" << phi << " s=" << s;
            previous = v;
        }
    }
}

TEST(metrology, squeezing_parameters) {
    const auto y = yurke_state(5);
    EXPECT_NEAR(squeezing_parameter_xi_s(y), 1.0 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(squeezing_phase_error(y), 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(squeezing_parameter_xi_r(y), 2.0 * std::sqrt(5.0) / 6.0, 1e-12);
    EXPECT_NEAR(squeezing_phase_error(yurke_state(3)), 0.5, 1e-12);
    for (int n = 1; n <= 7; ++n) {
        const auto u = uncorrelated_state(n);
        EXPECT_NEAR(squeezing_parameter_xi_s(u), 1.0, 1e-12);
        EXPECT_NEAR(squeezing_parameter_xi_r(u), 1.0, 1e-12);
    }
    EXPECT_NEAR(squeezing_phase_error(uncorrelated_state(5)), 1.0 / std::sqrt(5.0), 1e-12);
    const int big = 101;
    EXPECT_NEAR(squeezing_parameter_xi_r(yurke_state(big)), 2.0 * std::sqrt(big) / (big + 1), 1e-10);
    EXPECT_NEAR(squeezing_parameter_xi_r(yurke_state(big)) * std::sqrt(big) / 2.0, 1.0, 0.02);
    // Literal definition of xi_R.
    for (int n : {3, 5, 7, 9}) {
        const auto s = yurke_state(n);
        EXPECT_NEAR(squeezing_parameter_xi_r(s), squeezing_phase_error(s) * std::sqrt(n), 1e-12);
    }
}

TEST(metrology, xi_s_minimizes_over_orthogonal_plane) {
    // Scan directions n = cos(t) e1 + sin(t) e3 orthogonal to <S> = (0, 3, 0).
    const auto y = yurke_state(5);
    const auto s = build_stokes(5);
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3600; ++k) {
        const double t = kPi * k / 3600.0;
        const ComplexMatrix sn = std::cos(t) * s.s1 + std::sin(t) * s.s3;
        best = std::min(best, std::sqrt(variance(y, sn)));
    }
    EXPECT_NEAR(squeezing_parameter_xi_s(y) * std::sqrt(5.0), best, 1e-6);
}

TEST(metrology, twin_fock_has_no_mean_spin) {
    EXPECT_THROW(squeezing_parameter_xi_s(holland_burnett_state(6)), std::domain_error);
    EXPECT_THROW(squeezing_phase_error(holland_burnett_state(6)), std::domain_error);
}

TEST(metrology, fringe_squeezing) {
    const auto fs = fringe_squeezing(ideal(yurke_state(5)), 5);
    EXPECT_NEAR(fs.mean, 0.0, 1e-12);
    EXPECT_NEAR(fs.variance, 1.0, 1e-12);
    EXPECT_NEAR(fs.slope, -3.0, 1e-8);
    EXPECT_NEAR(fs.phase_error, 1.0 / 3.0, 1e-8);
    EXPECT_NEAR(fs.xi_s, 1.0 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(fs.xi_r, 2.0 * std::sqrt(5.0) / 6.0, 1e-8);
    EXPECT_THROW(fringe_squeezing(ideal(holland_burnett_state(6)), 6), std::domain_error);
}

TEST(metrology, figure_of_merit_formulas) {
    EXPECT_NEAR(shot_noise_limit(5), 1.0 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(optimal_phase_error(17.0), 1.0 / std::sqrt(17.0), 1e-15);
    EXPECT_TRUE(std::isinf(optimal_phase_error(0.0)));
    EXPECT_NEAR(quantum_advantage(7.89, 5), 1.578, 1e-12);
    EXPECT_NEAR(noise_suppression(5.14, 2.01), 2.557213930348259, 1e-12);
    EXPECT_NEAR(std::sqrt(2.01) / 2.37, 0.598, 1e-3);
    EXPECT_THROW(shot_noise_limit(0), std::invalid_argument);
    EXPECT_THROW(optimal_phase_error(-1.0), std::invalid_argument);
    EXPECT_THROW(noise_suppression(1.0, 0.0), std::invalid_argument);
}

TEST(metrology, report) {
    const auto y = yurke_state(5);
    const auto curve = fisher_curve(ideal(y), PhaseGrid::default_grid());
    const auto r = sensitivity_report(y, curve);
    EXPECT_EQ(r.photons, 5);
    EXPECT_NEAR(r.xi_s, 1.0 / std::sqrt(5.0), 1e-12);
    EXPECT_NEAR(r.xi_r, 2.0 * std::sqrt(5.0) / 6.0, 1e-12);
    EXPECT_NEAR(r.phase_error_squeezing, 1.0 / 3.0, 1e-12);
    EXPECT_NEAR(r.phase_error_snl, 1.0 / std::sqrt(5.0), 1e-15);
    EXPECT_NEAR(r.phase_error_optimal, 1.0 / std::sqrt(17.0), 1e-5);
    EXPECT_NEAR(r.fisher_max, 17.0, 1e-4);
    EXPECT_NEAR(r.advantage, 17.0 / 5.0, 1e-4);
}

TEST(metrology, peak_interpolation) {
    // Parabola with vertex between grid points.
    const auto grid = PhaseGrid::linspace(-1.0, 1.0, 21);
    std::vector<double> v;
    for (double x : grid.phases()) {
        v.push_back(7.0 - 3.0 * (x - 0.21) * (x - 0.21));
    }
    const auto peak = locate_peak(grid, v);
    EXPECT_NEAR(peak.phase, 0.21, 1e-12);
    EXPECT_NEAR(peak.value, 7.0, 1e-12);
    // Edge maxima return the grid point.
    const auto edge = locate_peak(PhaseGrid({0.0, 1.0, 2.0}), {1.0, 2.0, 3.0});
    EXPECT_DOUBLE_EQ(edge.phase, 2.0);
    EXPECT_THROW(locate_peak(grid, {1.0}), std::invalid_argument);
}
