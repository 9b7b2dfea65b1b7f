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

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace spinsq {

FisherValue fisher_information(const DistributionFn &distribution, double phi, const FisherOptions &options) {
    const double h = options.step;
    if (!(h > 0.0)) {
        throw std::invalid_argument("finite-difference step must be positive");
    }
    const auto p0 = distribution(phi);
    const auto p1 = distribution(phi + h);
    const auto m1 = distribution(phi - h);
    const auto p2 = distribution(phi + 2.0 * h);
    const auto m2 = distribution(phi - 2.0 * h);
    const std::size_t n = p0.size();
    if (p1.size() != n || m1.size() != n || p2.size() != n || m2.size() != n) {
        throw std::invalid_argument("distribution changes length with phase");
    }

    FisherValue out;
    for (std::size_t m = 0; m < n; ++m) {
        const double d1 = (m2[m] - 8.0 * m1[m] + 8.0 * p1[m] - p2[m]) / (12.0 * h);
        const double p = p0[m];
        if (p >= options.probability_floor) {
            out.value += d1 * d1 / p;
        } else if (std::abs(d1) < options.derivative_floor) {
            const double d2 = (-m2[m] + 16.0 * m1[m] - 30.0 * p + 16.0 * p1[m] - p2[m]) / (12.0 * h * h);
            if (d2 > 0.0) {
                out.value += 2.0 * d2;
            }
        } else {
            out.ill_conditioned = true;
            if (p > 0.0) {
                out.value += d1 * d1 / p;
            }
        }
    }
    return out;
}

Peak locate_peak(const PhaseGrid &grid, const std::vector<double> &values) {
    if (values.size() != grid.size() || values.empty()) {
        throw std::invalid_argument("locate_peak: values do not match the grid");
    }
    double best = values[0];
    for (double v : values) {
        best = std::max(best, v);
    }
    const double tie = 1e-9 * std::max(1.0, std::abs(best));
    std::size_t arg = 0;
    bool found = false;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= best - tie && (!found || std::abs(grid[i]) < std::abs(grid[arg]))) {
            arg = i;
            found = true;
        }
    }
    if (arg == 0 || arg + 1 == values.size()) {
        return {grid[arg], values[arg]};
    }
    const double x0 = grid[arg - 1], x1 = grid[arg], x2 = grid[arg + 1];
    const double y0 = values[arg - 1], y1 = values[arg], y2 = values[arg + 1];
    // Lagrange parabola through the three points.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (!(curvature < -1e-12 * std::max(1.0, std::abs(y1)))) {
        return {x1, y1};
    }
    const double b = d01 - curvature * (x0 + x1);
    double xv = -b / (2.0 * curvature);
    xv = std::clamp(xv, x0, x2);
    const double yv = y0 + d01 * (xv - x0) + curvature * (xv - x0) * (xv - x1);
    return {xv, std::max(yv, y1)};
}

FisherCurve fisher_curve(const DistributionFn &distribution, const PhaseGrid &grid, const FisherOptions &options) {
    FisherCurve curve{grid, {}, {}, options.step, 0.0, 0.0};
    curve.values.reserve(grid.size());
    for (double phi : grid.phases()) {
        const FisherValue f = fisher_information(distribution, phi, options);
        curve.values.push_back(f.value);
        curve.ill_conditioned.push_back(f.ill_conditioned);
    }
    const Peak peak = locate_peak(grid, curve.values);
    curve.max_value = peak.value;
    curve.phase_at_max = peak.phase;
    return curve;
}

double squeezing_parameter_xi_s(const TwoModeState &state) {
    const StokesOperators ops = build_stokes(state.photons());
    Eigen::Vector3d mean;
    Eigen::Matrix3d cov;
    const ComplexVector &psi = state.amplitudes();
    ComplexVector applied[3];
    for (int i = 0; i < 3; ++i) {
        applied[i] = ops[i + 1] * psi;
        mean(i) = expectation(state, ops[i + 1]);
    }
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            // symmetrized second moment Re <S_i S_j>
            cov(i, j) = applied[i].dot(applied[j]).real() - mean(i) * mean(j);
        }
    }
    const double length = mean.norm();
    if (length < 1e-10) {
        throw std::domain_error("xi_S is undefined for a vanishing mean spin vector");
    }
    const Eigen::Vector3d axis = mean / length;
    Eigen::Index least;
    axis.cwiseAbs().minCoeff(&least);
    Eigen::Vector3d helper = Eigen::Vector3d::Zero();
    helper(least) = 1.0;
    const Eigen::Vector3d e1 = axis.cross(helper).normalized();
    const Eigen::Vector3d e2 = axis.cross(e1);
    Eigen::Matrix<double, 3, 2> basis;
    basis << e1, e2;
    const Eigen::Matrix2d projected = basis.transpose() * cov * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(projected, Eigen::EigenvaluesOnly);
    const double lowest = std::max(0.0, solver.eigenvalues()(0));
    return std::sqrt(lowest) / std::sqrt(static_cast<double>(state.photons()));
}

double squeezing_phase_error(const TwoModeState &state) {
    const StokesOperators ops = build_stokes(state.photons());
    const double slope = std::abs(expectation(state, ops.s2));
    if (slope < 1e-12) {
        throw std::domain_error("fringe slope <S2> vanishes; phase error is unbounded");
    }
    return std::sqrt(variance(state, ops.s1)) / slope;
}

double squeezing_parameter_xi_r(const TwoModeState &state) {
    return squeezing_phase_error(state) * std::sqrt(static_cast<double>(state.photons()));
}

double shot_noise_limit(int photons) {
    if (photons < 1) {
        throw std::invalid_argument("shot-noise limit needs N >= 1");
    }
    return 1.0 / std::sqrt(static_cast<double>(photons));
}

double optimal_phase_error(double fisher) {
    if (!(fisher >= 0.0)) {
        throw std::invalid_argument("Fisher information must be nonnegative");
    }
    return fisher == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(fisher);
}

double quantum_advantage(double fisher, int photons) {
    if (photons < 1) {
        throw std::invalid_argument("quantum advantage needs N >= 1");
    }
    return fisher / photons;
}

double noise_suppression(double reference_variance, double squeezed_variance) {
    if (!(squeezed_variance > 0.0)) {
        throw std::invalid_argument("squeezed variance must be positive");
    }
    return reference_variance / squeezed_variance;
}

FringeSqueezing fringe_squeezing(const DistributionFn &distribution, int photons, double phi, double step) {
    if (photons < 1) {
        throw std::invalid_argument("fringe_squeezing needs N >= 1");
    }
    const auto p0 = distribution(phi);
    const double up = s1_mean(distribution(phi + step));
    const double down = s1_mean(distribution(phi - step));
    const double up2 = s1_mean(distribution(phi + 2.0 * step));
    const double down2 = s1_mean(distribution(phi - 2.0 * step));
    FringeSqueezing out;
    out.phase = phi;
    out.mean = s1_mean(p0);
    out.slope = (down2 - 8.0 * down + 8.0 * up - up2) / (12.0 * step);
    out.variance = s1_variance(p0);
    if (std::abs(out.slope) < 1e-12) {
        throw std::domain_error("fringe slope vanishes at the bias phase");
    }
    out.phase_error = std::sqrt(out.variance) / std::abs(out.slope);
    out.xi_s = std::sqrt(out.variance / photons);
    out.xi_r = out.phase_error * std::sqrt(static_cast<double>(photons));
    return out;
}

namespace {

void fill_fisher(SensitivityReport &report, const FisherCurve &curve) {
    report.phase_error_snl = shot_noise_limit(report.photons);
    report.fisher_max = curve.max_value;
    report.phase_at_fisher_max = curve.phase_at_max;
    report.phase_error_optimal = optimal_phase_error(curve.max_value);
    report.advantage = quantum_advantage(curve.max_value, report.photons);
}

}  // namespace

SensitivityReport sensitivity_report(const TwoModeState &state, const FisherCurve &curve) {
    SensitivityReport report;
    report.photons = state.photons();
    report.xi_s = squeezing_parameter_xi_s(state);
    report.phase_error_squeezing = squeezing_phase_error(state);
    report.xi_r = report.phase_error_squeezing * std::sqrt(static_cast<double>(report.photons));
    fill_fisher(report, curve);
    return report;
}

SensitivityReport sensitivity_report(const FringeSqueezing &squeezing, int photons, const FisherCurve &curve) {
    SensitivityReport report;
    report.photons = photons;
    report.xi_s = squeezing.xi_s;
    report.xi_r = squeezing.xi_r;
    report.phase_error_squeezing = squeezing.phase_error;
    fill_fisher(report, curve);
    return report;
}

}  // namespace spinsq
