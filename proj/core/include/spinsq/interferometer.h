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

#include <functional>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "spinsq/fock.h"

namespace spinsq {

/// Maps phase to the outcome distribution p_m(phi), m = 0..N counting H photons.
using DistributionFn = std::function<std::vector<double>(double)>;

/// Strictly increasing, finite phase values in radians.
class PhaseGrid {
  public:
    explicit PhaseGrid(std::vector<double> phases);

    /// start, start + step, ... up to but excluding `stop`.
    static PhaseGrid uniform(double start, double stop, double step);
    /// `count` points spanning [start, stop] inclusive.
    static PhaseGrid linspace(double start, double stop, int count);
    /// One period [-pi, pi) with step pi/15.
    static PhaseGrid default_grid();

    const std::vector<double> &phases() const { return phases_; }
    std::size_t size() const { return phases_.size(); }
    double operator[](std::size_t i) const { return phases_[i]; }

  private:
    std::vector<double> phases_;
};

inline constexpr double kDefaultPhaseStep = std::numbers::pi / 15.0;

/// Linear map from a lab coordinate (e.g. a waveplate angle) to phase:
/// phi = scale * x + offset. A half-wave plate rotated by theta gives scale 2.
struct PhaseMap {
    double scale = 1.0;
    double offset = 0.0;

    double operator()(double x) const { return scale * x + offset; }
    PhaseGrid apply(const PhaseGrid &grid) const;
};

/// Row-stochastic table P[i][m] of outcome probabilities on a phase grid.
class FringeTable {
  public:
    /// Validates every row: length N+1, sum 1 within 1e-10, entries >= -1e-14
    /// (small negative rounding is clamped to zero).
    FringeTable(int photons, PhaseGrid grid, std::vector<std::vector<double>> rows);

    int photons() const { return photons_; }
    const PhaseGrid &grid() const { return grid_; }
    const std::vector<std::vector<double>> &rows() const { return rows_; }
    const std::vector<double> &row(std::size_t i) const { return rows_[i]; }

  private:
    int photons_;
    PhaseGrid grid_;
    std::vector<std::vector<double>> rows_;
};

FringeTable tabulate(const DistributionFn &distribution, int photons, const PhaseGrid &grid);

/// Real matrix of U(phi) = exp(-i S3 phi/2) on the N-photon basis, built from
/// the mode transform
///   a+_H -> cos(phi/2) a+_H + sin(phi/2) a+_V,
///   a+_V -> -sin(phi/2) a+_H + cos(phi/2) a+_V.
/// Column k is U|k, N-k>.
Eigen::MatrixXd rotation_matrix(int photons, double phi);

/// rotation_matrix as a complex unitary.
ComplexMatrix phase_unitary(int photons, double phi);

TwoModeState evolve(const TwoModeState &state, double phi);

/// p_m = |<m, N-m| U(phi) |psi>|^2.
std::vector<double> outcome_distribution(const TwoModeState &state, double phi);

/// <S1>(phi_i) of the evolved state at each grid point.
std::vector<double> fringe_mean(const TwoModeState &state, const PhaseGrid &grid);

/// <S1> and Var(S1) of an outcome distribution, with S1 = 2m - N.
double s1_mean(const std::vector<double> &distribution);
double s1_variance(const std::vector<double> &distribution);

}  // namespace spinsq
