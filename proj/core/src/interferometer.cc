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

#include "spinsq/interferometer.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinsq {

PhaseGrid::PhaseGrid(std::vector<double> phases) : phases_(std::move(phases)) {
    if (phases_.empty()) {
        throw std::invalid_argument("phase grid is empty");
    }
    for (std::size_t i = 0; i < phases_.size(); ++i) {
        if (!std::isfinite(phases_[i])) {
            throw std::invalid_argument("phase grid has a non-finite value at index " + std::to_string(i));
        }
        if (i > 0 && !(phases_[i] > phases_[i - 1])) {
            throw std::invalid_argument("phase grid is not strictly increasing at index " + std::to_string(i));
        }
    }
}

PhaseGrid PhaseGrid::uniform(double start, double stop, double step) {
    if (!(step > 0.0) || !std::isfinite(step)) {
        throw std::invalid_argument("phase step must be positive");
    }
    if (!(stop > start)) {
        throw std::invalid_argument("phase grid stop must exceed start");
    }
    std::vector<double> phases;
    for (long i = 0;; ++i) {
        double phi = start + static_cast<double>(i) * step;
        if (phi > stop - 1e-9 * step) {
            break;
        }
        phases.push_back(phi);
    }
    return PhaseGrid(std::move(phases));
}

PhaseGrid PhaseGrid::linspace(double start, double stop, int count) {
    if (count < 2) {
        return PhaseGrid({start});
    }
    std::vector<double> phases(count);
    for (int i = 0; i < count; ++i) {
        phases[i] = start + (stop - start) * i / (count - 1);
    }
    return PhaseGrid(std::move(phases));
}

PhaseGrid PhaseGrid::default_grid() {
    return uniform(-std::numbers::pi, std::numbers::pi, kDefaultPhaseStep);
}

PhaseGrid PhaseMap::apply(const PhaseGrid &grid) const {
    if (!(scale > 0.0)) {
        throw std::invalid_argument("phase scale must be positive");
    }
    std::vector<double> out;
    out.reserve(grid.size());
    for (double x : grid.phases()) {
        out.push_back((*this)(x));
    }
    return PhaseGrid(std::move(out));
}

FringeTable::FringeTable(int photons, PhaseGrid grid, std::vector<std::vector<double>> rows)
    : photons_(photons), grid_(std::move(grid)), rows_(std::move(rows)) {
    if (rows_.size() != grid_.size()) {
        throw std::invalid_argument("fringe table has " + std::to_string(rows_.size()) + " rows for " +
                                    std::to_string(grid_.size()) + " phases");
    }
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        auto &row = rows_[i];
        if (static_cast<int>(row.size()) != photons_ + 1) {
            throw std::invalid_argument("fringe row " + std::to_string(i) + " has wrong length");
        }
        double sum = 0.0;
        for (double &p : row) {
            if (!(p >= -1e-14) || p > 1.0 + 1e-10) {
                throw std::invalid_argument("fringe row " + std::to_string(i) + " has an entry outside [0, 1]");
            }
            if (p < 0.0) {
                p = 0.0;
            }
            sum += p;
        }
        if (std::abs(sum - 1.0) > 1e-10) {
            throw std::invalid_argument("fringe row " + std::to_string(i) + " sums to " + std::to_string(sum));
        }
    }
}

FringeTable tabulate(const DistributionFn &distribution, int photons, const PhaseGrid &grid) {
    std::vector<std::vector<double>> rows;
    rows.reserve(grid.size());
    for (double phi : grid.phases()) {
        rows.push_back(distribution(phi));
    }
    return FringeTable(photons, grid, std::move(rows));
}

Eigen::MatrixXd rotation_matrix(int photons, double phi) {
    if (!std::isfinite(phi)) {
        throw std::invalid_argument("phase must be finite");
    }
    if (photons < 0) {
        throw std::invalid_argument("photon number must be nonnegative");
    }
    const int n = photons;
    const double c = std::cos(0.5 * phi);
    const double s = std::sin(0.5 * phi);

    std::vector<double> fact(n + 1, 1.0);
    for (int j = 1; j <= n; ++j) {
        fact[j] = fact[j - 1] * j;
    }
    auto choose = [&](int a, int b) { return fact[a] / (fact[b] * fact[a - b]); };
    std::vector<double> cpow(n + 1, 1.0), spow(n + 1, 1.0);
    for (int j = 1; j <= n; ++j) {
        cpow[j] = cpow[j - 1] * c;
        spow[j] = spow[j - 1] * s;
    }

    // (c a+_H + s a+_V)^k (-s a+_H + c a+_V)^{N-k} |0> / sqrt(k! (N-k)!):
    // pick i H-creators from the first factor and j from the second.
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(n + 1, n + 1);
    for (int k = 0; k <= n; ++k) {
        const int rest = n - k;
        const double norm_in = std::sqrt(fact[k] * fact[rest]);
        for (int i = 0; i <= k; ++i) {
            const double first = choose(k, i) * cpow[i] * spow[k - i];
            for (int j = 0; j <= rest; ++j) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                const double second = choose(rest, j) * sign * spow[j] * cpow[rest - j];
                const int l = i + j;
                u(l, k) += first * second * std::sqrt(fact[l] * fact[n - l]) / norm_in;
            }
        }
    }
    return u;
}

ComplexMatrix phase_unitary(int photons, double phi) {
    return rotation_matrix(photons, phi).cast<Complex>();
}

TwoModeState evolve(const TwoModeState &state, double phi) {
    return TwoModeState(state.basis(), rotation_matrix(state.photons(), phi).cast<Complex>() * state.amplitudes());
}

std::vector<double> outcome_distribution(const TwoModeState &state, double phi) {
    return evolve(state, phi).probabilities();
}

std::vector<double> fringe_mean(const TwoModeState &state, const PhaseGrid &grid) {
    StokesOperators ops = build_stokes(state.photons());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double phi : grid.phases()) {
        out.push_back(expectation(evolve(state, phi), ops.s1));
    }
    return out;
}

double s1_mean(const std::vector<double> &distribution) {
    const int n = static_cast<int>(distribution.size()) - 1;
    double mean = 0.0;
    for (int m = 0; m <= n; ++m) {
        mean += (2.0 * m - n) * distribution[m];
    }
    return mean;
}

double s1_variance(const std::vector<double> &distribution) {
    const int n = static_cast<int>(distribution.size()) - 1;
    const double mean = s1_mean(distribution);
    double var = 0.0;
    for (int m = 0; m <= n; ++m) {
        const double d = (2.0 * m - n) - mean;
        var += d * d * distribution[m];
    }
    return var;
}

}  // namespace spinsq
