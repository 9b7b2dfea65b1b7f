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

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

namespace spinsq {

inline constexpr int kDetectorsPerArm = 7;
inline constexpr int kCoincidenceOrder = 5;

/// Single-photon detection probabilities of the 1x7 multiplexed detectors in
/// each output arm. Loss along the path is folded in.
class EfficiencyTable {
  public:
    using Arm = std::array<double, kDetectorsPerArm>;

    EfficiencyTable(const Arm &arm_a, const Arm &arm_b);

    /// The measured values 1.40% ... 1.58% of the five-photon experiment.
    static EfficiencyTable measured();
    static EfficiencyTable uniform(double probability);

    const Arm &arm_a() const { return arm_a_; }
    const Arm &arm_b() const { return arm_b_; }

  private:
    Arm arm_a_;
    Arm arm_b_;
};

/// e_0..e_max_order of `values` by the usual one-pass recurrence. Generic so
/// it can run on exact rationals as well as doubles.
template <class T>
std::vector<T> elementary_symmetric(std::span<const T> values, int max_order) {
    std::vector<T> e(max_order + 1, T(0));
    e[0] = T(1);
    int seen = 0;
    for (const T &x : values) {
        ++seen;
        for (int j = std::min(seen, max_order); j >= 1; --j) {
            e[j] += x * e[j - 1];
        }
    }
    return e;
}

/// Sigma_m: probability that m photons in arm a and N - m in arm b light m and
/// N - m distinct detectors, m! (N-m)! e_m(sigma_a) e_{N-m}(sigma_b).
template <class T>
T coincidence_efficiency(std::span<const T> arm_a, std::span<const T> arm_b, int m, int photons) {
    if (m < 0 || m > photons) {
        throw std::out_of_range("coincidence pattern m outside 0..N");
    }
    const auto ea = elementary_symmetric<T>(arm_a, photons);
    const auto eb = elementary_symmetric<T>(arm_b, photons);
    T fa(1), fb(1);
    for (int j = 2; j <= m; ++j) {
        fa *= T(j);
    }
    for (int j = 2; j <= photons - m; ++j) {
        fb *= T(j);
    }
    return fa * ea[m] * fb * eb[photons - m];
}

double coincidence_efficiency(const EfficiencyTable &table, int m, int photons = kCoincidenceOrder);
std::vector<double> coincidence_efficiencies(const EfficiencyTable &table, int photons = kCoincidenceOrder);

/// Coincidence counts D_m, m = 0..N, recorded at one phase setting. Counts
/// from the instrument are integers; noiseless synthetic records carry the
/// real-valued expected counts, so the storage is double.
struct CoincidenceRecord {
    double phase = 0.0;
    std::vector<double> counts;
    std::optional<double> integration_time;

    int photons() const { return static_cast<int>(counts.size()) - 1; }
};

/// Throws std::invalid_argument for negative or non-finite counts.
void validate(const CoincidenceRecord &record);

/// D'_m = D_m / Sigma_m. Throws std::domain_error if some Sigma_m is zero.
std::vector<double> rescale_counts(const CoincidenceRecord &record, const EfficiencyTable &table);

/// E[D_m] = M P_m Sigma_m.
std::vector<double> expected_counts(std::span<const double> distribution, double scale, const EfficiencyTable &table);

/// Seeded source of independent Poisson draws.
class PoissonSampler {
  public:
    explicit PoissonSampler(std::uint64_t seed) : engine_(seed) {}

    double draw(double rate);
    std::vector<double> draw(std::span<const double> rates);
    CoincidenceRecord sample(double phase, std::span<const double> rates);

  private:
    std::mt19937_64 engine_;
};

CoincidenceRecord sample_poisson_counts(double phase, std::span<const double> rates, std::uint64_t seed);

}  // namespace spinsq
