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

#include "spinsq/detector.h"

#include <cmath>
#include <string>

namespace spinsq {

namespace {

void check_arm(const EfficiencyTable::Arm &arm, char name) {
    for (int i = 0; i < kDetectorsPerArm; ++i) {
        if (!(arm[i] >= 0.0 && arm[i] <= 1.0)) {
            throw std::invalid_argument(std::string("detection probability ") + name + std::to_string(i + 1) +
                                        " outside [0, 1]");
        }
    }
}

}  // namespace

EfficiencyTable::EfficiencyTable(const Arm &arm_a, const Arm &arm_b) : arm_a_(arm_a), arm_b_(arm_b) {
    check_arm(arm_a_, 'a');
    check_arm(arm_b_, 'b');
}

EfficiencyTable EfficiencyTable::measured() {
    return EfficiencyTable({0.0140, 0.0125, 0.0143, 0.0146, 0.0153, 0.0154, 0.0148},
                           {0.0116, 0.0145, 0.0130, 0.0112, 0.0111, 0.0136, 0.0158});
}

EfficiencyTable EfficiencyTable::uniform(double probability) {
    Arm arm;
    arm.fill(probability);
    return EfficiencyTable(arm, arm);
}

double coincidence_efficiency(const EfficiencyTable &table, int m, int photons) {
    return coincidence_efficiency<double>(table.arm_a(), table.arm_b(), m, photons);
}

std::vector<double> coincidence_efficiencies(const EfficiencyTable &table, int photons) {
    std::vector<double> out(photons + 1);
    for (int m = 0; m <= photons; ++m) {
        out[m] = coincidence_efficiency(table, m, photons);
    }
    return out;
}

void validate(const CoincidenceRecord &record) {
    if (record.counts.empty()) {
        throw std::invalid_argument("coincidence record has no counts");
    }
    if (!std::isfinite(record.phase)) {
        throw std::invalid_argument("coincidence record phase is not finite");
    }
    for (double c : record.counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw std::invalid_argument("coincidence counts must be finite and nonnegative");
        }
    }
}

std::vector<double> rescale_counts(const CoincidenceRecord &record, const EfficiencyTable &table) {
    validate(record);
    const auto sigma = coincidence_efficiencies(table, record.photons());
    std::vector<double> out(record.counts.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        if (sigma[m] == 0.0) {
            throw std::domain_error("coincidence efficiency Sigma_" + std::to_string(m) +
                                    " is zero; counts cannot be rescaled");
        }
        out[m] = record.counts[m] / sigma[m];
    }
    return out;
}

std::vector<double> expected_counts(std::span<const double> distribution, double scale, const EfficiencyTable &table) {
    if (!(scale >= 0.0) || !std::isfinite(scale)) {
        throw std::invalid_argument("count scale M must be finite and nonnegative");
    }
    const auto sigma = coincidence_efficiencies(table, static_cast<int>(distribution.size()) - 1);
    std::vector<double> out(distribution.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = scale * distribution[m] * sigma[m];
    }
    return out;
}

double PoissonSampler::draw(double rate) {
    if (!(rate >= 0.0) || !std::isfinite(rate)) {
        throw std::invalid_argument("Poisson rate must be finite and nonnegative");
    }
    if (rate == 0.0) {
        return 0.0;
    }
    std::poisson_distribution<long long> dist(rate);
    return static_cast<double>(dist(engine_));
}

std::vector<double> PoissonSampler::draw(std::span<const double> rates) {
    std::vector<double> out(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) {
        out[i] = draw(rates[i]);
    }
    return out;
}

CoincidenceRecord PoissonSampler::sample(double phase, std::span<const double> rates) {
    return CoincidenceRecord{phase, draw(rates), std::nullopt};
}

CoincidenceRecord sample_poisson_counts(double phase, std::span<const double> rates, std::uint64_t seed) {
    PoissonSampler sampler(seed);
    return sampler.sample(phase, rates);
}

}  // namespace spinsq
