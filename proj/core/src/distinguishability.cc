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

#include "spinsq/distinguishability.h"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <string>

#include "spinsq/interferometer.h"
#include "spinsq/states.h"

namespace spinsq {

namespace {

void check_indistinguishability(double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw std::invalid_argument("indistinguishability must lie in [0, 1], got " + std::to_string(value));
    }
}

void check_source_photons(int photons) {
    if (photons < 3 || photons % 2 == 0) {
        throw std::invalid_argument("mismatch model needs odd N >= 3, got " + std::to_string(photons));
    }
}

double binomial(int n, int k) {
    double c = 1.0;
    for (int j = 1; j <= k; ++j) {
        c = c * (n - k + j) / j;
    }
    return c;
}

// Rotation matrices for every photon count 0..max at one phase.
std::vector<Eigen::MatrixXd> rotations(int max_photons, double phi) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(max_photons + 1);
    for (int n = 0; n <= max_photons; ++n) {
        out.push_back(rotation_matrix(n, phi));
    }
    return out;
}

// Splits a four-mode state into (parallel, perpendicular) photon-number
// blocks, each a matrix over (n_H, n_HPerp). Amplitudes are complex in
// general; the real and imaginary parts transform independently under the
// real rotation, so keep both.
struct ComplexBlock {
    int parallel;
    int perpendicular;
    Eigen::MatrixXd re;
    Eigen::MatrixXd im;
};

std::vector<ComplexBlock> split_blocks(const FourModeState &state) {
    std::map<std::pair<int, int>, ComplexBlock> blocks;
    for (const auto &[occ, amp] : state.terms()) {
        const int par = occ[0] + occ[1];
        const int perp = occ[2] + occ[3];
        auto [it, inserted] = blocks.try_emplace({par, perp});
        if (inserted) {
            it->second = ComplexBlock{par, perp, Eigen::MatrixXd::Zero(par + 1, perp + 1),
                                      Eigen::MatrixXd::Zero(par + 1, perp + 1)};
        }
        it->second.re(occ[0], occ[2]) += amp.real();
        it->second.im(occ[0], occ[2]) += amp.imag();
    }
    std::vector<ComplexBlock> out;
    for (auto &[key, block] : blocks) {
        out.push_back(std::move(block));
    }
    return out;
}

void accumulate_block(std::vector<double> &probs, const Eigen::MatrixXd &amplitudes, const Eigen::MatrixXd &u_par,
                      const Eigen::MatrixXd &u_perp, double weight) {
    const Eigen::MatrixXd evolved = u_par * amplitudes * u_perp.transpose();
    for (Eigen::Index k = 0; k < evolved.rows(); ++k) {
        for (Eigen::Index kp = 0; kp < evolved.cols(); ++kp) {
            probs[k + kp] += weight * evolved(k, kp) * evolved(k, kp);
        }
    }
}

}  // namespace

BranchMixture::BranchMixture(std::vector<Branch> branches, double indistinguishability)
    : branches_(std::move(branches)), indistinguishability_(indistinguishability) {
    check_indistinguishability(indistinguishability);
    if (branches_.empty()) {
        throw std::invalid_argument("branch mixture is empty");
    }
    double total = 0.0;
    const int photons = branches_.front().state.photons();
    for (const auto &b : branches_) {
        if (!(b.weight >= 0.0)) {
            throw std::invalid_argument("branch weight must be nonnegative");
        }
        if (b.state.photons() != photons) {
            throw std::invalid_argument("branches carry different photon numbers");
        }
        if (std::abs(b.state.norm_squared() - 1.0) > kNormTolerance) {
            throw std::invalid_argument("branch state is not normalized");
        }
        total += b.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("branch weights sum to " + std::to_string(total));
    }
}

NoiseParameter::NoiseParameter(double s) : value_(s) {
    if (!(s >= 0.0 && s <= 1.0)) {
        throw std::invalid_argument("noise weight s must lie in [0, 1], got " + std::to_string(s));
    }
}

std::vector<double> mismatch_weights(int photons_per_arm, double indistinguishability) {
    check_indistinguishability(indistinguishability);
    const int n = photons_per_arm;
    std::vector<double> c(n + 1);
    for (int d = 0; d <= n; ++d) {
        c[d] = binomial(n, d) * std::pow(indistinguishability, n - d) * std::pow(1.0 - indistinguishability, d);
    }
    return c;
}

BranchMixture mismatched_source(int photons, double indistinguishability) {
    check_source_photons(photons);
    check_indistinguishability(indistinguishability);
    const int n = (photons + 1) / 2;
    const auto weights = mismatch_weights(n, indistinguishability);
    std::vector<Branch> branches;
    for (int d = 0; d <= n; ++d) {
        if (weights[d] > 0.0) {
            branches.push_back({weights[d], FourModeState::fock({n, n - d, 0, d})});
        }
    }
    // Renormalize away the rounding of the binomial sum.
    double total = 0.0;
    for (const auto &b : branches) {
        total += b.weight;
    }
    for (auto &b : branches) {
        b.weight /= total;
    }
    return BranchMixture(std::move(branches), indistinguishability);
}

BranchMixture subtract_one_photon(const BranchMixture &source) {
    std::vector<Branch> out;
    double total = 0.0;
    for (const auto &b : source.branches()) {
        FourModeState d = apply_annihilation(b.state, LoweringMode::D);
        FourModeState dp = apply_annihilation(b.state, LoweringMode::DPerp);
        for (FourModeState *s : {&d, &dp}) {
            const double n2 = s->norm_squared();
            if (n2 > 0.0) {
                out.push_back({b.weight * n2, s->normalized()});
                total += b.weight * n2;
            }
        }
    }
    if (total == 0.0) {
        throw std::invalid_argument("photon subtraction annihilated every branch");
    }
    for (auto &b : out) {
        b.weight /= total;
    }
    return BranchMixture(std::move(out), source.indistinguishability());
}

std::vector<double> detection_distribution(const FourModeState &state, double phi) {
    const int n = state.photons();
    const auto u = rotations(n, phi);
    std::vector<double> probs(n + 1, 0.0);
    for (const auto &block : split_blocks(state)) {
        const auto &u_par = u[block.parallel];
        const auto &u_perp = u[block.perpendicular];
        accumulate_block(probs, block.re, u_par, u_perp, 1.0);
        accumulate_block(probs, block.im, u_par, u_perp, 1.0);
    }
    const double norm2 = state.norm_squared();
    if (norm2 == 0.0) {
        throw std::invalid_argument("detection distribution of the zero vector");
    }
    for (double &p : probs) {
        p /= norm2;
    }
    return probs;
}

std::vector<double> detection_distribution(const BranchMixture &mixture, double phi) {
    std::vector<double> probs(mixture.photons() + 1, 0.0);
    for (const auto &b : mixture.branches()) {
        const auto p = detection_distribution(b.state, phi);
        for (std::size_t m = 0; m < probs.size(); ++m) {
            probs[m] += b.weight * p[m];
        }
    }
    return probs;
}

std::vector<double> probability_with_mismatch(int photons, double indistinguishability, double phi) {
    return detection_distribution(subtract_one_photon(mismatched_source(photons, indistinguishability)), phi);
}

std::vector<double> add_phase_insensitive_noise(std::span<const double> distribution, NoiseParameter s) {
    if (distribution.empty()) {
        throw std::invalid_argument("empty distribution");
    }
    double sum = 0.0;
    for (double p : distribution) {
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-10) {
        throw std::invalid_argument("distribution sums to " + std::to_string(sum));
    }
    const double uniform = s.value() / static_cast<double>(distribution.size());
    std::vector<double> out(distribution.size());
    for (std::size_t m = 0; m < out.size(); ++m) {
        out[m] = (1.0 - s.value()) * distribution[m] + uniform;
    }
    return out;
}

std::vector<double> add_phase_insensitive_noise(std::span<const double> distribution, NoiseParameter s,
                                                int photons) {
    if (static_cast<int>(distribution.size()) != photons + 1) {
        throw std::invalid_argument("expected " + std::to_string(photons + 1) + " outcome probabilities, got " +
                                    std::to_string(distribution.size()));
    }
    return add_phase_insensitive_noise(distribution, s);
}

MismatchModel::MismatchModel(int photons) : photons_(photons) {
    check_source_photons(photons);
    if (photons > 15) {
        throw std::invalid_argument("MismatchModel supports N <= 15");
    }
    const int n = photons_per_arm();
    for (int d = 0; d <= n; ++d) {
        const FourModeState source = FourModeState::fock({n, n - d, 0, d});
        Sector sector;
        const auto heralded = subtract_one_photon_diagonal(source);
        const std::pair<double, const FourModeState *> parts[] = {{heralded.d_weight, &heralded.d_branch},
                                                                  {heralded.d_perp_weight, &heralded.d_perp_branch}};
        for (const auto &[w, state] : parts) {
            if (w <= 0.0) {
                continue;
            }
            std::vector<Block> blocks;
            for (auto &cb : split_blocks(*state)) {
                blocks.push_back({cb.parallel, cb.perpendicular, std::move(cb.re)});
            }
            sector.branches.emplace_back(w, std::move(blocks));
        }
        sectors_.push_back(std::move(sector));
    }

    // Exact trigonometric interpolation: 2N+1 equispaced samples determine a
    // degree-N trigonometric polynomial.
    const int samples = 2 * photons_ + 1;
    std::vector<std::vector<std::vector<double>>> staged(samples);
    for (int j = 0; j < samples; ++j) {
        staged[j] = staged_sector_distributions(2.0 * std::numbers::pi * j / samples);
    }
    coefficients_.assign(sectors_.size(),
                         std::vector<std::vector<double>>(photons_ + 1, std::vector<double>(samples, 0.0)));
    for (std::size_t d = 0; d < sectors_.size(); ++d) {
        for (int m = 0; m <= photons_; ++m) {
            auto &c = coefficients_[d][m];
            for (int j = 0; j < samples; ++j) {
                const double phi = 2.0 * std::numbers::pi * j / samples;
                const double q = staged[j][d][m];
                c[0] += q / samples;
                for (int k = 1; k <= photons_; ++k) {
                    c[2 * k - 1] += 2.0 * q * std::cos(k * phi) / samples;
                    c[2 * k] += 2.0 * q * std::sin(k * phi) / samples;
                }
            }
        }
    }
}

std::vector<std::vector<double>> MismatchModel::staged_sector_distributions(double phi) const {
    const auto u = rotations(photons_, phi);
    std::vector<std::vector<double>> out;
    out.reserve(sectors_.size());
    for (const auto &sector : sectors_) {
        std::vector<double> probs(photons_ + 1, 0.0);
        for (const auto &[w, blocks] : sector.branches) {
            for (const auto &b : blocks) {
                accumulate_block(probs, b.amplitudes, u[b.parallel], u[b.perpendicular], w);
            }
        }
        out.push_back(std::move(probs));
    }
    return out;
}

void MismatchModel::evaluate_into(double phi, const std::vector<double> &weights, std::vector<double> &out) const {
    const int n = photons_;
    double cos_k[16], sin_k[16];
    const double c1 = std::cos(phi), s1 = std::sin(phi);
    cos_k[0] = 1.0;
    sin_k[0] = 0.0;
    for (int k = 1; k <= n; ++k) {
        cos_k[k] = cos_k[k - 1] * c1 - sin_k[k - 1] * s1;
        sin_k[k] = sin_k[k - 1] * c1 + cos_k[k - 1] * s1;
    }
    out.assign(n + 1, 0.0);
    for (std::size_t d = 0; d < coefficients_.size(); ++d) {
        if (weights[d] == 0.0) {
            continue;
        }
        for (int m = 0; m <= n; ++m) {
            const auto &c = coefficients_[d][m];
            double v = c[0];
            for (int k = 1; k <= n; ++k) {
                v += c[2 * k - 1] * cos_k[k] + c[2 * k] * sin_k[k];
            }
            out[m] += weights[d] * v;
        }
    }
    for (double &p : out) {
        if (p < 0.0) {
            p = 0.0;
        }
    }
}

std::vector<std::vector<double>> MismatchModel::sector_distributions(double phi) const {
    std::vector<std::vector<double>> out;
    std::vector<double> unit(coefficients_.size(), 0.0);
    for (std::size_t d = 0; d < coefficients_.size(); ++d) {
        unit.assign(coefficients_.size(), 0.0);
        unit[d] = 1.0;
        std::vector<double> q;
        evaluate_into(phi, unit, q);
        out.push_back(std::move(q));
    }
    return out;
}

std::vector<double> MismatchModel::distribution(double indistinguishability, double phi) const {
    const auto weights = mismatch_weights(photons_per_arm(), indistinguishability);
    std::vector<double> probs;
    evaluate_into(phi, weights, probs);
    return probs;
}

std::vector<double> MismatchModel::distribution(double indistinguishability, double noise, double phi) const {
    const double s = NoiseParameter(noise).value();
    auto probs = distribution(indistinguishability, phi);
    const double uniform = s / static_cast<double>(probs.size());
    for (double &p : probs) {
        p = (1.0 - s) * p + uniform;
    }
    return probs;
}

}  // namespace spinsq
