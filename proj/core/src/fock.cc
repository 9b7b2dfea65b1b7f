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

#include "spinsq/fock.h"

#include <cmath>
#include <stdexcept>
#include <string>

namespace spinsq {

TwoModeBasis::TwoModeBasis(int photons) : photons_(photons) {
    if (photons < 0) {
        throw std::invalid_argument("photon number must be nonnegative, got " + std::to_string(photons));
    }
}

int TwoModeBasis::index_of(int n_h, int n_v) const {
    if (n_h < 0 || n_v < 0 || n_h + n_v != photons_) {
        throw std::out_of_range(
            "occupation (" + std::to_string(n_h) + "," + std::to_string(n_v) + ") not in the N=" +
            std::to_string(photons_) + " basis");
    }
    return n_h;
}

TwoModeState::TwoModeState(TwoModeBasis basis, ComplexVector amplitudes)
    : basis_(basis), amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() != basis_.dimension()) {
        throw std::invalid_argument(
            "amplitude vector has length " + std::to_string(amplitudes_.size()) + ", basis dimension is " +
            std::to_string(basis_.dimension()));
    }
}

TwoModeState TwoModeState::fock(int n_h, int n_v) {
    TwoModeBasis basis(n_h + n_v);
    ComplexVector amps = ComplexVector::Zero(basis.dimension());
    amps(basis.index_of(n_h, n_v)) = 1.0;
    return TwoModeState(basis, std::move(amps));
}

TwoModeState TwoModeState::normalized() const {
    double n = norm();
    if (n == 0.0) {
        throw std::domain_error("cannot normalize the zero vector");
    }
    return TwoModeState(basis_, amplitudes_ / n);
}

std::vector<double> TwoModeState::probabilities() const {
    std::vector<double> p(amplitudes_.size());
    for (Eigen::Index k = 0; k < amplitudes_.size(); ++k) {
        p[k] = std::norm(amplitudes_(k));
    }
    return p;
}

double fidelity(const TwoModeState &a, const TwoModeState &b) {
    if (a.photons() != b.photons()) {
        throw std::invalid_argument("fidelity: photon numbers differ");
    }
    return std::norm(a.amplitudes().dot(b.amplitudes()));
}

FourModeState::FourModeState(int photons) : photons_(photons) {
    if (photons < 0) {
        throw std::invalid_argument("photon number must be nonnegative");
    }
}

FourModeState FourModeState::fock(const Occupation &occupation) {
    FourModeState state(occupation[0] + occupation[1] + occupation[2] + occupation[3]);
    state.add(occupation, 1.0);
    return state;
}

FourModeState FourModeState::embed(const TwoModeState &two) {
    FourModeState state(two.photons());
    for (int k = 0; k < two.dimension(); ++k) {
        if (two.amplitude(k) != Complex(0.0)) {
            state.add({k, two.photons() - k, 0, 0}, two.amplitude(k));
        }
    }
    return state;
}

void FourModeState::add(const Occupation &occupation, Complex amplitude) {
    int total = 0;
    for (int n : occupation) {
        if (n < 0) {
            throw std::invalid_argument("negative occupation");
        }
        total += n;
    }
    if (total != photons_) {
        throw std::invalid_argument(
            "occupation sums to " + std::to_string(total) + ", state has " + std::to_string(photons_) + " photons");
    }
    terms_[occupation] += amplitude;
}

Complex FourModeState::amplitude(const Occupation &occupation) const {
    auto it = terms_.find(occupation);
    return it == terms_.end() ? Complex(0.0) : it->second;
}

double FourModeState::norm_squared() const {
    double total = 0.0;
    for (const auto &[occ, amp] : terms_) {
        total += std::norm(amp);
    }
    return total;
}

FourModeState FourModeState::normalized() const {
    double n2 = norm_squared();
    if (n2 == 0.0) {
        throw std::domain_error("cannot normalize the zero vector");
    }
    FourModeState out(photons_);
    double scale = 1.0 / std::sqrt(n2);
    for (const auto &[occ, amp] : terms_) {
        out.terms_[occ] = amp * scale;
    }
    return out;
}

FourModeState FourModeState::pruned(double threshold) const {
    FourModeState out(photons_);
    for (const auto &[occ, amp] : terms_) {
        if (std::abs(amp) > threshold) {
            out.terms_[occ] = amp;
        }
    }
    return out;
}

double FourModeState::mean_number(Mode mode) const {
    double n2 = norm_squared();
    if (n2 == 0.0) {
        return 0.0;
    }
    double total = 0.0;
    for (const auto &[occ, amp] : terms_) {
        total += occ[static_cast<int>(mode)] * std::norm(amp);
    }
    return total / n2;
}

std::optional<TwoModeState> FourModeState::to_two_mode() const {
    TwoModeBasis basis(photons_);
    ComplexVector amps = ComplexVector::Zero(basis.dimension());
    for (const auto &[occ, amp] : terms_) {
        if (occ[2] != 0 || occ[3] != 0) {
            if (amp != Complex(0.0)) {
                return std::nullopt;
            }
            continue;
        }
        amps(occ[0]) += amp;
    }
    return TwoModeState(basis, std::move(amps));
}

namespace {

void lower_into(FourModeState &out, const FourModeState &in, int mode, Complex coefficient) {
    for (const auto &[occ, amp] : in.terms()) {
        int n = occ[mode];
        if (n == 0) {
            continue;
        }
        Occupation lowered = occ;
        lowered[mode] -= 1;
        out.add(lowered, coefficient * std::sqrt(static_cast<double>(n)) * amp);
    }
}

}  // namespace

FourModeState apply_annihilation(const FourModeState &state, LoweringMode mode) {
    if (state.photons() == 0) {
        return FourModeState(0);
    }
    FourModeState out(state.photons() - 1);
    const double r = 1.0 / std::sqrt(2.0);
    switch (mode) {
        case LoweringMode::H:
            lower_into(out, state, 0, 1.0);
            break;
        case LoweringMode::V:
            lower_into(out, state, 1, 1.0);
            break;
        case LoweringMode::HPerp:
            lower_into(out, state, 2, 1.0);
            break;
        case LoweringMode::VPerp:
            lower_into(out, state, 3, 1.0);
            break;
        case LoweringMode::D:
            lower_into(out, state, 0, r);
            lower_into(out, state, 1, r);
            break;
        case LoweringMode::DPerp:
            lower_into(out, state, 2, r);
            lower_into(out, state, 3, r);
            break;
    }
    return out;
}

const ComplexMatrix &StokesOperators::operator[](int index) const {
    switch (index) {
        case 1:
            return s1;
        case 2:
            return s2;
        case 3:
            return s3;
        default:
            throw std::out_of_range("Stokes index must be 1, 2 or 3");
    }
}

ComplexMatrix raising_operator(int photons) {
    TwoModeBasis basis(photons);
    ComplexMatrix up = ComplexMatrix::Zero(basis.dimension(), basis.dimension());
    // a+_H a_V |k, N-k> = sqrt((k+1)(N-k)) |k+1, N-k-1>
    for (int k = 0; k < photons; ++k) {
        up(k + 1, k) = std::sqrt(static_cast<double>((k + 1) * (photons - k)));
    }
    return up;
}

StokesOperators build_stokes(int photons) {
    if (photons < 1) {
        throw std::invalid_argument("build_stokes needs N >= 1, got " + std::to_string(photons));
    }
    const int dim = photons + 1;
    ComplexMatrix s1 = ComplexMatrix::Zero(dim, dim);
    for (int k = 0; k < dim; ++k) {
        s1(k, k) = 2.0 * k - photons;
    }
    ComplexMatrix up = raising_operator(photons);
    ComplexMatrix down = up.adjoint();
    const Complex i(0.0, 1.0);
    return StokesOperators{photons, std::move(s1), up + down, -i * (up - down)};
}

double expectation(const TwoModeState &state, const ComplexMatrix &op) {
    if (op.rows() != state.dimension() || op.cols() != state.dimension()) {
        throw std::invalid_argument(
            "operator is " + std::to_string(op.rows()) + "x" + std::to_string(op.cols()) + ", state dimension is " +
            std::to_string(state.dimension()));
    }
    Complex value = state.amplitudes().dot(op * state.amplitudes());
    if (std::abs(value.imag()) > kHermitianTolerance) {
        throw std::domain_error("expectation has imaginary part " + std::to_string(value.imag()) +
                                "; operator is not Hermitian");
    }
    return value.real();
}

double variance(const TwoModeState &state, const ComplexMatrix &op) {
    double mean = expectation(state, op);
    ComplexMatrix squared = op * op;
    double second = expectation(state, squared);
    double v = second - mean * mean;
    return v < 0.0 ? 0.0 : v;
}

}  // namespace spinsq
