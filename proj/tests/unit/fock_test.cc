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
#include <random>

#include <gtest/gtest.h>

#include "spinsq/states.h"

using namespace spinsq;

namespace {

ComplexMatrix commutator(const ComplexMatrix &a, const ComplexMatrix &b) {
    return a * b - b * a;
}

}  // namespace

TEST(fock, basis_indexing) {
    TwoModeBasis basis(5);
    EXPECT_EQ(basis.dimension(), 6);
    for (int k = 0; k <= 5; ++k) {
        EXPECT_EQ(basis.index_of(basis.h_count(k), basis.v_count(k)), k);
    }
    EXPECT_THROW(basis.index_of(3, 3), std::out_of_range);
    EXPECT_THROW(basis.index_of(-1, 6), std::out_of_range);
}

TEST(fock, single_photon_s1) {
    const auto s = build_stokes(1);
    EXPECT_NEAR(s.s1(0, 0).real(), -1.0, 1e-15);
    EXPECT_NEAR(s.s1(1, 1).real(), 1.0, 1e-15);
    EXPECT_EQ(s.s1(0, 1), Complex(0.0));
    EXPECT_THROW(build_stokes(0), std::invalid_argument);
}

TEST(fock, stokes_algebra) {
    for (int n = 1; n <= 7; ++n) {
        const auto s = build_stokes(n);
        const Complex two_i(0.0, 2.0);
        for (int i = 1; i <= 3; ++i) {
            EXPECT_LT((s[i] - s[i].adjoint()).norm(), 1e-12) << "N=" << n << " S" << i;
        }
        EXPECT_LT((commutator(s.s1, s.s2) - two_i * s.s3).norm(), 1e-10);
        EXPECT_LT((commutator(s.s2, s.s3) - two_i * s.s1).norm(), 1e-10);
        EXPECT_LT((commutator(s.s3, s.s1) - two_i * s.s2).norm(), 1e-10);
        // Eigenvalues of S1 are -N, -N+2, ..., N on the diagonal.
        for (int k = 0; k <= n; ++k) {
            EXPECT_EQ(s.s1(k, k), Complex(2.0 * k - n));
        }
        // Total spin: S1^2 + S2^2 + S3^2 = N(N+2).
        const ComplexMatrix casimir = s.s1 * s.s1 + s.s2 * s.s2 + s.s3 * s.s3;
        EXPECT_LT((casimir - ComplexMatrix::Identity(n + 1, n + 1) * double(n * (n + 2))).norm(), 1e-10);
    }
}

TEST(fock, yurke_moments) {
    const auto y = yurke_state(5);
    const auto s = build_stokes(5);
    EXPECT_NEAR(expectation(y, s.s1), 0.0, 1e-12);
    EXPECT_NEAR(expectation(y, s.s2), 3.0, 1e-12);
    EXPECT_NEAR(expectation(y, s.s3), 0.0, 1e-12);
    EXPECT_NEAR(expectation(y, s.s1 * s.s1), 1.0, 1e-12);
    EXPECT_NEAR(variance(y, s.s3), 17.0, 1e-12);
    const auto s3 = build_stokes(3);
    EXPECT_NEAR(variance(yurke_state(3), s3.s3), 7.0, 1e-12);
}

TEST(fock, uncorrelated_moments) {
    const auto u = uncorrelated_state(5);
    const auto s = build_stokes(5);
    EXPECT_NEAR(expectation(u, s.s1), 0.0, 1e-12);
    EXPECT_NEAR(expectation(u, s.s2), 5.0, 1e-12);
    EXPECT_NEAR(expectation(u, s.s3), 0.0, 1e-12);
    EXPECT_NEAR(expectation(u, s.s1 * s.s1), 5.0, 1e-12);
    EXPECT_NEAR(variance(u, s.s3), 5.0, 1e-12);
}

TEST(fock, expectation_errors) {
    const auto y = yurke_state(5);
    EXPECT_THROW(expectation(y, build_stokes(3).s1), std::invalid_argument);
    const ComplexMatrix anti = Complex(0.0, 1.0) * ComplexMatrix::Identity(6, 6);
    EXPECT_THROW(expectation(y, anti), std::domain_error);
}

TEST(fock, variance_nonnegative) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 1 + trial % 7;
        ComplexVector v(n + 1);
        for (int k = 0; k <= n; ++k) {
            v(k) = Complex(g(rng), g(rng));
        }
        const auto psi = TwoModeState(TwoModeBasis(n), v).normalized();
        EXPECT_NEAR(psi.norm(), 1.0, kNormTolerance);
        const auto s = build_stokes(n);
        for (int i = 1; i <= 3; ++i) {
            EXPECT_GE(variance(psi, s[i]), 0.0);
        }
    }
}

TEST(fock, normalize_zero_throws) {
    EXPECT_THROW(TwoModeState(TwoModeBasis(2), ComplexVector::Zero(3)).normalized(), std::domain_error);
    EXPECT_THROW(TwoModeState(TwoModeBasis(2), ComplexVector::Zero(4)), std::invalid_argument);
}

TEST(fock, lowering_single_modes) {
    const auto out = apply_annihilation(FourModeState::fock({1, 0, 0, 0}), LoweringMode::H);
    EXPECT_EQ(out.photons(), 0);
    EXPECT_NEAR(std::abs(out.amplitude({0, 0, 0, 0}) - 1.0), 0.0, 1e-15);

    const auto vac = apply_annihilation(FourModeState(0), LoweringMode::H);
    EXPECT_TRUE(vac.is_zero());
    EXPECT_TRUE(apply_annihilation(FourModeState::fock({0, 2, 0, 0}), LoweringMode::H).is_zero());
}

TEST(fock, lowering_diagonal) {
    const auto src = FourModeState::fock({3, 3, 0, 0});
    const auto d = apply_annihilation(src, LoweringMode::D);
    const double amp = std::sqrt(3.0) / std::sqrt(2.0);
    EXPECT_NEAR(std::abs(d.amplitude({2, 3, 0, 0}) - amp), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(d.amplitude({3, 2, 0, 0}) - amp), 0.0, 1e-15);
    EXPECT_NEAR(d.norm_squared(), 3.0, 1e-14);
    EXPECT_TRUE(apply_annihilation(src, LoweringMode::DPerp).is_zero());
}

TEST(fock, lowering_norm_is_mode_number) {
    FourModeState s(4);
    s.add({1, 1, 1, 1}, Complex(0.5, 0.0));
    s.add({2, 0, 0, 2}, Complex(0.0, 0.5));
    s.add({0, 3, 1, 0}, Complex(0.5, 0.0));
    s.add({4, 0, 0, 0}, Complex(-0.5, 0.0));
    const std::array<std::pair<LoweringMode, Mode>, 4> pairs = {{{LoweringMode::H, Mode::H},
                                                                   {LoweringMode::V, Mode::V},
                                                                   {LoweringMode::HPerp, Mode::HPerp},
                                                                   {LoweringMode::VPerp, Mode::VPerp}}};
    for (const auto &[lower, mode] : pairs) {
        EXPECT_NEAR(apply_annihilation(s, lower).norm_squared(), s.mean_number(mode), 1e-14);
    }
    // Number eigenstate: one fewer photon after lowering.
    const auto eig = FourModeState::fock({2, 1, 3, 0});
    const auto after = apply_annihilation(eig, LoweringMode::HPerp).normalized();
    EXPECT_NEAR(after.mean_number(Mode::HPerp), 2.0, 1e-14);
    EXPECT_EQ(after.photons(), 5);
}

TEST(fock, four_mode_validation) {
    FourModeState s(2);
    EXPECT_THROW(s.add({1, 0, 0, 0}, 1.0), std::invalid_argument);
    EXPECT_THROW(FourModeState(3).normalized(), std::domain_error);
    const auto embedded = FourModeState::embed(yurke_state(3));
    ASSERT_TRUE(embedded.to_two_mode().has_value());
    EXPECT_NEAR(fidelity(*embedded.to_two_mode(), yurke_state(3)), 1.0, 1e-14);
    EXPECT_FALSE(FourModeState::fock({0, 0, 1, 0}).to_two_mode().has_value());
}
