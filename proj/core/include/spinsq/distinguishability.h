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

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "spinsq/fock.h"

namespace spinsq {

struct Branch {
    double weight;
    FourModeState state;
};

/// Incoherent mixture of normalized four-mode pure states.
class BranchMixture {
  public:
    /// Weights must be >= 0 and sum to 1 within 1e-12; states must be
    /// normalized and share one photon number.
    BranchMixture(std::vector<Branch> branches, double indistinguishability);

    const std::vector<Branch> &branches() const { return branches_; }
    double indistinguishability() const { return indistinguishability_; }
    int photons() const { return branches_.front().state.photons(); }

  private:
    std::vector<Branch> branches_;
    double indistinguishability_;
};

/// Weight s of the uniform admixture, restricted to [0, 1].
class NoiseParameter {
  public:
    explicit NoiseParameter(double s);
    double value() const { return value_; }

  private:
    double value_;
};

/// C_d = binom(n, d) I^{n-d} (1 - I)^d, d = 0..n, for a source with n photons
/// per arm.
std::vector<double> mismatch_weights(int photons_per_arm, double indistinguishability);

/// Source with (N+1)/2 photons in H and (N+1)/2 in the partially
/// distinguishable V arm. Branch d is |(N+1)/2, (N+1)/2 - d, 0, d> with
/// weight C_d; coherences between different d are dropped. N odd >= 3.
BranchMixture mismatched_source(int photons, double indistinguishability);

/// Applies the diagonal-basis subtraction to every branch and keeps both the
/// a_D and a_DPerp outcomes, weighted by their squared norms.
BranchMixture subtract_one_photon(const BranchMixture &source);

/// Probability of m detected H photons (H plus HPerp), m = 0..N, after U(phi)
/// acts identically on the (H, V) and (HPerp, VPerp) pairs.
std::vector<double> detection_distribution(const FourModeState &state, double phi);
std::vector<double> detection_distribution(const BranchMixture &mixture, double phi);

/// P_{m,I}(phi) for the heralded N-photon state built from a mismatched
/// (N+1)-photon source.
std::vector<double> probability_with_mismatch(int photons, double indistinguishability, double phi);

/// (1 - s) P + s / len(P). Throws if P is empty or does not sum to one.
std::vector<double> add_phase_insensitive_noise(std::span<const double> distribution, NoiseParameter s);
/// As above, additionally requiring len(P) == photons + 1.
std::vector<double> add_phase_insensitive_noise(std::span<const double> distribution, NoiseParameter s,
                                                int photons);

/// Precomputed form of probability_with_mismatch for repeated evaluation in
/// fits. The heralded branch states do not depend on I, only their mixing
/// weights do, so P_{m,I}(phi) = sum_d C_d(I) Q_d,m(phi). Every branch
/// amplitude is a degree-N homogeneous polynomial in cos(phi/2), sin(phi/2),
/// so each Q_d,m is a trigonometric polynomial of degree N; it is stored as
/// its exact Fourier coefficients, recovered from 2N+1 staged evaluations.
class MismatchModel {
  public:
    explicit MismatchModel(int photons);

    int photons() const { return photons_; }
    int photons_per_arm() const { return (photons_ + 1) / 2; }

    /// Q_d(phi) for d = 0..(N+1)/2 from the Fourier representation.
    std::vector<std::vector<double>> sector_distributions(double phi) const;
    /// Q_d(phi) evaluated through the staged rotate-and-count pipeline.
    std::vector<std::vector<double>> staged_sector_distributions(double phi) const;

    std::vector<double> distribution(double indistinguishability, double phi) const;
    /// P_{m,I,s}(phi).
    std::vector<double> distribution(double indistinguishability, double noise, double phi) const;

  private:
    struct Block {
        int parallel;       // photons in (H, V)
        int perpendicular;  // photons in (HPerp, VPerp)
        Eigen::MatrixXd amplitudes;  // [n_H][n_HPerp]
    };
    struct Sector {
        std::vector<std::pair<double, std::vector<Block>>> branches;  // weight within sector
    };

    void evaluate_into(double phi, const std::vector<double> &weights, std::vector<double> &out) const;

    int photons_;
    std::vector<Sector> sectors_;
    // coefficients_[d][m] = {a_0, a_1, b_1, ..., a_N, b_N}
    std::vector<std::vector<std::vector<double>>> coefficients_;
};

}  // namespace spinsq
