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

#include <array>
#include <complex>
#include <map>
#include <optional>
#include <vector>

#include <Eigen/Dense>

namespace spinsq {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kNormTolerance = 1e-12;
inline constexpr double kHermitianTolerance = 1e-10;

/// Fixed-N basis of two polarization modes. Index k holds |n_H = k, n_V = N - k>.
class TwoModeBasis {
  public:
    explicit TwoModeBasis(int photons);

    int photons() const { return photons_; }
    int dimension() const { return photons_ + 1; }
    int h_count(int index) const { return index; }
    int v_count(int index) const { return photons_ - index; }
    int index_of(int n_h, int n_v) const;

    bool operator==(const TwoModeBasis &) const = default;

  private:
    int photons_;
};

class TwoModeState {
  public:
    TwoModeState(TwoModeBasis basis, ComplexVector amplitudes);

    /// |n_h, n_v>.
    static TwoModeState fock(int n_h, int n_v);

    const TwoModeBasis &basis() const { return basis_; }
    int photons() const { return basis_.photons(); }
    int dimension() const { return basis_.dimension(); }
    const ComplexVector &amplitudes() const { return amplitudes_; }
    Complex amplitude(int n_h) const { return amplitudes_(n_h); }

    double norm() const { return amplitudes_.norm(); }
    /// Throws std::domain_error for the zero vector.
    TwoModeState normalized() const;
    /// |amp_k|^2 for every k.
    std::vector<double> probabilities() const;

  private:
    TwoModeBasis basis_;
    ComplexVector amplitudes_;
};

/// |<a|b>|^2 of two normalized states of equal photon number.
double fidelity(const TwoModeState &a, const TwoModeState &b);

/// The four modes carried by the distinguishability model. HPerp and VPerp are
/// temporally orthogonal to H and V and never interfere with them.
enum class Mode { H = 0, V = 1, HPerp = 2, VPerp = 3 };

/// Modes an annihilation operator can act on. D = (H + V)/sqrt(2) and
/// DPerp = (HPerp + VPerp)/sqrt(2).
enum class LoweringMode { H, V, HPerp, VPerp, D, DPerp };

/// Occupations ordered (n_H, n_V, n_HPerp, n_VPerp).
using Occupation = std::array<int, 4>;

/// Sparse fixed-N state on four modes. An empty term map is the zero vector.
class FourModeState {
  public:
    explicit FourModeState(int photons);

    static FourModeState fock(const Occupation &occupation);
    /// Places a two-mode state in (H, V) with the perpendicular modes empty.
    static FourModeState embed(const TwoModeState &state);

    int photons() const { return photons_; }
    const std::map<Occupation, Complex> &terms() const { return terms_; }

    /// Accumulates into the amplitude of `occupation`. Occupations must be
    /// nonnegative and sum to photons().
    void add(const Occupation &occupation, Complex amplitude);
    Complex amplitude(const Occupation &occupation) const;

    double norm_squared() const;
    bool is_zero() const { return norm_squared() == 0.0; }
    FourModeState normalized() const;
    FourModeState pruned(double threshold) const;
    double mean_number(Mode mode) const;
    /// The (H, V) state when both perpendicular modes are empty in every term.
    std::optional<TwoModeState> to_two_mode() const;

  private:
    int photons_;
    std::map<Occupation, Complex> terms_;
};

/// Returns a|psi> with the usual sqrt(n) factors; the result is not
/// normalized and its squared norm equals <n_mode> of the input. On a state
/// with no photons in the addressed mode the result is the zero vector
/// (check FourModeState::is_zero); vacuum input yields an empty zero-photon
/// state.
FourModeState apply_annihilation(const FourModeState &state, LoweringMode mode);

/// Stokes operators on the fixed-N basis:
///   S1 = n_H - n_V,  S2 = a+_H a_V + a+_V a_H,  S3 = -i (a+_H a_V - a+_V a_H).
struct StokesOperators {
    int photons;
    ComplexMatrix s1;
    ComplexMatrix s2;
    ComplexMatrix s3;

    /// index 1, 2 or 3.
    const ComplexMatrix &operator[](int index) const;
};

StokesOperators build_stokes(int photons);

/// Matrix of a+_H a_V on the fixed-N basis (raises n_H by one).
ComplexMatrix raising_operator(int photons);

/// <psi|A|psi> for a Hermitian A. Throws std::invalid_argument on a dimension
/// mismatch and std::domain_error when the imaginary residue exceeds
/// kHermitianTolerance (A was not Hermitian).
double expectation(const TwoModeState &state, const ComplexMatrix &op);

/// <A^2> - <A>^2, clamped at zero.
double variance(const TwoModeState &state, const ComplexMatrix &op);

}  // namespace spinsq
