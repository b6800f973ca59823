// Copyright 2026 The fourphoton Authors
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

#ifndef FOURPHOTON_STATE_H_
#define FOURPHOTON_STATE_H_

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fourphoton {

using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kExactTolerance = 1e-12;
inline constexpr double kUnitaryProductTolerance = 1e-10;

/// Raised when an operation requiring a normalized state receives one that is not.
struct InvalidStateError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when the data needed for an estimate is missing (empty frames,
/// missing setting combinations, no key rounds).
struct InsufficientDataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Polarization : uint8_t { H = 0, V = 1 };

/// The four detection arms in canonical tensor order a, a', b, b'.
enum class Arm : uint8_t { A = 0, APrime = 1, B = 2, BPrime = 3 };

inline constexpr std::array<Arm, 4> kArms{Arm::A, Arm::APrime, Arm::B, Arm::BPrime};

/// ASCII labels used in every file format: "a", "ap", "b", "bp".
std::string_view arm_name(Arm arm);
/// Accepts "a", "ap", "a'", "b", "bp", "b'" (case sensitive).
Arm parse_arm(std::string_view name);

/// Amplitude pair (amp_H, amp_V) of one polarization qubit.
using Qubit = std::array<Complex, 2>;

/// Basis index of a four-photon polarization pattern: 8*a + 4*a' + 2*b + b' with H=0, V=1.
constexpr size_t basis_index(Polarization a, Polarization ap, Polarization b, Polarization bp) {
    return 8 * static_cast<size_t>(a) + 4 * static_cast<size_t>(ap) + 2 * static_cast<size_t>(b) +
           static_cast<size_t>(bp);
}

/// Parses a pattern such as "HHVV" into its basis index.
size_t basis_index(std::string_view pattern);

/// Sixteen polarization amplitudes of the photons in arms a, a', b, b'.
///
/// The raw constructor does not normalize; the named constructors below and
/// every unitary operation return normalized states. Operations whose inputs
/// must be normalized check it and throw InvalidStateError.
class StateVector4 {
   public:
    static constexpr size_t kDim = 16;

    /// |HHHH>.
    StateVector4();
    explicit StateVector4(const std::array<Complex, kDim> &amplitudes);

    /// Rescales to unit norm. Throws InvalidStateError on the zero vector.
    static StateVector4 normalized(const std::array<Complex, kDim> &amplitudes);

    const Complex &operator[](size_t index) const {
        return amps_[index];
    }
    Complex amplitude(Polarization a, Polarization ap, Polarization b, Polarization bp) const {
        return amps_[basis_index(a, ap, b, bp)];
    }
    std::span<const Complex, kDim> amplitudes() const {
        return amps_;
    }

    double norm_squared() const;
    bool is_normalized(double tolerance = kExactTolerance) const;

   private:
    std::array<Complex, kDim> amps_;
};

/// 2x2 complex matrix acting on one polarization qubit, rows/cols ordered (H, V).
struct LocalUnitary {
    std::array<std::array<Complex, 2>, 2> m{};

    static LocalUnitary identity();
    /// H <-> V swap.
    static LocalUnitary pauli_x();
    /// Maps H, V onto +45/-45 linear polarization.
    static LocalUnitary hadamard();
    /// Phase e^{i theta} on the V component.
    static LocalUnitary v_phase(double theta);
    /// Haar-distributed U(2) element.
    static LocalUnitary haar_random(std::mt19937_64 &rng);

    LocalUnitary adjoint() const;
    LocalUnitary operator*(const LocalUnitary &other) const;
    bool is_unitary(double tolerance = kExactTolerance) const;
    Qubit apply(const Qubit &q) const;
};

/// Analyzer setting of one arm: an equatorial dichotomic observable with
/// eigenvectors (|V> + l e^{-i phi}|H>)/sqrt(2), or the H/V basis.
class MeasurementSetting {
   public:
    enum class Kind : uint8_t { kEquatorial, kComputational };

    /// Phase wrapped into [0, 2 pi).
    static MeasurementSetting equatorial(double phase);
    static MeasurementSetting computational();

    MeasurementSetting() = default;

    Kind kind() const {
        return kind_;
    }
    bool is_equatorial() const {
        return kind_ == Kind::kEquatorial;
    }
    /// Zero for computational settings.
    double phase() const {
        return phase_;
    }

    bool operator==(const MeasurementSetting &other) const = default;

   private:
    MeasurementSetting(Kind kind, double phase) : kind_(kind), phase_(phase) {
    }
    Kind kind_ = Kind::kEquatorial;
    double phase_ = 0;
};

using SettingsQuad = std::array<MeasurementSetting, 4>;

/// Measurement outcome label. Equatorial settings produce Plus/Minus
/// (eigenvalue +1/-1); computational settings produce H/V. Outcome index 0
/// is Plus or H, index 1 is Minus or V.
enum class Outcome : uint8_t { kPlus, kMinus, kH, kV };

using OutcomeQuad = std::array<Outcome, 4>;

int outcome_index(Outcome outcome);
/// +1 for Plus and H, -1 for Minus and V.
int eigenvalue(Outcome outcome);
bool outcome_matches(const MeasurementSetting &setting, Outcome outcome);
Outcome outcome_from_index(const MeasurementSetting &setting, int index);

/// Index 0..15 of an outcome quad, same ordering as basis_index.
size_t outcome_quad_index(const OutcomeQuad &outcomes);
/// Parity-style sign l_a l_a' l_b l_b' of outcome index k.
int outcome_parity(size_t outcome_index);
/// "+-+-" / "HVHV" style label; mixes symbols per arm when settings differ.
std::string outcome_label(const SettingsQuad &settings, size_t outcome_index);

enum class EprKind : uint8_t { kPsiMinus, kPsiPlus };

/// |Psi4> with signs derived from the bosonic source: 1/sqrt(3) on HHVV and
/// VVHH, -1/(2 sqrt(3)) on HVHV, HVVH, VHHV, VHVH.
StateVector4 canonical_psi4();
/// The same magnitudes with the singlet-product sign pattern
/// (HVVH and VHHV positive). Related to canonical_psi4 by V-phases of pi on
/// arms a and b'.
StateVector4 psi4_singlet_signs();
/// (HHVV + VVHH)/sqrt(2).
StateVector4 ghz4();
/// Two-qubit amplitudes indexed 2*x + x'.
std::array<Complex, 4> epr_pair(EprKind kind);
/// EPR_{aa'} (x) EPR_{bb'}.
StateVector4 epr_product(EprKind kind);

struct GhzEprDecomposition {
    Complex ghz_coef;
    Complex epr_coef;
    double residual_norm;
};

/// Projects onto ghz4() and epr_product(kind). Throws InvalidStateError on a
/// non-normalized input.
GhzEprDecomposition decompose_ghz_epr(const StateVector4 &state, EprKind kind = EprKind::kPsiPlus);

/// Eigenvector of a setting for the given outcome, as (amp_H, amp_V).
/// Throws std::invalid_argument when the outcome label does not fit the setting.
Qubit setting_eigenstate(const MeasurementSetting &setting, Outcome outcome);

double outcome_probability(const StateVector4 &state, const SettingsQuad &settings, const OutcomeQuad &outcomes);

/// Born-rule probabilities of all 16 outcomes, indexed like outcome_quad_index.
std::array<double, 16> outcome_distribution(const StateVector4 &state, const SettingsQuad &settings);

/// Unnormalized variant used for eavesdropper branches: same contraction
/// without the normalization precondition.
std::array<double, 16> outcome_weights(std::span<const Complex, 16> amplitudes, const SettingsQuad &settings);

/// U applied to one arm; the amplitudes need not be normalized.
std::array<Complex, 16> apply_on_arm(std::span<const Complex, 16> amplitudes, Arm arm, const LocalUnitary &u);

/// U (x) U (x) U (x) U. Throws std::invalid_argument for non-unitary U.
StateVector4 apply_identical_unitary(const StateVector4 &state, const LocalUnitary &u);

/// <s1|s2>.
Complex overlap(const StateVector4 &s1, const StateVector4 &s2);

}  // namespace fourphoton

#endif
