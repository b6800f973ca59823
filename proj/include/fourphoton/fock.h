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

// Brute-force bosonic derivation of the post-selected four-photon state.
//
// States are sparse maps from mode occupations to amplitudes. Creation
// operators carry the usual sqrt(n+1) factors, so a term with occupation n
// stands for prod_i (a_i^dag)^{n_i} / sqrt(n_i!) |0>. Linear optics is applied
// by substituting each input creation operator with a linear form over the
// output creation operators and re-expanding.

#ifndef FOURPHOTON_FOCK_H_
#define FOURPHOTON_FOCK_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>

#include "fourphoton/state.h"

namespace fourphoton {

/// Mode slots, in this order:
///   0 a H, 1 a V, 2 a' H, 3 a' V, 4 b H, 5 b V, 6 b' H, 7 b' V.
/// Source states (before the splitters) use only the a and b slots, which
/// then stand for the emission modes a0 and b0.
inline constexpr size_t kNumModes = 8;

enum class ModeSet : uint8_t { kSource, kArms };

using ModeOccupation = std::array<uint8_t, kNumModes>;

constexpr size_t mode_slot(Arm arm, Polarization pol) {
    return 2 * static_cast<size_t>(arm) + static_cast<size_t>(pol);
}

struct FockVector {
    ModeSet mode_set = ModeSet::kSource;
    std::map<ModeOccupation, Complex> terms;

    double norm_squared() const;
    /// Drops terms whose magnitude is below tolerance.
    FockVector pruned(double tolerance = 1e-15) const;
    Complex amplitude(const ModeOccupation &occupation) const;
};

/// 50-50 splitter sending source mode x0 to arms x (transmission) and x'
/// (reflection), identically for both polarizations, followed by a phase
/// e^{i theta} on the V mode of each output arm.
struct SplitterConvention {
    Complex transmission{1 / 1.4142135623730951, 0};
    Complex reflection{1 / 1.4142135623730951, 0};
    /// Indexed by Arm.
    std::array<double, 4> compensation{};

    /// True when |t|^2 = |r|^2 = 1/2 within tolerance.
    bool is_balanced_unitary(double tolerance = kExactTolerance) const;
};

/// Compensation phases that map the raw post-selected state onto
/// psi4_singlet_signs() under the default splitter.
std::array<double, 4> singlet_sign_compensation();

/// (a0H^dag b0V^dag - a0V^dag b0H^dag)^2 |0>, normalized. Supported on
/// |2 a0H, 2 b0V>, |a0H a0V b0H b0V>, |2 a0V, 2 b0H>.
FockVector two_pair_source();

/// Identical polarization rotation U on a0 and b0. Requires a source state.
FockVector rotate_source_polarization(const FockVector &source, const LocalUnitary &u);

/// Throws std::invalid_argument for a non-source input or an unbalanced splitter.
FockVector apply_beam_splitters(const FockVector &source, const SplitterConvention &conv);

struct Postselection {
    /// Empty when no term has one photon per arm.
    std::optional<StateVector4> state;
    double success_probability = 0;
};

/// Keeps the occupations with exactly one photon in each of a, a', b, b' and
/// reads the polarizations off as qubits.
Postselection postselect_one_per_arm(const FockVector &arms);

/// two_pair_source -> apply_beam_splitters -> postselect_one_per_arm.
Postselection oracle_state(const SplitterConvention &conv = {});

}  // namespace fourphoton

#endif
