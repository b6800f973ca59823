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

#include "fourphoton/state.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

namespace fourphoton {

namespace {

// Arm a is the most significant bit of the basis index.
constexpr size_t arm_stride(Arm arm) {
    return size_t{1} << (3 - static_cast<size_t>(arm));
}

void require_normalized(const StateVector4 &state, const char *what) {
    if (!state.is_normalized()) {
        throw InvalidStateError(std::string(what) + ": state is not normalized (norm^2 = " +
                                std::to_string(state.norm_squared()) + ")");
    }
}

}  // namespace

std::string_view arm_name(Arm arm) {
    switch (arm) {
        case Arm::A:
            return "a";
        case Arm::APrime:
            return "ap";
        case Arm::B:
            return "b";
        case Arm::BPrime:
            return "bp";
    }
    return "?";
}

Arm parse_arm(std::string_view name) {
    if (name == "a") {
        return Arm::A;
    }
    if (name == "ap" || name == "a'") {
        return Arm::APrime;
    }
    if (name == "b") {
        return Arm::B;
    }
    if (name == "bp" || name == "b'") {
        return Arm::BPrime;
    }
    throw std::invalid_argument("unknown arm '" + std::string(name) + "' (expected a, ap, b, bp)");
}

size_t basis_index(std::string_view pattern) {
    if (pattern.size() != 4) {
        throw std::invalid_argument("polarization pattern must have 4 letters: '" + std::string(pattern) + "'");
    }
    size_t index = 0;
    for (char c : pattern) {
        index <<= 1;
        if (c == 'V') {
            index |= 1;
        } else if (c != 'H') {
            throw std::invalid_argument("polarization pattern may only contain H and V: '" + std::string(pattern) +
                                        "'");
        }
    }
    return index;
}

StateVector4::StateVector4() : amps_{} {
    amps_[0] = 1;
}

StateVector4::StateVector4(const std::array<Complex, kDim> &amplitudes) : amps_(amplitudes) {
}

StateVector4 StateVector4::normalized(const std::array<Complex, kDim> &amplitudes) {
    double n2 = 0;
    for (const auto &a : amplitudes) {
        n2 += std::norm(a);
    }
    if (n2 == 0) {
        throw InvalidStateError("cannot normalize the zero vector");
    }
    double inv = 1 / std::sqrt(n2);
    std::array<Complex, kDim> out;
    for (size_t k = 0; k < kDim; k++) {
        out[k] = amplitudes[k] * inv;
    }
    return StateVector4(out);
}

double StateVector4::norm_squared() const {
    double n2 = 0;
    for (const auto &a : amps_) {
        n2 += std::norm(a);
    }
    return n2;
}

bool StateVector4::is_normalized(double tolerance) const {
    return std::abs(norm_squared() - 1) <= tolerance;
}

LocalUnitary LocalUnitary::identity() {
    return {{{{1, 0}, {0, 1}}}};
}

LocalUnitary LocalUnitary::pauli_x() {
    return {{{{0, 1}, {1, 0}}}};
}

LocalUnitary LocalUnitary::hadamard() {
    double s = 1 / std::sqrt(2.0);
    return {{{{s, s}, {s, -s}}}};
}

LocalUnitary LocalUnitary::v_phase(double theta) {
    return {{{{1, 0}, {0, std::polar(1.0, theta)}}}};
}

LocalUnitary LocalUnitary::haar_random(std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> uniform(0, 2 * kPi);
    double q[4];
    double n2 = 0;
    do {
        n2 = 0;
        for (double &x : q) {
            x = gauss(rng);
            n2 += x * x;
        }
    } while (n2 == 0);
    double inv = 1 / std::sqrt(n2);
    Complex alpha(q[0] * inv, q[1] * inv);
    Complex beta(q[2] * inv, q[3] * inv);
    Complex phase = std::polar(1.0, uniform(rng));
    return {{{{phase * alpha, -phase * std::conj(beta)}, {phase * beta, phase * std::conj(alpha)}}}};
}

LocalUnitary LocalUnitary::adjoint() const {
    return {{{{std::conj(m[0][0]), std::conj(m[1][0])}, {std::conj(m[0][1]), std::conj(m[1][1])}}}};
}

LocalUnitary LocalUnitary::operator*(const LocalUnitary &other) const {
    LocalUnitary r;
    for (int i = 0; i < 2; i++) {
        for (int j = 0; j < 2; j++) {
            r.m[i][j] = m[i][0] * other.m[0][j] + m[i][1] * other.m[1][j];
        }
    }
    return r;
}

bool LocalUnitary::is_unitary(double tolerance) const {
    LocalUnitary p = adjoint() * *this;
    return std::abs(p.m[0][0] - 1.0) <= tolerance && std::abs(p.m[1][1] - 1.0) <= tolerance &&
           std::abs(p.m[0][1]) <= tolerance && std::abs(p.m[1][0]) <= tolerance;
}

Qubit LocalUnitary::apply(const Qubit &q) const {
    return {m[0][0] * q[0] + m[0][1] * q[1], m[1][0] * q[0] + m[1][1] * q[1]};
}

MeasurementSetting MeasurementSetting::equatorial(double phase) {
    double wrapped = std::fmod(phase, 2 * kPi);
    if (wrapped < 0) {
        wrapped += 2 * kPi;
    }
    if (wrapped >= 2 * kPi) {
        wrapped = 0;
    }
    return MeasurementSetting(Kind::kEquatorial, wrapped);
}

MeasurementSetting MeasurementSetting::computational() {
    return MeasurementSetting(Kind::kComputational, 0);
}

int outcome_index(Outcome outcome) {
    return (outcome == Outcome::kPlus || outcome == Outcome::kH) ? 0 : 1;
}

int eigenvalue(Outcome outcome) {
    return outcome_index(outcome) == 0 ? +1 : -1;
}

bool outcome_matches(const MeasurementSetting &setting, Outcome outcome) {
    bool pm = outcome == Outcome::kPlus || outcome == Outcome::kMinus;
    return setting.is_equatorial() == pm;
}

Outcome outcome_from_index(const MeasurementSetting &setting, int index) {
    if (setting.is_equatorial()) {
        return index == 0 ? Outcome::kPlus : Outcome::kMinus;
    }
    return index == 0 ? Outcome::kH : Outcome::kV;
}

size_t outcome_quad_index(const OutcomeQuad &outcomes) {
    size_t k = 0;
    for (Outcome o : outcomes) {
        k = 2 * k + static_cast<size_t>(outcome_index(o));
    }
    return k;
}

int outcome_parity(size_t outcome_index) {
    return (std::popcount(outcome_index & 15u) % 2 == 0) ? +1 : -1;
}

std::string outcome_label(const SettingsQuad &settings, size_t outcome_index) {
    std::string label(4, ' ');
    for (size_t x = 0; x < 4; x++) {
        bool second = (outcome_index >> (3 - x)) & 1;
        if (settings[x].is_equatorial()) {
            label[x] = second ? '-' : '+';
        } else {
            label[x] = second ? 'V' : 'H';
        }
    }
    return label;
}

StateVector4 canonical_psi4() {
    const double big = 1 / std::sqrt(3.0);
    const double small = -1 / (2 * std::sqrt(3.0));
    std::array<Complex, 16> amps{};
    amps[basis_index("HHVV")] = big;
    amps[basis_index("VVHH")] = big;
    amps[basis_index("HVHV")] = small;
    amps[basis_index("HVVH")] = small;
    amps[basis_index("VHHV")] = small;
    amps[basis_index("VHVH")] = small;
    return StateVector4(amps);
}

StateVector4 psi4_singlet_signs() {
    const double big = 1 / std::sqrt(3.0);
    const double half = 1 / (2 * std::sqrt(3.0));
    std::array<Complex, 16> amps{};
    amps[basis_index("HHVV")] = big;
    amps[basis_index("VVHH")] = big;
    amps[basis_index("HVHV")] = -half;
    amps[basis_index("HVVH")] = half;
    amps[basis_index("VHHV")] = half;
    amps[basis_index("VHVH")] = -half;
    return StateVector4(amps);
}

StateVector4 ghz4() {
    const double s = 1 / std::sqrt(2.0);
    std::array<Complex, 16> amps{};
    amps[basis_index("HHVV")] = s;
    amps[basis_index("VVHH")] = s;
    return StateVector4(amps);
}

std::array<Complex, 4> epr_pair(EprKind kind) {
    const double s = 1 / std::sqrt(2.0);
    // Index 2*x + x' with H=0: HV -> 1, VH -> 2.
    std::array<Complex, 4> amps{};
    amps[1] = s;
    amps[2] = kind == EprKind::kPsiMinus ? -s : s;
    return amps;
}

StateVector4 epr_product(EprKind kind) {
    auto pair = epr_pair(kind);
    std::array<Complex, 16> amps{};
    for (size_t i = 0; i < 4; i++) {
        for (size_t j = 0; j < 4; j++) {
            amps[4 * i + j] = pair[i] * pair[j];
        }
    }
    return StateVector4(amps);
}

GhzEprDecomposition decompose_ghz_epr(const StateVector4 &state, EprKind kind) {
    require_normalized(state, "decompose_ghz_epr");
    StateVector4 ghz = ghz4();
    StateVector4 epr = epr_product(kind);
    GhzEprDecomposition d;
    d.ghz_coef = overlap(ghz, state);
    d.epr_coef = overlap(epr, state);
    // GHZ and EPR (x) EPR have disjoint support, so the residual is what is
    // left after removing both projections.
    double r2 = 0;
    for (size_t k = 0; k < 16; k++) {
        Complex rest = state[k] - d.ghz_coef * ghz[k] - d.epr_coef * epr[k];
        r2 += std::norm(rest);
    }
    d.residual_norm = std::sqrt(r2);
    return d;
}

Qubit setting_eigenstate(const MeasurementSetting &setting, Outcome outcome) {
    if (!outcome_matches(setting, outcome)) {
        throw std::invalid_argument(setting.is_equatorial() ? "equatorial setting requires a +/- outcome"
                                                            : "computational setting requires an H/V outcome");
    }
    if (!setting.is_equatorial()) {
        return outcome == Outcome::kH ? Qubit{1, 0} : Qubit{0, 1};
    }
    const double s = 1 / std::sqrt(2.0);
    double l = eigenvalue(outcome);
    return {l * s * std::polar(1.0, -setting.phase()), s};
}

std::array<Complex, 16> apply_on_arm(std::span<const Complex, 16> amplitudes, Arm arm, const LocalUnitary &u) {
    std::array<Complex, 16> out;
    size_t stride = arm_stride(arm);
    for (size_t k = 0; k < 16; k++) {
        if (k & stride) {
            continue;
        }
        Complex h = amplitudes[k];
        Complex v = amplitudes[k | stride];
        out[k] = u.m[0][0] * h + u.m[0][1] * v;
        out[k | stride] = u.m[1][0] * h + u.m[1][1] * v;
    }
    return out;
}

std::array<double, 16> outcome_weights(std::span<const Complex, 16> amplitudes, const SettingsQuad &settings) {
    // Row i of each arm's matrix is the conjugated eigenvector of outcome i, so
    // the contracted amplitude at index k is <outcomes(k)|psi>.
    std::array<Complex, 16> amps;
    std::copy(amplitudes.begin(), amplitudes.end(), amps.begin());
    for (Arm arm : kArms) {
        const auto &setting = settings[static_cast<size_t>(arm)];
        LocalUnitary proj;
        for (int i = 0; i < 2; i++) {
            Qubit e = setting_eigenstate(setting, outcome_from_index(setting, i));
            proj.m[i][0] = std::conj(e[0]);
            proj.m[i][1] = std::conj(e[1]);
        }
        amps = apply_on_arm(amps, arm, proj);
    }
    std::array<double, 16> w;
    for (size_t k = 0; k < 16; k++) {
        w[k] = std::norm(amps[k]);
    }
    return w;
}

std::array<double, 16> outcome_distribution(const StateVector4 &state, const SettingsQuad &settings) {
    require_normalized(state, "outcome_distribution");
    return outcome_weights(state.amplitudes(), settings);
}

double outcome_probability(const StateVector4 &state, const SettingsQuad &settings, const OutcomeQuad &outcomes) {
    for (size_t x = 0; x < 4; x++) {
        if (!outcome_matches(settings[x], outcomes[x])) {
            throw std::invalid_argument("outcome label of arm " + std::string(arm_name(kArms[x])) +
                                        " does not match its setting");
        }
    }
    return outcome_distribution(state, settings)[outcome_quad_index(outcomes)];
}

StateVector4 apply_identical_unitary(const StateVector4 &state, const LocalUnitary &u) {
    if (!u.is_unitary()) {
        throw std::invalid_argument("apply_identical_unitary: matrix is not unitary");
    }
    std::array<Complex, 16> amps;
    std::copy(state.amplitudes().begin(), state.amplitudes().end(), amps.begin());
    for (Arm arm : kArms) {
        amps = apply_on_arm(amps, arm, u);
    }
    return StateVector4(amps);
}

Complex overlap(const StateVector4 &s1, const StateVector4 &s2) {
    Complex acc = 0;
    for (size_t k = 0; k < 16; k++) {
        acc += std::conj(s1[k]) * s2[k];
    }
    return acc;
}

}  // namespace fourphoton
