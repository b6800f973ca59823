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

#include "fourphoton/fock.h"

#include <cmath>
#include <stdexcept>

namespace fourphoton {

namespace {

// Polynomial in creation operators; the key holds the exponent of each mode.
using Polynomial = std::map<ModeOccupation, Complex>;

double sqrt_factorial(int n) {
    double f = 1;
    for (int k = 2; k <= n; k++) {
        f *= k;
    }
    return std::sqrt(f);
}

Polynomial multiply(const Polynomial &x, const Polynomial &y) {
    Polynomial out;
    for (const auto &[mx, cx] : x) {
        for (const auto &[my, cy] : y) {
            ModeOccupation m;
            for (size_t i = 0; i < kNumModes; i++) {
                m[i] = static_cast<uint8_t>(mx[i] + my[i]);
            }
            out[m] += cx * cy;
        }
    }
    return out;
}

Polynomial linear_form(const std::array<Complex, kNumModes> &coefficients) {
    Polynomial p;
    for (size_t i = 0; i < kNumModes; i++) {
        if (coefficients[i] != Complex(0)) {
            ModeOccupation m{};
            m[i] = 1;
            p[m] = coefficients[i];
        }
    }
    return p;
}

Polynomial monomial(size_t mode) {
    ModeOccupation m{};
    m[mode] = 1;
    return {{m, 1.0}};
}

Polynomial constant_one() {
    return {{ModeOccupation{}, 1.0}};
}

FockVector on_vacuum(const Polynomial &p, ModeSet mode_set) {
    FockVector out;
    out.mode_set = mode_set;
    for (const auto &[m, c] : p) {
        double f = 1;
        for (uint8_t n : m) {
            f *= sqrt_factorial(n);
        }
        out.terms[m] += c * f;
    }
    return out.pruned();
}

FockVector normalized(FockVector v) {
    double inv = 1 / std::sqrt(v.norm_squared());
    for (auto &[m, c] : v.terms) {
        c *= inv;
    }
    return v;
}

// Substitutes a_i^dag -> sum_j columns[i][j] b_j^dag in every term.
FockVector transform_modes(const FockVector &in, const std::array<std::array<Complex, kNumModes>, kNumModes> &columns,
                           ModeSet out_set) {
    std::array<Polynomial, kNumModes> images;
    for (size_t i = 0; i < kNumModes; i++) {
        images[i] = linear_form(columns[i]);
    }
    Polynomial total;
    for (const auto &[occ, amp] : in.terms) {
        double denom = 1;
        Polynomial term = constant_one();
        for (size_t i = 0; i < kNumModes; i++) {
            denom *= sqrt_factorial(occ[i]);
            for (int k = 0; k < occ[i]; k++) {
                term = multiply(term, images[i]);
            }
        }
        for (const auto &[m, c] : term) {
            total[m] += amp * c / denom;
        }
    }
    return on_vacuum(total, out_set);
}

void require_source(const FockVector &v, const char *what) {
    if (v.mode_set != ModeSet::kSource) {
        throw std::invalid_argument(std::string(what) + ": expected a source-mode state");
    }
    for (const auto &[m, c] : v.terms) {
        for (Arm arm : {Arm::APrime, Arm::BPrime}) {
            if (m[mode_slot(arm, Polarization::H)] || m[mode_slot(arm, Polarization::V)]) {
                throw std::invalid_argument(std::string(what) + ": source state occupies an output-only mode");
            }
        }
    }
}

}  // namespace

double FockVector::norm_squared() const {
    double n2 = 0;
    for (const auto &[m, c] : terms) {
        n2 += std::norm(c);
    }
    return n2;
}

FockVector FockVector::pruned(double tolerance) const {
    FockVector out;
    out.mode_set = mode_set;
    for (const auto &[m, c] : terms) {
        if (std::abs(c) > tolerance) {
            out.terms.emplace(m, c);
        }
    }
    return out;
}

Complex FockVector::amplitude(const ModeOccupation &occupation) const {
    auto it = terms.find(occupation);
    return it == terms.end() ? Complex(0) : it->second;
}

bool SplitterConvention::is_balanced_unitary(double tolerance) const {
    return std::abs(std::norm(transmission) - 0.5) <= tolerance && std::abs(std::norm(reflection) - 0.5) <= tolerance;
}

std::array<double, 4> singlet_sign_compensation() {
    return {1.5 * kPi, 0.5 * kPi, 0.5 * kPi, 1.5 * kPi};
}

FockVector two_pair_source() {
    const size_t aH = mode_slot(Arm::A, Polarization::H);
    const size_t aV = mode_slot(Arm::A, Polarization::V);
    const size_t bH = mode_slot(Arm::B, Polarization::H);
    const size_t bV = mode_slot(Arm::B, Polarization::V);
    Polynomial pair = multiply(monomial(aH), monomial(bV));
    for (const auto &[m, c] : multiply(monomial(aV), monomial(bH))) {
        pair[m] -= c;
    }
    return normalized(on_vacuum(multiply(pair, pair), ModeSet::kSource));
}

FockVector rotate_source_polarization(const FockVector &source, const LocalUnitary &u) {
    require_source(source, "rotate_source_polarization");
    if (!u.is_unitary()) {
        throw std::invalid_argument("rotate_source_polarization: matrix is not unitary");
    }
    std::array<std::array<Complex, kNumModes>, kNumModes> columns{};
    for (size_t i = 0; i < kNumModes; i++) {
        columns[i][i] = 1;
    }
    for (Arm arm : {Arm::A, Arm::B}) {
        for (int j = 0; j < 2; j++) {
            auto &col = columns[mode_slot(arm, static_cast<Polarization>(j))];
            col = {};
            // a_j^dag -> sum_i U_ij a_i^dag
            for (int i = 0; i < 2; i++) {
                col[mode_slot(arm, static_cast<Polarization>(i))] = u.m[i][j];
            }
        }
    }
    return transform_modes(source, columns, ModeSet::kSource);
}

FockVector apply_beam_splitters(const FockVector &source, const SplitterConvention &conv) {
    require_source(source, "apply_beam_splitters");
    if (!conv.is_balanced_unitary()) {
        throw std::invalid_argument("apply_beam_splitters: splitter must satisfy |t|^2 = |r|^2 = 1/2");
    }
    auto out_coef = [&](Arm arm, Polarization pol, Complex c) {
        if (pol == Polarization::V) {
            c *= std::polar(1.0, conv.compensation[static_cast<size_t>(arm)]);
        }
        return c;
    };
    std::array<std::array<Complex, kNumModes>, kNumModes> columns{};
    for (auto [in, out_r] : {std::pair{Arm::A, Arm::APrime}, std::pair{Arm::B, Arm::BPrime}}) {
        for (Polarization pol : {Polarization::H, Polarization::V}) {
            auto &col = columns[mode_slot(in, pol)];
            col[mode_slot(in, pol)] = out_coef(in, pol, conv.transmission);
            col[mode_slot(out_r, pol)] = out_coef(out_r, pol, conv.reflection);
        }
    }
    FockVector out = transform_modes(source, columns, ModeSet::kArms);
    return out;
}

Postselection postselect_one_per_arm(const FockVector &arms) {
    if (arms.mode_set != ModeSet::kArms) {
        throw std::invalid_argument("postselect_one_per_arm: expected an output-arm state");
    }
    std::array<Complex, 16> amps{};
    double kept = 0;
    for (const auto &[m, c] : arms.terms) {
        size_t index = 0;
        bool one_each = true;
        for (Arm arm : kArms) {
            int h = m[mode_slot(arm, Polarization::H)];
            int v = m[mode_slot(arm, Polarization::V)];
            if (h + v != 1) {
                one_each = false;
                break;
            }
            index = 2 * index + static_cast<size_t>(v);
        }
        if (one_each) {
            amps[index] += c;
            kept += std::norm(c);
        }
    }
    Postselection result;
    double total = arms.norm_squared();
    result.success_probability = total > 0 ? kept / total : 0;
    if (kept > 0) {
        result.state = StateVector4::normalized(amps);
    }
    return result;
}

Postselection oracle_state(const SplitterConvention &conv) {
    return postselect_one_per_arm(apply_beam_splitters(two_pair_source(), conv));
}

}  // namespace fourphoton
