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
#include <random>

#include "gtest/gtest.h"

using namespace fourphoton;

namespace {

ModeOccupation occ(std::initializer_list<int> n) {
    ModeOccupation m{};
    size_t i = 0;
    for (int v : n) {
        m[i++] = static_cast<uint8_t>(v);
    }
    return m;
}

}  // namespace

// (aH bV - aV bH)^2 |0> = aH^2 bV^2 + aV^2 bH^2 - 2 aH aV bH bV on vacuum;
// the squared operators pick up sqrt(2) sqrt(2) = 2, giving 2, 2, -2 before
// normalization by sqrt(12).
TEST(fock, two_pair_source_amplitudes) {
    FockVector src = two_pair_source();
    const double third = 1 / std::sqrt(3.0);
    EXPECT_EQ(src.terms.size(), 3u);
    EXPECT_NEAR(src.amplitude(occ({2, 0, 0, 0, 0, 2, 0, 0})).real(), third, 1e-15);
    EXPECT_NEAR(src.amplitude(occ({0, 2, 0, 0, 2, 0, 0, 0})).real(), third, 1e-15);
    EXPECT_NEAR(src.amplitude(occ({1, 1, 0, 0, 1, 1, 0, 0})).real(), -third, 1e-15);
    EXPECT_NEAR(src.norm_squared(), 1, 1e-15);
}

TEST(fock, splitter_preserves_norm_and_photon_number) {
    FockVector arms = apply_beam_splitters(two_pair_source(), {});
    EXPECT_EQ(arms.mode_set, ModeSet::kArms);
    EXPECT_NEAR(arms.norm_squared(), 1, 1e-12);
    for (const auto &[m, c] : arms.terms) {
        int n = 0;
        for (auto x : m) {
            n += x;
        }
        EXPECT_EQ(n, 4);
    }
}

TEST(fock, oracle_matches_canonical_state) {
    Postselection post = oracle_state();
    ASSERT_TRUE(post.state.has_value());
    EXPECT_NEAR(post.success_probability, 0.25, 1e-12);
    const StateVector4 ref = canonical_psi4();
    for (size_t k = 0; k < 16; k++) {
        EXPECT_NEAR(std::abs((*post.state)[k] - ref[k]), 0, 1e-12) << k;
    }
}

TEST(fock, compensation_yields_singlet_signs) {
    SplitterConvention conv;
    conv.compensation = singlet_sign_compensation();
    Postselection post = oracle_state(conv);
    ASSERT_TRUE(post.state.has_value());
    const StateVector4 ref = psi4_singlet_signs();
    for (size_t k = 0; k < 16; k++) {
        EXPECT_NEAR(std::abs((*post.state)[k] - ref[k]), 0, 1e-12) << k;
    }
}

TEST(fock, complex_splitter_phases_keep_the_state_up_to_local_phases) {
    SplitterConvention conv;
    conv.reflection = Complex(0, 1 / std::sqrt(2.0));
    Postselection post = oracle_state(conv);
    ASSERT_TRUE(post.state.has_value());
    EXPECT_NEAR(post.success_probability, 0.25, 1e-12);
    // Each term has exactly one photon in a' and one in b', so a common
    // reflection phase is global.
    EXPECT_NEAR(std::abs(overlap(*post.state, canonical_psi4())), 1, 1e-12);
}

TEST(fock, rejects_bad_inputs) {
    SplitterConvention lossy;
    lossy.transmission = 0.9;
    EXPECT_THROW(apply_beam_splitters(two_pair_source(), lossy), std::invalid_argument);
    FockVector arms = apply_beam_splitters(two_pair_source(), {});
    EXPECT_THROW(apply_beam_splitters(arms, {}), std::invalid_argument);
    EXPECT_THROW(postselect_one_per_arm(two_pair_source()), std::invalid_argument);
    LocalUnitary bad;
    bad.m = {{{2, 0}, {0, 1}}};
    EXPECT_THROW(rotate_source_polarization(two_pair_source(), bad), std::invalid_argument);
}

TEST(fock, empty_postselection) {
    FockVector v;
    v.mode_set = ModeSet::kArms;
    v.terms[occ({2, 0, 0, 0, 2, 0, 0, 0})] = 1;
    Postselection post = postselect_one_per_arm(v);
    EXPECT_FALSE(post.state.has_value());
    EXPECT_EQ(post.success_probability, 0);
}

// A common polarization rotation at the source commutes with the splitters,
// so post-selection yields U^{x4} applied to the canonical state.
TEST(fock, source_rotation_commutes_with_postselection) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 20; i++) {
        auto u = LocalUnitary::haar_random(rng);
        FockVector rotated = rotate_source_polarization(two_pair_source(), u);
        EXPECT_NEAR(rotated.norm_squared(), 1, 1e-12);
        Postselection post = postselect_one_per_arm(apply_beam_splitters(rotated, {}));
        ASSERT_TRUE(post.state.has_value());
        EXPECT_NEAR(post.success_probability, 0.25, 1e-12);
        EXPECT_NEAR(std::abs(overlap(*post.state, apply_identical_unitary(canonical_psi4(), u))), 1, 1e-10);
        EXPECT_NEAR(std::abs(overlap(*post.state, canonical_psi4())), 1, 1e-10);
    }
}
