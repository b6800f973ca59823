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

#include "fourphoton/fit.h"

#include <cmath>
#include <vector>

#include "fourphoton/state.h"
#include "gtest/gtest.h"

using namespace fourphoton;

namespace {

std::vector<ScanPoint> sinusoid(int n, double amp, double delta, double offset, double sigma) {
    std::vector<ScanPoint> pts;
    for (int k = 0; k < n; k++) {
        const double phi = 2 * kPi * k / n;
        pts.push_back({phi, amp * std::cos(phi - delta) + offset, sigma});
    }
    return pts;
}

}  // namespace

TEST(fit, recovers_exact_sinusoid) {
    auto f = fit_scan(sinusoid(13, 0.793, 0.4, 0.01, 0.02));
    EXPECT_NEAR(f.visibility, 0.793, 1e-12);
    EXPECT_NEAR(f.phase_offset, 0.4, 1e-12);
    EXPECT_NEAR(f.offset, 0.01, 1e-12);
}

// For N equally spaced phases and common sigma, each of the cosine and sine
// coefficients has variance 2 sigma^2 / N.
TEST(fit, weighted_errors) {
    auto f = fit_scan(sinusoid(12, 0.8, 0, 0, 0.05));
    EXPECT_NEAR(f.visibility_error, 0.05 * std::sqrt(2.0 / 12), 1e-12);
    EXPECT_NEAR(f.offset_error, 0.05 / std::sqrt(12.0), 1e-12);
    EXPECT_NEAR(f.phase_offset_error, 0.05 * std::sqrt(2.0 / 12) / 0.8, 1e-12);
}

TEST(fit, unweighted_uses_residuals) {
    auto pts = sinusoid(8, 0.5, 0, 0, 0);
    auto exact = fit_scan(pts);
    EXPECT_NEAR(exact.visibility_error, 0, 1e-12);
    pts[0].value += 0.1;
    auto noisy = fit_scan(pts);
    EXPECT_GT(noisy.visibility_error, 0);
}

TEST(fit, needs_three_distinct_phases) {
    std::vector<ScanPoint> two{{0, 1, 0.1}, {1, 0.5, 0.1}};
    EXPECT_THROW(fit_scan(two), UnderdeterminedFitError);
    std::vector<ScanPoint> wrapped{{0, 1, 0.1}, {2 * kPi, 1, 0.1}, {1, 0.5, 0.1}};
    EXPECT_THROW(fit_scan(wrapped), UnderdeterminedFitError);
    std::vector<ScanPoint> three{{0, 1, 0.1}, {2, 0.5, 0.1}, {4, 0.2, 0.1}};
    EXPECT_NO_THROW(fit_scan(three));
}

TEST(fit, negative_amplitude_reports_positive_visibility) {
    auto f = fit_scan(sinusoid(9, -0.6, 0, 0, 0.01));
    EXPECT_NEAR(f.visibility, 0.6, 1e-12);
    EXPECT_NEAR(std::cos(f.phase_offset), -1, 1e-12);
}
