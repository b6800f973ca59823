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

#include "fourphoton/experiment.h"

#include <cmath>

#include "gtest/gtest.h"

using namespace fourphoton;

namespace {

SettingsQuad equatorial(double a, double ap, double b, double bp) {
    return SettingQuad(a, ap, b, bp).settings();
}

DetectorBank half_minus_bank() {
    DetectorBank bank;
    for (auto &arm : bank.efficiency) {
        arm = {1.0, 0.5};
    }
    return bank;
}

}  // namespace

TEST(experiment, mixture_distribution) {
    auto s = equatorial(0.2, 0.4, 1.0, 3.0);
    auto pure = outcome_distribution(canonical_psi4(), s);
    auto mixed = mixture_distribution(canonical_psi4(), s, {0.6});
    for (size_t k = 0; k < 16; k++) {
        EXPECT_NEAR(mixed[k], 0.6 * pure[k] + 0.4 / 16, 1e-15);
    }
    EXPECT_THROW(mixture_distribution(canonical_psi4(), s, {1.2}), std::invalid_argument);
}

TEST(experiment, bank_validation) {
    DetectorBank bank;
    EXPECT_TRUE(bank.is_ideal());
    bank.efficiency[2][1] = 1.5;
    EXPECT_THROW(bank.validate(), std::invalid_argument);
    bank.efficiency[2][1] = 0;
    EXPECT_NO_THROW(bank.validate());
    bank = half_minus_bank();
    EXPECT_FALSE(bank.is_ideal());
    EXPECT_EQ(bank.fourfold_efficiency(0), 1);
    EXPECT_EQ(bank.fourfold_efficiency(0b0011), 0.25);
    EXPECT_EQ(bank.fourfold_efficiency(0b1111), 0.0625);
}

TEST(experiment, sampling_is_deterministic_and_thread_independent) {
    auto dist = mixture_distribution(canonical_psi4(), equatorial(0, 1, 2, 3), {0.8});
    auto bank = half_minus_bank();
    auto a = sample_counts(dist, bank, 50000, 17, 3, Exec::kSerial);
    auto b = sample_counts(dist, bank, 50000, 17, 3, Exec::kParallel);
    auto c = sample_counts(dist, bank, 50000, 17, 3, Exec::kParallel);
    EXPECT_EQ(a, b);
    EXPECT_EQ(b, c);
    EXPECT_NE(a, sample_counts(dist, bank, 50000, 18, 3, Exec::kSerial));
    EXPECT_NE(a, sample_counts(dist, bank, 50000, 17, 4, Exec::kSerial));
}

TEST(experiment, ideal_bank_keeps_every_emission) {
    auto f = sample_frame(canonical_psi4(), equatorial(0, 0, 0, 0), {1.0}, DetectorBank::ideal(), 12345, 1);
    EXPECT_EQ(f.total(), 12345u);
    EXPECT_EQ(f.emissions_attempted, 12345u);
    EXPECT_THROW(sample_frame(canonical_psi4(), equatorial(0, 0, 0, 0), {1.0}, {}, 0, 1), std::invalid_argument);
}

TEST(experiment, counts_follow_distribution) {
    auto s = SettingsQuad{MeasurementSetting::computational(), MeasurementSetting::computational(),
                          MeasurementSetting::computational(), MeasurementSetting::computational()};
    const uint64_t n = 200000;
    auto f = sample_frame(canonical_psi4(), s, {1.0}, {}, n, 5);
    auto p = outcome_distribution(canonical_psi4(), s);
    for (size_t k = 0; k < 16; k++) {
        const double sigma = std::sqrt(n * p[k] * (1 - p[k])) + 1e-9;
        EXPECT_LE(std::abs(f.counts[k] - n * p[k]), 5 * sigma) << k;
    }
}

TEST(experiment, detector_losses_follow_efficiencies) {
    auto s = equatorial(0.3, 0.3, 1.2, 2.0);
    auto dist = mixture_distribution(canonical_psi4(), s, {0.9});
    auto bank = half_minus_bank();
    const uint64_t n = 200000;
    auto f = sample_frame(canonical_psi4(), s, {0.9}, bank, n, 6);
    double keep = 0;
    for (size_t k = 0; k < 16; k++) {
        keep += dist[k] * bank.fourfold_efficiency(k);
    }
    EXPECT_NEAR(static_cast<double>(f.total()) / n, keep, 5 * std::sqrt(keep * (1 - keep) / n));
    auto corrected = efficiency_correct(f);
    for (size_t k = 0; k < 16; k++) {
        EXPECT_NEAR(corrected[k], dist[k], 0.01) << k;
    }
}

TEST(experiment, correction_errors) {
    CoincidenceFrame empty;
    empty.settings = equatorial(0, 0, 0, 0);
    EXPECT_THROW(efficiency_correct(empty), InsufficientDataError);
    EXPECT_THROW(correlation_estimate(empty), InsufficientDataError);
    CoincidenceFrame dead = empty;
    dead.counts[0] = 10;
    dead.bank.efficiency[1][0] = 0;
    EXPECT_THROW(efficiency_correct(dead), CannotCorrectError);
    EXPECT_THROW(correlation_estimate(dead, true), CannotCorrectError);
    EXPECT_NO_THROW(correlation_estimate(dead, false));
    CoincidenceFrame hv = dead;
    hv.settings[0] = MeasurementSetting::computational();
    EXPECT_THROW(correlation_estimate(hv), std::invalid_argument);
}

TEST(experiment, estimate_tracks_exact_correlation) {
    SettingQuad q(0.5, 0.1, 1.3, 0.2);
    auto f = sample_frame(canonical_psi4(), q.settings(), {0.793}, {}, 100000, 8);
    auto e = correlation_estimate(f);
    const double exact = correlation_exact(canonical_psi4(), q, 0.793);
    EXPECT_NEAR(e.value, exact, 4 * e.std_error);
    EXPECT_NEAR(e.std_error, std::sqrt((1 - e.value * e.value) / 100000), 1e-12);
}

// Raw counts from a bank favouring + outcomes bias every E; the expectation
// of the raw estimator is sum l p eta / sum p eta, which gives this S.
TEST(experiment, asymmetric_bank_raw_expectation) {
    const BellSettings settings = paper_optimal_settings();
    const DetectorBank bank = half_minus_bank();
    ETable raw;
    for (size_t i = 0; i < 16; i++) {
        auto p = mixture_distribution(canonical_psi4(), settings.quad(i).settings(), {0.793});
        double num = 0, den = 0;
        for (size_t k = 0; k < 16; k++) {
            num += outcome_parity(k) * p[k] * bank.fourfold_efficiency(k);
            den += p[k] * bank.fourfold_efficiency(k);
        }
        raw.values[i] = num / den;
    }
    EXPECT_NEAR(bell_functional(raw), 1.3432330667321124, 1e-12);
    EXPECT_LT(bell_functional(raw), 0.793 * 1.8856180831641267);
}

TEST(experiment, bell_run_statistics) {
    auto run = run_bell(canonical_psi4(), {0.793}, {}, paper_optimal_settings(), 20000, 12, false);
    EXPECT_NEAR(run.s, 0.793 * 1.8856180831641267, 3 * run.s_error);
    EXPECT_FALSE(run.corrected);
    for (size_t i = 0; i < 16; i++) {
        EXPECT_EQ(run.frames[i].stream, i);
        EXPECT_EQ(run.frames[i].total(), 20000u);
    }
    auto again = evaluate_bell_frames(run.settings, run.frames, false);
    EXPECT_EQ(again.s, run.s);
    EXPECT_EQ(again.s_error, run.s_error);
    auto serial = run_bell(canonical_psi4(), {0.793}, {}, paper_optimal_settings(), 20000, 12, false, Exec::kSerial);
    EXPECT_EQ(serial.s, run.s);
}

TEST(experiment, correction_removes_bank_bias) {
    auto bank = half_minus_bank();
    auto raw = run_bell(canonical_psi4(), {0.793}, bank, paper_optimal_settings(), 40000, 21, false);
    auto corrected = evaluate_bell_frames(raw.settings, raw.frames, true);
    EXPECT_NEAR(corrected.s, 0.793 * 1.8856180831641267, 4 * corrected.s_error);
    EXPECT_NEAR(raw.s, 1.3432330667321124, 4 * raw.s_error);
}

TEST(experiment, scan_fit) {
    auto ds = run_scan(canonical_psi4(), {0.793}, {}, 13, 10000, 3);
    ASSERT_EQ(ds.points.size(), 13u);
    for (size_t k = 0; k < 13; k++) {
        EXPECT_NEAR(ds.points[k].phase, 2 * kPi * k / 13, 1e-15);
        EXPECT_EQ(ds.points[k].frame.stream, k);
    }
    auto fit = fit_scan(ds.fit_points());
    EXPECT_NEAR(fit.visibility, 0.793, 4 * fit.visibility_error);
    EXPECT_THROW(run_scan(canonical_psi4(), {0.793}, {}, 2, 100, 3), std::invalid_argument);
}

TEST(experiment, hours_conversion) {
    EXPECT_NEAR(fourfolds_to_hours(600), 4, 1e-15);
    EXPECT_NEAR(fourfolds_to_hours(300, 100), 3, 1e-15);
}
