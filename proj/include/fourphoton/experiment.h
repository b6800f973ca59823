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

// Monte Carlo reproduction of the coincidence measurements: a noisy source,
// polarization analysis in each arm, two detectors per arm with their own
// efficiencies, and fourfold coincidence counting.

#ifndef FOURPHOTON_EXPERIMENT_H_
#define FOURPHOTON_EXPERIMENT_H_

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fourphoton/bell.h"
#include "fourphoton/correlation.h"
#include "fourphoton/exec.h"
#include "fourphoton/fit.h"
#include "fourphoton/state.h"

namespace fourphoton {

/// All source degradation collapsed into one visibility: with probability V
/// the emission follows the state, otherwise all 16 outcomes are equally likely.
struct NoiseModel {
    double visibility = 1.0;

    void validate() const;
};

/// Detection efficiency per (arm, port). Port 0 is the transmitted output of
/// the polarizing splitter (outcome + or H), port 1 the reflected one (- or V).
struct DetectorBank {
    std::array<std::array<double, 2>, 4> efficiency{{{1, 1}, {1, 1}, {1, 1}, {1, 1}}};

    static DetectorBank ideal() {
        return {};
    }
    /// Throws std::invalid_argument unless every efficiency lies in [0, 1].
    void validate() const;
    bool is_ideal() const;
    /// Product of the four detector efficiencies addressed by an outcome index.
    double fourfold_efficiency(size_t outcome_index) const;

    bool operator==(const DetectorBank &other) const = default;
};

struct CannotCorrectError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct CoincidenceFrame {
    SettingsQuad settings{};
    std::array<uint64_t, 16> counts{};
    uint64_t emissions_attempted = 0;
    DetectorBank bank;
    uint64_t seed = 0;
    uint64_t stream = 0;

    uint64_t total() const;
};

std::array<double, 16> mixture_distribution(const StateVector4 &state, const SettingsQuad &settings,
                                            const NoiseModel &noise);

/// Counting kernel: n_emissions draws from `distribution`, each kept only if
/// all four addressed detectors fire.
std::array<uint64_t, 16> sample_counts(std::span<const double, 16> distribution, const DetectorBank &bank,
                                       uint64_t n_emissions, uint64_t seed, uint64_t stream, Exec exec);

CoincidenceFrame sample_frame(const StateVector4 &state, const SettingsQuad &settings, const NoiseModel &noise,
                              const DetectorBank &bank, uint64_t n_emissions, uint64_t seed, uint64_t stream = 0,
                              Exec exec = Exec::kParallel);

/// Counts divided by their fourfold efficiency and renormalized to
/// probabilities. Throws CannotCorrectError if any efficiency is zero and
/// InsufficientDataError for an empty frame.
std::array<double, 16> efficiency_correct(const CoincidenceFrame &frame);

/// Correlation estimate from one frame, from raw counts or efficiency-corrected
/// rates. All four settings must be equatorial.
CorrelationEstimate correlation_estimate(const CoincidenceFrame &frame, bool efficiency_corrected = false);

struct ScanEntry {
    double phase = 0;
    CorrelationEstimate estimate;
    CoincidenceFrame frame;
};

/// phi_a sweep with phi_a' = phi_b = phi_b' = 0.
struct ScanDataset {
    std::vector<ScanEntry> points;

    std::vector<ScanPoint> fit_points() const;
};

/// `steps` equally spaced phases on [0, 2 pi); frame k uses stream k.
ScanDataset run_scan(const StateVector4 &state, const NoiseModel &noise, const DetectorBank &bank, int steps,
                     uint64_t events_per_point, uint64_t seed, Exec exec = Exec::kParallel);

struct BellRunResult {
    BellSettings settings;
    /// Indexed like ETable.
    std::array<CoincidenceFrame, 16> frames;
    ETable table;
    double s = 0;
    double s_error = 0;
    bool corrected = false;
};

/// Samples all 16 setting combinations (frame i uses stream i) and evaluates
/// the Bell functional from raw counts or corrected rates.
BellRunResult run_bell(const StateVector4 &state, const NoiseModel &noise, const DetectorBank &bank,
                       const BellSettings &settings, uint64_t events_per_frame, uint64_t seed, bool corrected,
                       Exec exec = Exec::kParallel);

/// Rebuilds the table and S from stored frames.
BellRunResult evaluate_bell_frames(const BellSettings &settings, const std::array<CoincidenceFrame, 16> &frames,
                                   bool corrected);

/// Presentation helper: fourfold events to hours of integration at the
/// reported rate of roughly 150 fourfolds per hour.
double fourfolds_to_hours(uint64_t events, double fourfolds_per_hour = 150);

}  // namespace fourphoton

#endif
