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

#include <algorithm>
#include <cmath>
#include <string>

#include "fourphoton/rng.h"

namespace fourphoton {

namespace {

struct OutcomeSampler {
    std::array<double, 16> cdf{};
    size_t last_nonzero = 0;

    explicit OutcomeSampler(std::span<const double, 16> p) {
        double acc = 0;
        for (size_t k = 0; k < 16; k++) {
            acc += p[k];
            cdf[k] = acc;
            if (p[k] > 0) {
                last_nonzero = k;
            }
        }
    }

    size_t draw(double u) const {
        // u is scaled by the total so unnormalized weights work too.
        u *= cdf[15];
        for (size_t k = 0; k < last_nonzero; k++) {
            if (u < cdf[k]) {
                return k;
            }
        }
        return last_nonzero;
    }
};

int port(size_t outcome_index, size_t arm) {
    return static_cast<int>((outcome_index >> (3 - arm)) & 1);
}

std::array<uint64_t, 16> sample_block(const OutcomeSampler &sampler, const DetectorBank &bank, uint64_t count,
                                      uint64_t seed, uint64_t stream, uint64_t block) {
    std::array<uint64_t, 16> counts{};
    auto rng = block_generator(seed, stream, block);
    for (uint64_t e = 0; e < count; e++) {
        size_t k = sampler.draw(uniform01(rng));
        bool detected = true;
        for (size_t x = 0; x < 4; x++) {
            // Always draw all four so the stream layout is fixed.
            if (!(uniform01(rng) < bank.efficiency[x][port(k, x)])) {
                detected = false;
            }
        }
        if (detected) {
            counts[k]++;
        }
    }
    return counts;
}

}  // namespace

void NoiseModel::validate() const {
    if (!(visibility >= 0 && visibility <= 1)) {
        throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(visibility));
    }
}

void DetectorBank::validate() const {
    for (const auto &arm : efficiency) {
        for (double eta : arm) {
            if (!(eta >= 0 && eta <= 1)) {
                throw std::invalid_argument("detector efficiency must lie in [0, 1], got " + std::to_string(eta));
            }
        }
    }
}

bool DetectorBank::is_ideal() const {
    return *this == ideal();
}

double DetectorBank::fourfold_efficiency(size_t outcome_index) const {
    double p = 1;
    for (size_t x = 0; x < 4; x++) {
        p *= efficiency[x][port(outcome_index, x)];
    }
    return p;
}

uint64_t CoincidenceFrame::total() const {
    uint64_t n = 0;
    for (uint64_t c : counts) {
        n += c;
    }
    return n;
}

std::array<double, 16> mixture_distribution(const StateVector4 &state, const SettingsQuad &settings,
                                            const NoiseModel &noise) {
    noise.validate();
    auto p = outcome_distribution(state, settings);
    for (double &v : p) {
        v = noise.visibility * v + (1 - noise.visibility) / 16;
    }
    return p;
}

std::array<uint64_t, 16> sample_counts(std::span<const double, 16> distribution, const DetectorBank &bank,
                                       uint64_t n_emissions, uint64_t seed, uint64_t stream, Exec exec) {
    bank.validate();
    OutcomeSampler sampler(distribution);
    const uint64_t blocks = (n_emissions + kBlockSize - 1) / kBlockSize;
    std::vector<std::array<uint64_t, 16>> per_block(blocks);
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::kParallel)
    for (int64_t b = 0; b < static_cast<int64_t>(blocks); b++) {
        uint64_t begin = static_cast<uint64_t>(b) * kBlockSize;
        uint64_t count = std::min(kBlockSize, n_emissions - begin);
        per_block[static_cast<size_t>(b)] =
            sample_block(sampler, bank, count, seed, stream, static_cast<uint64_t>(b));
    }
    std::array<uint64_t, 16> counts{};
    for (const auto &c : per_block) {
        for (size_t k = 0; k < 16; k++) {
            counts[k] += c[k];
        }
    }
    return counts;
}

CoincidenceFrame sample_frame(const StateVector4 &state, const SettingsQuad &settings, const NoiseModel &noise,
                              const DetectorBank &bank, uint64_t n_emissions, uint64_t seed, uint64_t stream,
                              Exec exec) {
    if (n_emissions == 0) {
        throw std::invalid_argument("sample_frame: n_emissions must be positive");
    }
    auto p = mixture_distribution(state, settings, noise);
    CoincidenceFrame frame;
    frame.settings = settings;
    frame.counts = sample_counts(p, bank, n_emissions, seed, stream, exec);
    frame.emissions_attempted = n_emissions;
    frame.bank = bank;
    frame.seed = seed;
    frame.stream = stream;
    return frame;
}

std::array<double, 16> efficiency_correct(const CoincidenceFrame &frame) {
    std::array<double, 16> rates{};
    double total = 0;
    for (size_t k = 0; k < 16; k++) {
        double eta = frame.bank.fourfold_efficiency(k);
        if (eta <= 0) {
            throw CannotCorrectError("cannot correct for a detector with zero efficiency");
        }
        rates[k] = static_cast<double>(frame.counts[k]) / eta;
        total += rates[k];
    }
    if (total <= 0) {
        throw InsufficientDataError("cannot correct an empty frame");
    }
    for (double &r : rates) {
        r /= total;
    }
    return rates;
}

CorrelationEstimate correlation_estimate(const CoincidenceFrame &frame, bool efficiency_corrected) {
    for (const auto &s : frame.settings) {
        if (!s.is_equatorial()) {
            throw std::invalid_argument("correlation_estimate: all four settings must be equatorial");
        }
    }
    std::array<double, 16> weights;
    weights.fill(1.0);
    if (efficiency_corrected) {
        for (size_t k = 0; k < 16; k++) {
            double eta = frame.bank.fourfold_efficiency(k);
            if (eta <= 0) {
                throw CannotCorrectError("cannot correct for a detector with zero efficiency");
            }
            weights[k] = 1 / eta;
        }
    }
    return estimate_from_counts(frame.counts, weights);
}

std::vector<ScanPoint> ScanDataset::fit_points() const {
    std::vector<ScanPoint> out;
    for (const auto &p : points) {
        out.push_back({p.phase, p.estimate.value, p.estimate.std_error});
    }
    return out;
}

ScanDataset run_scan(const StateVector4 &state, const NoiseModel &noise, const DetectorBank &bank, int steps,
                     uint64_t events_per_point, uint64_t seed, Exec exec) {
    if (steps < 3) {
        throw std::invalid_argument("run_scan: at least 3 steps are needed");
    }
    ScanDataset data;
    for (int k = 0; k < steps; k++) {
        double phase = 2 * kPi * k / steps;
        ScanEntry entry;
        entry.phase = phase;
        entry.frame = sample_frame(state, SettingQuad(phase, 0, 0, 0).settings(), noise, bank, events_per_point, seed,
                                   static_cast<uint64_t>(k), exec);
        entry.estimate = correlation_estimate(entry.frame, true);
        data.points.push_back(std::move(entry));
    }
    return data;
}

BellRunResult evaluate_bell_frames(const BellSettings &settings, const std::array<CoincidenceFrame, 16> &frames,
                                   bool corrected) {
    BellRunResult r;
    r.settings = settings;
    r.frames = frames;
    r.corrected = corrected;
    std::array<double, 16> errors{};
    for (size_t i = 0; i < 16; i++) {
        auto est = correlation_estimate(frames[i], corrected);
        r.table.values[i] = est.value;
        errors[i] = est.std_error;
    }
    r.table.errors = errors;
    r.s = bell_functional(r.table);
    r.s_error = bell_error(r.table);
    return r;
}

BellRunResult run_bell(const StateVector4 &state, const NoiseModel &noise, const DetectorBank &bank,
                       const BellSettings &settings, uint64_t events_per_frame, uint64_t seed, bool corrected,
                       Exec exec) {
    if (events_per_frame == 0) {
        throw std::invalid_argument("run_bell: events_per_frame must be positive");
    }
    std::array<CoincidenceFrame, 16> frames;
    for (size_t i = 0; i < 16; i++) {
        frames[i] = sample_frame(state, settings.quad(i).settings(), noise, bank, events_per_frame, seed, i, exec);
    }
    return evaluate_bell_frames(settings, frames, corrected);
}

double fourfolds_to_hours(uint64_t events, double fourfolds_per_hour) {
    return static_cast<double>(events) / fourfolds_per_hour;
}

}  // namespace fourphoton
