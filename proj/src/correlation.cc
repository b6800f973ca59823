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

#include "fourphoton/correlation.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fourphoton {

double wrap_phase(double phase) {
    double w = std::fmod(phase, 2 * kPi);
    if (w < 0) {
        w += 2 * kPi;
    }
    return w >= 2 * kPi ? 0 : w;
}

SettingQuad::SettingQuad(double a, double ap, double b, double bp)
    : phases_{wrap_phase(a), wrap_phase(ap), wrap_phase(b), wrap_phase(bp)} {
}

SettingsQuad SettingQuad::settings() const {
    return {MeasurementSetting::equatorial(phases_[0]), MeasurementSetting::equatorial(phases_[1]),
            MeasurementSetting::equatorial(phases_[2]), MeasurementSetting::equatorial(phases_[3])};
}

double correlation_closed_form(const SettingQuad &q) {
    return 2.0 / 3.0 * std::cos(q[0] + q[1] - q[2] - q[3]) + 1.0 / 3.0 * std::cos(q[0] - q[1]) * std::cos(q[2] - q[3]);
}

double ghz_correlation_closed_form(const SettingQuad &q) {
    return std::cos(q[0] + q[1] - q[2] - q[3]);
}

double parity_expectation(std::span<const double, 16> probabilities) {
    double e = 0;
    for (size_t k = 0; k < 16; k++) {
        e += outcome_parity(k) * probabilities[k];
    }
    return e;
}

double correlation_exact(const StateVector4 &state, const SettingQuad &q, double visibility) {
    if (!(visibility >= 0 && visibility <= 1)) {
        throw std::invalid_argument("visibility must lie in [0, 1], got " + std::to_string(visibility));
    }
    // The uniform part of the mixture has zero parity expectation.
    return visibility * parity_expectation(outcome_distribution(state, q.settings()));
}

CorrelationEstimate estimate_from_counts(std::span<const uint64_t, 16> counts, std::span<const double, 16> weights) {
    uint64_t n = 0;
    double weighted = 0;
    double signed_sum = 0;
    for (size_t k = 0; k < 16; k++) {
        n += counts[k];
        weighted += weights[k] * static_cast<double>(counts[k]);
        signed_sum += outcome_parity(k) * weights[k] * static_cast<double>(counts[k]);
    }
    if (n == 0 || weighted <= 0) {
        throw InsufficientDataError("correlation estimate needs at least one recorded fourfold event");
    }
    double e = signed_sum / weighted;
    double var = 0;
    for (size_t k = 0; k < 16; k++) {
        double d = outcome_parity(k) - e;
        var += weights[k] * weights[k] * d * d * static_cast<double>(counts[k]);
    }
    var /= weighted * weighted;
    CorrelationEstimate est;
    est.value = std::clamp(e, -1.0, 1.0);
    est.std_error = std::sqrt(var);
    est.n_events = n;
    return est;
}

}  // namespace fourphoton
