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

#ifndef FOURPHOTON_CORRELATION_H_
#define FOURPHOTON_CORRELATION_H_

#include <array>
#include <cstdint>
#include <functional>
#include <span>

#include "fourphoton/state.h"

namespace fourphoton {

/// Equatorial phases of the four analyzers, each wrapped into [0, 2 pi).
class SettingQuad {
   public:
    SettingQuad() = default;
    SettingQuad(double a, double ap, double b, double bp);

    double operator[](size_t arm) const {
        return phases_[arm];
    }
    double phase(Arm arm) const {
        return phases_[static_cast<size_t>(arm)];
    }
    SettingsQuad settings() const;

   private:
    std::array<double, 4> phases_{};
};

/// Wraps an angle into [0, 2 pi).
double wrap_phase(double phase);

/// (2/3) cos(a + a' - b - b') + (1/3) cos(a - a') cos(b - b').
double correlation_closed_form(const SettingQuad &q);

/// cos(a + a' - b - b'): the correlation of ghz4().
double ghz_correlation_closed_form(const SettingQuad &q);

/// Sum over outcomes of l_a l_a' l_b l_b' p(outcome).
double parity_expectation(std::span<const double, 16> probabilities);

/// Expectation of the product of the four +-1 results for the state mixed
/// with white noise at the given visibility. Throws std::invalid_argument for
/// a visibility outside [0, 1], InvalidStateError for a non-normalized state.
double correlation_exact(const StateVector4 &state, const SettingQuad &q, double visibility = 1.0);

using CorrelationFn = std::function<double(const SettingQuad &)>;

/// Count-based estimate of the correlation function.
struct CorrelationEstimate {
    double value = 0;
    double std_error = 0;
    uint64_t n_events = 0;
};

/// Parity-weighted estimate from 16 outcome counts with per-outcome weights
/// (1 for raw counts, inverse detection efficiency for corrected rates).
/// Errors are propagated from independent Poisson counts:
///   var(E) = sum_i w_i^2 (l_i - E)^2 c_i / (sum_i w_i c_i)^2,
/// which is (1 - E^2) / N for unit weights.
/// Throws InsufficientDataError when no events were recorded.
CorrelationEstimate estimate_from_counts(std::span<const uint64_t, 16> counts, std::span<const double, 16> weights);

}  // namespace fourphoton

#endif
