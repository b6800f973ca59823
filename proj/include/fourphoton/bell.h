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

#ifndef FOURPHOTON_BELL_H_
#define FOURPHOTON_BELL_H_

#include <array>
#include <optional>

#include "fourphoton/correlation.h"
#include "fourphoton/exec.h"

namespace fourphoton {

/// Two alternative phases per arm; phases[arm][k - 1] is setting k.
struct BellSettings {
    std::array<std::array<double, 2>, 4> phases{};

    /// k, l, m, n in {1, 2}.
    SettingQuad quad(int k, int l, int m, int n) const;
    SettingQuad quad(size_t table_index) const;
    bool operator==(const BellSettings &other) const = default;
};

/// 16 correlation values E(k, l, m, n), stored at index
/// 8 (k-1) + 4 (l-1) + 2 (m-1) + (n-1), optionally with standard errors.
struct ETable {
    std::array<double, 16> values{};
    std::optional<std::array<double, 16>> errors;

    static size_t index(int k, int l, int m, int n);
    double at(int k, int l, int m, int n) const {
        return values[index(k, l, m, n)];
    }
};

ETable make_table(const BellSettings &settings, const CorrelationFn &correlation);

/// Inner sums sum_{klmn} s_a^k s_a'^l s_b^m s_b'^n E(k,l,m,n) for every sign
/// choice s, with s^1 = s and s^2 = 1. Index bit 3 - x set means s_x = -1.
std::array<double, 16> bell_inner_sums(const ETable &table);

/// (1/16) sum_s |inner sum|; local realism bounds it by 1.
double bell_functional(const ETable &table);

/// Gradient of bell_functional with each |.| frozen at the sign of its inner
/// sum. Inner sums smaller than their own propagated error (computed from the
/// table's errors, when present) contribute nothing.
std::array<double, 16> bell_gradient(const ETable &table);

/// Quadrature propagation of the table errors through bell_gradient.
/// Throws std::invalid_argument when the table carries no errors.
double bell_error(const ETable &table);

/// phi_a in {0, pi/2}; phi in {+pi/4, -pi/4} for a', b, b'.
BellSettings paper_optimal_settings();

enum class CorrelationModel : uint8_t {
    /// correlation_closed_form
    kClosedForm,
    /// ghz_correlation_closed_form
    kGhz,
    /// correlation_exact on a supplied state
    kState,
};

struct SearchOptions {
    CorrelationModel model = CorrelationModel::kClosedForm;
    /// Used when model == kState.
    StateVector4 state = canonical_psi4();
    double visibility = 1.0;
    /// Grid step in radians; must divide 2 pi into a whole number of steps.
    double resolution = kPi / 12;
    /// One coordinate-descent pass after the grid search.
    bool refine = true;
    Exec exec = Exec::kParallel;
};

struct SearchResult {
    BellSettings settings;
    double s = 0;
    /// Best value on the grid itself, before refinement.
    double grid_s = 0;
    uint64_t configurations = 0;
};

/// Exhaustive search over the grid, up to the symmetries of the functional:
/// swapping an arm's two settings never changes S, and for the closed-form
/// models a common phase shift doesn't either, so phi_a^1 = 0 is fixed there.
/// Ties resolve to the first configuration in enumeration order.
/// Throws std::invalid_argument for an empty or non-commensurate grid.
SearchResult settings_search(const SearchOptions &options);

/// Same enumeration evaluated naively, one make_table + bell_functional per
/// configuration and without refinement. Serial; kept as the test reference
/// for settings_search.
SearchResult settings_search_reference(const SearchOptions &options);

/// The correlation function a search option set describes.
CorrelationFn correlation_for(const SearchOptions &options);

struct CriticalVisibility {
    /// 1 / S, or +inf when S = 0.
    double value;
    /// value < 1.
    bool violation_possible;
};

CriticalVisibility critical_visibility(const BellSettings &settings,
                                       const CorrelationFn &correlation = correlation_closed_form);

}  // namespace fourphoton

#endif
