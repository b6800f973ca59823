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

#include "fourphoton/bell.h"

#include <omp.h>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace fourphoton {

namespace {

// Butterfly over one arm: (k=1, k=2) -> (s=+1, s=-1) with s^1 = s, s^2 = 1.
std::array<double, 16> sign_transform(std::array<double, 16> v) {
    for (size_t stride : {8u, 4u, 2u, 1u}) {
        for (size_t i = 0; i < 16; i++) {
            if (i & stride) {
                continue;
            }
            double e1 = v[i];
            double e2 = v[i | stride];
            v[i] = e1 + e2;
            v[i | stride] = e2 - e1;
        }
    }
    return v;
}

// Coefficient of E at table index i in the inner sum of sign pattern s.
int sign_coefficient(size_t s, size_t i) {
    int c = 1;
    for (size_t stride : {8u, 4u, 2u, 1u}) {
        bool first_setting = !(i & stride);
        bool minus = s & stride;
        if (first_setting && minus) {
            c = -c;
        }
    }
    return c;
}

struct Grid {
    int size = 0;
    std::vector<double> phases;
    // Unordered setting pairs (i <= j) per arm; arm a uses (0, j) when the
    // model is shift invariant.
    std::vector<std::array<int, 2>> pairs;
    std::vector<std::array<int, 2>> first_arm_pairs;
    // Correlation at grid indices (i, j, k, l), flattened.
    std::vector<double> lookup;

    double e(int i, int j, int k, int l) const {
        return lookup[((static_cast<size_t>(i) * size + j) * size + k) * size + l];
    }
};

bool shift_invariant(CorrelationModel model) {
    return model != CorrelationModel::kState;
}

Grid make_grid(const SearchOptions &options, const CorrelationFn &fn) {
    if (!(options.resolution > 0)) {
        throw std::invalid_argument("settings_search: resolution must be positive");
    }
    double steps = 2 * kPi / options.resolution;
    int size = static_cast<int>(std::llround(steps));
    if (size < 1 || std::abs(steps - size) > 1e-9 * steps) {
        throw std::invalid_argument("settings_search: resolution must divide 2 pi into a whole number of steps");
    }
    if (size > 48) {
        throw std::invalid_argument("settings_search: grid finer than 2 pi / 48 is not supported");
    }
    Grid g;
    g.size = size;
    for (int i = 0; i < size; i++) {
        g.phases.push_back(2 * kPi * i / size);
    }
    for (int i = 0; i < size; i++) {
        for (int j = i; j < size; j++) {
            g.pairs.push_back({i, j});
        }
    }
    if (shift_invariant(options.model)) {
        for (int j = 0; j < size; j++) {
            g.first_arm_pairs.push_back({0, j});
        }
    } else {
        g.first_arm_pairs = g.pairs;
    }
    const auto n = static_cast<int64_t>(size) * size * size * size;
    g.lookup.resize(static_cast<size_t>(n));
#pragma omp parallel for schedule(static) if (options.exec == Exec::kParallel)
    for (int64_t flat = 0; flat < n; flat++) {
        int64_t r = flat;
        int l = static_cast<int>(r % size);
        r /= size;
        int k = static_cast<int>(r % size);
        r /= size;
        int j = static_cast<int>(r % size);
        int i = static_cast<int>(r / size);
        g.lookup[static_cast<size_t>(flat)] = fn(SettingQuad(g.phases[i], g.phases[j], g.phases[k], g.phases[l]));
    }
    return g;
}

BellSettings settings_from(const Grid &g, const std::array<int, 2> &pa, const std::array<int, 2> &pap,
                           const std::array<int, 2> &pb, const std::array<int, 2> &pbp) {
    BellSettings bs;
    const std::array<const std::array<int, 2> *, 4> arms{&pa, &pap, &pb, &pbp};
    for (size_t x = 0; x < 4; x++) {
        bs.phases[x] = {g.phases[(*arms[x])[0]], g.phases[(*arms[x])[1]]};
    }
    return bs;
}

// Values within kTieTolerance count as ties, so kernels that round
// differently still agree on the winning configuration.
constexpr double kTieTolerance = 1e-12;

struct Best {
    double s = -1;
    uint64_t index = std::numeric_limits<uint64_t>::max();

    void offer(double candidate, uint64_t candidate_index) {
        if (candidate > s + kTieTolerance ||
            (std::abs(candidate - s) <= kTieTolerance && candidate_index < index)) {
            s = candidate;
            index = candidate_index;
        }
    }
};

void unflatten(const Grid &g, uint64_t index, size_t &ia, size_t &iap, size_t &ib, size_t &ibp) {
    const uint64_t np = g.pairs.size();
    ibp = index % np;
    index /= np;
    ib = index % np;
    index /= np;
    iap = index % np;
    ia = index / np;
}

double evaluate(const CorrelationFn &fn, const BellSettings &bs) {
    return bell_functional(make_table(bs, fn));
}

BellSettings refine(const CorrelationFn &fn, BellSettings bs, double &s, double step) {
    constexpr int kSamples = 16;
    for (size_t x = 0; x < 4; x++) {
        for (size_t k = 0; k < 2; k++) {
            double center = bs.phases[x][k];
            double best_phase = center;
            for (int t = -kSamples; t <= kSamples; t++) {
                if (t == 0) {
                    continue;
                }
                BellSettings trial = bs;
                trial.phases[x][k] = wrap_phase(center + step * t / kSamples);
                double v = evaluate(fn, trial);
                if (v > s) {
                    s = v;
                    best_phase = trial.phases[x][k];
                }
            }
            bs.phases[x][k] = best_phase;
        }
    }
    return bs;
}

}  // namespace

SettingQuad BellSettings::quad(int k, int l, int m, int n) const {
    return SettingQuad(phases[0][k - 1], phases[1][l - 1], phases[2][m - 1], phases[3][n - 1]);
}

SettingQuad BellSettings::quad(size_t table_index) const {
    return quad(static_cast<int>((table_index >> 3) & 1) + 1, static_cast<int>((table_index >> 2) & 1) + 1,
                static_cast<int>((table_index >> 1) & 1) + 1, static_cast<int>(table_index & 1) + 1);
}

size_t ETable::index(int k, int l, int m, int n) {
    for (int v : {k, l, m, n}) {
        if (v != 1 && v != 2) {
            throw std::out_of_range("ETable setting indices must be 1 or 2");
        }
    }
    return static_cast<size_t>(8 * (k - 1) + 4 * (l - 1) + 2 * (m - 1) + (n - 1));
}

ETable make_table(const BellSettings &settings, const CorrelationFn &correlation) {
    ETable t;
    for (size_t i = 0; i < 16; i++) {
        t.values[i] = correlation(settings.quad(i));
    }
    return t;
}

std::array<double, 16> bell_inner_sums(const ETable &table) {
    return sign_transform(table.values);
}

double bell_functional(const ETable &table) {
    double total = 0;
    for (double t : bell_inner_sums(table)) {
        total += std::abs(t);
    }
    return total / 16;
}

std::array<double, 16> bell_gradient(const ETable &table) {
    auto inner = bell_inner_sums(table);
    double inner_sigma = 0;
    if (table.errors) {
        // Every coefficient is +-1, so all inner sums share one propagated error.
        for (double e : *table.errors) {
            inner_sigma += e * e;
        }
        inner_sigma = std::sqrt(inner_sigma);
    }
    std::array<double, 16> g{};
    for (size_t s = 0; s < 16; s++) {
        if (inner[s] == 0 || std::abs(inner[s]) < inner_sigma) {
            continue;
        }
        double sign = inner[s] > 0 ? 1 : -1;
        for (size_t i = 0; i < 16; i++) {
            g[i] += sign * sign_coefficient(s, i) / 16.0;
        }
    }
    return g;
}

double bell_error(const ETable &table) {
    if (!table.errors) {
        throw std::invalid_argument("bell_error: correlation table carries no standard errors");
    }
    auto g = bell_gradient(table);
    double var = 0;
    for (size_t i = 0; i < 16; i++) {
        double term = g[i] * (*table.errors)[i];
        var += term * term;
    }
    return std::sqrt(var);
}

BellSettings paper_optimal_settings() {
    BellSettings bs;
    bs.phases[0] = {0, kPi / 2};
    for (size_t x = 1; x < 4; x++) {
        bs.phases[x] = {kPi / 4, wrap_phase(-kPi / 4)};
    }
    return bs;
}

CorrelationFn correlation_for(const SearchOptions &options) {
    switch (options.model) {
        case CorrelationModel::kClosedForm: {
            double v = options.visibility;
            return [v](const SettingQuad &q) { return v * correlation_closed_form(q); };
        }
        case CorrelationModel::kGhz: {
            double v = options.visibility;
            return [v](const SettingQuad &q) { return v * ghz_correlation_closed_form(q); };
        }
        case CorrelationModel::kState: {
            StateVector4 state = options.state;
            double v = options.visibility;
            if (!state.is_normalized()) {
                throw InvalidStateError("settings_search: state is not normalized");
            }
            return [state, v](const SettingQuad &q) { return correlation_exact(state, q, v); };
        }
    }
    throw std::invalid_argument("unknown correlation model");
}

SearchResult settings_search(const SearchOptions &options) {
    CorrelationFn fn = correlation_for(options);
    Grid g = make_grid(options, fn);
    const int size = g.size;
    const auto &pairs = g.pairs;
    const uint64_t np = pairs.size();
    const uint64_t outer = g.first_arm_pairs.size() * np;

    Best best;
#pragma omp parallel if (options.exec == Exec::kParallel)
    {
        Best local;
        // partial[s3 * size + j]: inner sum over arms a, a', b for sign pattern
        // s3 with arm b' at grid phase j.
        std::vector<double> partial(8 * static_cast<size_t>(size));
#pragma omp for schedule(dynamic, 1)
        for (int64_t o = 0; o < static_cast<int64_t>(outer); o++) {
            const auto &pa = g.first_arm_pairs[static_cast<size_t>(o) / np];
            const auto &pap = pairs[static_cast<size_t>(o) % np];
            for (uint64_t ib = 0; ib < np; ib++) {
                const auto &pb = pairs[ib];
                for (int j = 0; j < size; j++) {
                    std::array<double, 8> v;
                    for (size_t t = 0; t < 8; t++) {
                        v[t] = g.e(pa[(t >> 2) & 1], pap[(t >> 1) & 1], pb[t & 1], j);
                    }
                    for (size_t stride : {4u, 2u, 1u}) {
                        for (size_t i = 0; i < 8; i++) {
                            if (i & stride) {
                                continue;
                            }
                            double e1 = v[i];
                            double e2 = v[i | stride];
                            v[i] = e1 + e2;
                            v[i | stride] = e2 - e1;
                        }
                    }
                    for (size_t t = 0; t < 8; t++) {
                        partial[t * size + j] = v[t];
                    }
                }
                // |F_i + F_j| + |F_j - F_i| = 2 max(|F_i|, |F_j|).
                const uint64_t base = (static_cast<uint64_t>(o) * np + ib) * np;
                for (uint64_t ibp = 0; ibp < np; ibp++) {
                    const int i1 = pairs[ibp][0];
                    const int i2 = pairs[ibp][1];
                    double acc = 0;
                    for (size_t t = 0; t < 8; t++) {
                        acc += std::max(std::abs(partial[t * size + i1]), std::abs(partial[t * size + i2]));
                    }
                    local.offer(acc / 8, base + ibp);
                }
            }
        }
#pragma omp critical
        best.offer(local.s, local.index);
    }

    size_t ia, iap, ib, ibp;
    unflatten(g, best.index, ia, iap, ib, ibp);
    SearchResult result;
    result.settings = settings_from(g, g.first_arm_pairs[ia], pairs[iap], pairs[ib], pairs[ibp]);
    result.configurations = outer * np * np;
    result.grid_s = evaluate(fn, result.settings);
    result.s = result.grid_s;
    if (options.refine) {
        result.settings = refine(fn, result.settings, result.s, options.resolution);
    }
    return result;
}

SearchResult settings_search_reference(const SearchOptions &options) {
    CorrelationFn fn = correlation_for(options);
    SearchOptions serial = options;
    serial.exec = Exec::kSerial;
    Grid g = make_grid(serial, fn);
    const auto &pairs = g.pairs;
    Best best;
    uint64_t index = 0;
    for (const auto &pa : g.first_arm_pairs) {
        for (const auto &pap : pairs) {
            for (const auto &pb : pairs) {
                for (const auto &pbp : pairs) {
                    ETable t;
                    for (size_t i = 0; i < 16; i++) {
                        int k = (i >> 3) & 1, l = (i >> 2) & 1, m = (i >> 1) & 1, n = i & 1;
                        t.values[i] = g.e(pa[k], pap[l], pb[m], pbp[n]);
                    }
                    best.offer(bell_functional(t), index++);
                }
            }
        }
    }
    size_t ia, iap, ib, ibp;
    unflatten(g, best.index, ia, iap, ib, ibp);
    SearchResult result;
    result.settings = settings_from(g, g.first_arm_pairs[ia], pairs[iap], pairs[ib], pairs[ibp]);
    result.configurations = index;
    result.grid_s = best.s;
    result.s = best.s;
    return result;
}

CriticalVisibility critical_visibility(const BellSettings &settings, const CorrelationFn &correlation) {
    double s = bell_functional(make_table(settings, correlation));
    CriticalVisibility cv;
    cv.value = s > 0 ? 1 / s : std::numeric_limits<double>::infinity();
    cv.violation_possible = cv.value < 1;
    return cv;
}

}  // namespace fourphoton
