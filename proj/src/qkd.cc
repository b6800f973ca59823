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

#include "fourphoton/qkd.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "fourphoton/rng.h"

namespace fourphoton {

namespace {

bool same_phase(double x, double y) {
    double d = std::abs(wrap_phase(x) - wrap_phase(y));
    return std::min(d, 2 * kPi - d) < 1e-9;
}

// Setting index (1 or 2) of a Bell-round phase on one arm, 0 if it matches neither.
int bell_setting_index(const BellSettings &bs, size_t arm, const MeasurementSetting &setting) {
    if (!setting.is_equatorial()) {
        return 0;
    }
    for (int k = 0; k < 2; k++) {
        if (same_phase(bs.phases[arm][static_cast<size_t>(k)], setting.phase())) {
            return k + 1;
        }
    }
    return 0;
}

bool common_basis(const SettingsQuad &s) {
    for (size_t x = 1; x < 4; x++) {
        if (s[x].kind() != s[0].kind() || (s[x].is_equatorial() && !same_phase(s[x].phase(), s[0].phase()))) {
            return false;
        }
    }
    return true;
}

std::vector<const RoundRecord *> key_rounds(const ProtocolTranscript &transcript) {
    std::vector<const RoundRecord *> out;
    for (const auto &r : transcript.rounds) {
        if (r.kind == RoundKind::kKey && common_basis(r.settings)) {
            out.push_back(&r);
        }
    }
    return out;
}

RoundRecord draw_round(uint64_t id, const ProtocolOptions &opt, const BellSettings &bell, std::mt19937_64 &rng) {
    RoundRecord r;
    r.id = id;
    double u_kind = uniform01(rng);
    std::array<double, 4> u_setting;
    for (double &u : u_setting) {
        u = uniform01(rng);
    }
    double u_outcome = uniform01(rng);

    bool key = u_kind < opt.key_fraction;
    auto bell_choice = [&](size_t x) {
        return MeasurementSetting::equatorial(bell.phases[x][u_setting[x] < 0.5 ? 0 : 1]);
    };
    switch (opt.mode) {
        case ProtocolMode::kFourParty: {
            r.settings[0] = key ? MeasurementSetting::equatorial(kPi / 4) : bell_choice(0);
            for (size_t x = 1; x < 4; x++) {
                r.settings[x] = bell_choice(x);
            }
            if (key) {
                bool all_quarter = true;
                for (const auto &s : r.settings) {
                    all_quarter = all_quarter && same_phase(s.phase(), kPi / 4);
                }
                r.kind = all_quarter ? RoundKind::kKey : RoundKind::kSifted;
                r.setting_announced.fill(true);
            }
            break;
        }
        case ProtocolMode::kSecretSharing:
        case ProtocolMode::kThreeParty: {
            if (key) {
                MeasurementSetting common = opt.mode == ProtocolMode::kSecretSharing
                                                ? MeasurementSetting::equatorial(kPi / 4)
                                                : opt.three_party_basis;
                r.settings.fill(common);
                r.kind = RoundKind::kKey;
            } else {
                for (size_t x = 0; x < 4; x++) {
                    r.settings[x] = bell_choice(x);
                }
            }
            break;
        }
    }
    if (!key) {
        r.kind = RoundKind::kBell;
        r.setting_announced.fill(true);
        r.outcome_announced.fill(true);
    }

    // Joint draw of Eve's result j and the fourfold outcome k.
    auto joint = eve_joint_weights(opt.state, r.settings, opt.eve);
    const double v = opt.noise.visibility;
    const double noise_share = opt.eve.intercept ? (1 - v) / 32 : (1 - v) / 16;
    std::array<double, 32> cdf;
    double acc = 0;
    for (size_t j = 0; j < 2; j++) {
        bool row_used = j == 0 || opt.eve.intercept.has_value();
        for (size_t k = 0; k < 16; k++) {
            acc += row_used ? v * joint[j][k] + noise_share : 0;
            cdf[16 * j + k] = acc;
        }
    }
    double target = u_outcome * acc;
    size_t pick = 31;
    for (size_t i = 0; i < 32; i++) {
        if (target < cdf[i]) {
            pick = i;
            break;
        }
    }
    // Guard against landing on a zero-weight tail entry through rounding.
    while (pick > 0 && cdf[pick] == cdf[pick - 1]) {
        pick--;
    }
    size_t k = pick % 16;
    for (size_t x = 0; x < 4; x++) {
        r.outcomes[x] = static_cast<int8_t>(((k >> (3 - x)) & 1) ? -1 : +1);
    }
    if (opt.eve.intercept) {
        r.eve_outcome = static_cast<int8_t>(pick < 16 ? +1 : -1);
    }
    return r;
}

}  // namespace

std::string_view protocol_mode_name(ProtocolMode mode) {
    switch (mode) {
        case ProtocolMode::kFourParty:
            return "four_party";
        case ProtocolMode::kSecretSharing:
            return "secret_sharing";
        case ProtocolMode::kThreeParty:
            return "three_party";
    }
    return "?";
}

ProtocolMode parse_protocol_mode(std::string_view name) {
    for (auto m : {ProtocolMode::kFourParty, ProtocolMode::kSecretSharing, ProtocolMode::kThreeParty}) {
        if (protocol_mode_name(m) == name) {
            return m;
        }
    }
    throw std::invalid_argument("unknown protocol mode '" + std::string(name) +
                                "' (expected four_party, secret_sharing, three_party)");
}

std::string_view round_kind_name(RoundKind kind) {
    switch (kind) {
        case RoundKind::kBell:
            return "bell";
        case RoundKind::kKey:
            return "key";
        case RoundKind::kSifted:
            return "sifted";
    }
    return "?";
}

std::array<std::array<double, 16>, 2> eve_joint_weights(const StateVector4 &state, const SettingsQuad &settings,
                                                        const EveModel &eve) {
    std::array<std::array<double, 16>, 2> w{};
    if (!eve.intercept) {
        w[0] = outcome_weights(state.amplitudes(), settings);
        return w;
    }
    const auto &attack = *eve.intercept;
    for (int j = 0; j < 2; j++) {
        Qubit e = setting_eigenstate(attack.basis, outcome_from_index(attack.basis, j));
        LocalUnitary projector;
        for (int r = 0; r < 2; r++) {
            for (int c = 0; c < 2; c++) {
                projector.m[r][c] = e[r] * std::conj(e[c]);
            }
        }
        auto branch = apply_on_arm(state.amplitudes(), attack.arm, projector);
        w[static_cast<size_t>(j)] = outcome_weights(std::span<const Complex, 16>(branch), settings);
    }
    return w;
}

std::array<double, 16> round_distribution(const StateVector4 &state, const SettingsQuad &settings,
                                          const NoiseModel &noise, const EveModel &eve) {
    noise.validate();
    auto joint = eve_joint_weights(state, settings, eve);
    std::array<double, 16> p;
    for (size_t k = 0; k < 16; k++) {
        p[k] = noise.visibility * (joint[0][k] + joint[1][k]) + (1 - noise.visibility) / 16;
    }
    return p;
}

ProtocolTranscript run_protocol(uint64_t n_rounds, const ProtocolOptions &options, Exec exec) {
    if (n_rounds == 0) {
        throw std::invalid_argument("run_protocol: n_rounds must be positive");
    }
    if (!(options.key_fraction > 0 && options.key_fraction < 1)) {
        throw std::invalid_argument("run_protocol: key_fraction must lie in (0, 1)");
    }
    options.noise.validate();
    if (!options.state.is_normalized()) {
        throw InvalidStateError("run_protocol: state is not normalized");
    }
    ProtocolTranscript t;
    t.options = options;
    t.rounds.resize(n_rounds);
    const BellSettings bell = paper_optimal_settings();
    const uint64_t blocks = (n_rounds + kBlockSize - 1) / kBlockSize;
#pragma omp parallel for schedule(dynamic, 1) if (exec == Exec::kParallel)
    for (int64_t b = 0; b < static_cast<int64_t>(blocks); b++) {
        auto rng = block_generator(options.seed, kProtocolStream, static_cast<uint64_t>(b));
        uint64_t begin = static_cast<uint64_t>(b) * kBlockSize;
        uint64_t end = std::min(n_rounds, begin + kBlockSize);
        for (uint64_t id = begin; id < end; id++) {
            t.rounds[id] = draw_round(id, options, bell, rng);
        }
    }
    return t;
}

SecurityReport security_check(const ProtocolTranscript &transcript, double k_sigma) {
    const BellSettings bell = paper_optimal_settings();
    std::array<std::array<uint64_t, 16>, 16> counts{};
    SecurityReport report;
    report.k_sigma = k_sigma;
    for (const auto &r : transcript.rounds) {
        if (r.kind != RoundKind::kBell) {
            continue;
        }
        size_t combo = 0;
        bool ok = true;
        for (size_t x = 0; x < 4; x++) {
            int idx = bell_setting_index(bell, x, r.settings[x]);
            if (idx == 0) {
                ok = false;
                break;
            }
            combo = 2 * combo + static_cast<size_t>(idx - 1);
        }
        if (!ok) {
            continue;
        }
        size_t outcome = 0;
        for (size_t x = 0; x < 4; x++) {
            outcome = 2 * outcome + (r.outcomes[x] < 0 ? 1 : 0);
        }
        counts[combo][outcome]++;
        report.rounds_per_setting[combo]++;
        report.rounds_used++;
    }
    std::string missing;
    for (size_t i = 0; i < 16; i++) {
        if (report.rounds_per_setting[i] == 0) {
            missing += " (" + std::to_string(((i >> 3) & 1) + 1) + "," + std::to_string(((i >> 2) & 1) + 1) + "," +
                       std::to_string(((i >> 1) & 1) + 1) + "," + std::to_string((i & 1) + 1) + ")";
        }
    }
    if (!missing.empty()) {
        throw InsufficientDataError("security check: no Bell rounds for setting combinations" + missing);
    }
    std::array<double, 16> unit;
    unit.fill(1.0);
    std::array<double, 16> errors{};
    for (size_t i = 0; i < 16; i++) {
        auto est = estimate_from_counts(counts[i], unit);
        report.table.values[i] = est.value;
        errors[i] = est.std_error;
    }
    report.table.errors = errors;
    report.s_estimate = bell_functional(report.table);
    report.s_error = bell_error(report.table);
    report.violation = report.s_estimate - k_sigma * report.s_error > 1;
    return report;
}

KeyMaterial extract_pair_keys(const ProtocolTranscript &transcript, Arm reveal_first, Arm reveal_second) {
    if (reveal_first == reveal_second) {
        throw std::invalid_argument("extract_pair_keys: the revealing pair must name two different arms");
    }
    std::vector<Arm> holders;
    for (Arm arm : kArms) {
        if (arm != reveal_first && arm != reveal_second) {
            holders.push_back(arm);
        }
    }
    auto rounds = key_rounds(transcript);
    if (rounds.empty()) {
        throw InsufficientDataError("extract_pair_keys: transcript has no key rounds");
    }
    KeyMaterial km;
    km.holders = {std::string(arm_name(holders[0])), std::string(arm_name(holders[1]))};
    km.bits.resize(2);
    km.candidate_rounds = rounds.size();
    auto l = [](const RoundRecord &r, Arm arm) { return static_cast<int>(r.outcomes[static_cast<size_t>(arm)]); };
    uint64_t errors = 0;
    for (const RoundRecord *r : rounds) {
        km.announcements.push_back({r->id, reveal_first, static_cast<int8_t>(l(*r, reveal_first))});
        km.announcements.push_back({r->id, reveal_second, static_cast<int8_t>(l(*r, reveal_second))});
        int inferred = l(*r, holders[0]) * l(*r, reveal_first) * l(*r, reveal_second);
        uint8_t b0 = key_bit(inferred);
        uint8_t b1 = key_bit(l(*r, holders[1]));
        km.bits[0].push_back(b0);
        km.bits[1].push_back(b1);
        km.rounds.push_back(r->id);
        errors += b0 != b1;
    }
    double qber = static_cast<double>(errors) / static_cast<double>(rounds.size());
    km.agreement.push_back({0, 1, rounds.size(), qber});
    km.three_way_agreement = 1 - qber;
    return km;
}

KeyMaterial distill_three_party(const ProtocolTranscript &transcript) {
    auto rounds = key_rounds(transcript);
    if (rounds.empty()) {
        throw InsufficientDataError("distill_three_party: transcript has no key rounds in a common basis");
    }
    KeyMaterial km;
    km.holders = {"a*", "b", "bp"};
    km.bits.resize(3);
    km.candidate_rounds = rounds.size();
    std::array<uint64_t, 3> pair_errors{};
    uint64_t all_agree = 0;
    for (const RoundRecord *r : rounds) {
        if (r->outcomes[0] != r->outcomes[1]) {
            continue;
        }
        // A* announces only which rounds it keeps.
        km.announcements.push_back({r->id, std::nullopt, 0});
        std::array<uint8_t, 3> b{key_bit(r->outcomes[0]), key_bit(-r->outcomes[2]), key_bit(-r->outcomes[3])};
        for (size_t h = 0; h < 3; h++) {
            km.bits[h].push_back(b[h]);
        }
        km.rounds.push_back(r->id);
        pair_errors[0] += b[0] != b[1];
        pair_errors[1] += b[0] != b[2];
        pair_errors[2] += b[1] != b[2];
        all_agree += b[0] == b[1] && b[1] == b[2];
    }
    const uint64_t kept = km.rounds.size();
    if (kept == 0) {
        throw InsufficientDataError("distill_three_party: no round with equal A and A' results");
    }
    km.kept_fraction = static_cast<double>(kept) / static_cast<double>(rounds.size());
    const std::array<std::pair<size_t, size_t>, 3> pairs{{{0, 1}, {0, 2}, {1, 2}}};
    for (size_t p = 0; p < 3; p++) {
        km.agreement.push_back(
            {pairs[p].first, pairs[p].second, kept, static_cast<double>(pair_errors[p]) / static_cast<double>(kept)});
    }
    km.three_way_agreement = static_cast<double>(all_agree) / static_cast<double>(kept);
    return km;
}

}  // namespace fourphoton
