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

// Round-by-round simulation of the multi-party key distribution schemes.
//
// Every round the four parties analyze one photon each. Bell rounds (A at 0
// or pi/2, the others at +-pi/4) are fully announced and feed the security
// check. Key rounds are never announced beyond what each scheme allows:
//   four_party:     A picks pi/4 with probability key_fraction; A announces
//                   those rounds, everybody announces settings, and rounds
//                   with all four at pi/4 are kept.
//   secret_sharing: dedicated rounds where all four analyze at pi/4.
//   three_party:    dedicated rounds where all four analyze in a common
//                   designated basis (H/V by default).

#ifndef FOURPHOTON_QKD_H_
#define FOURPHOTON_QKD_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fourphoton/bell.h"
#include "fourphoton/exec.h"
#include "fourphoton/experiment.h"
#include "fourphoton/state.h"

namespace fourphoton {

enum class ProtocolMode : uint8_t { kFourParty, kSecretSharing, kThreeParty };

std::string_view protocol_mode_name(ProtocolMode mode);
ProtocolMode parse_protocol_mode(std::string_view name);

struct InterceptResend {
    Arm arm = Arm::A;
    MeasurementSetting basis = MeasurementSetting::computational();
};

/// Either no eavesdropper or intercept-resend on exactly one arm: Eve measures
/// the photon in a fixed basis and forwards the eigenstate she found.
struct EveModel {
    std::optional<InterceptResend> intercept;

    static EveModel none() {
        return {};
    }
    static EveModel intercept_resend(Arm arm, MeasurementSetting basis) {
        return {InterceptResend{arm, basis}};
    }
};

enum class RoundKind : uint8_t {
    kBell,
    kKey,
    /// Key-candidate round dropped after the setting announcement.
    kSifted,
};

std::string_view round_kind_name(RoundKind kind);

struct RoundRecord {
    uint64_t id = 0;
    RoundKind kind = RoundKind::kBell;
    SettingsQuad settings{};
    /// +1 / -1 per arm (H counts as +1, V as -1).
    std::array<int8_t, 4> outcomes{};
    std::array<bool, 4> setting_announced{};
    std::array<bool, 4> outcome_announced{};
    /// Eve's own result (+1/-1), 0 when there is no eavesdropper. Private to Eve.
    int8_t eve_outcome = 0;
};

struct ProtocolOptions {
    ProtocolMode mode = ProtocolMode::kFourParty;
    double key_fraction = 0.5;
    NoiseModel noise;
    EveModel eve;
    MeasurementSetting three_party_basis = MeasurementSetting::computational();
    StateVector4 state = canonical_psi4();
    uint64_t seed = 0;
};

struct ProtocolTranscript {
    ProtocolOptions options;
    std::vector<RoundRecord> rounds;
};

/// Throws std::invalid_argument for n_rounds == 0 or key_fraction outside (0, 1).
ProtocolTranscript run_protocol(uint64_t n_rounds, const ProtocolOptions &options, Exec exec = Exec::kParallel);

/// Joint weights of (Eve's result, fourfold outcome) for one round, without
/// the noise admixture: entry [j][k] is |<k| P_j |psi>|^2 with P_j Eve's
/// projector. Without an eavesdropper only row 0 is filled.
std::array<std::array<double, 16>, 2> eve_joint_weights(const StateVector4 &state, const SettingsQuad &settings,
                                                        const EveModel &eve);

/// Outcome distribution seen by the parties, including eavesdropping and noise.
std::array<double, 16> round_distribution(const StateVector4 &state, const SettingsQuad &settings,
                                          const NoiseModel &noise, const EveModel &eve);

struct SecurityReport {
    double s_estimate = 0;
    double s_error = 0;
    double k_sigma = 3;
    /// s_estimate - k_sigma * s_error > 1.
    bool violation = false;
    uint64_t rounds_used = 0;
    ETable table;
    std::array<uint64_t, 16> rounds_per_setting{};
};

/// Groups the Bell rounds by setting combination and evaluates the Bell
/// functional. Throws InsufficientDataError naming every empty combination.
SecurityReport security_check(const ProtocolTranscript &transcript, double k_sigma = 3);

struct Announcement {
    uint64_t round = 0;
    /// Empty for announcements that carry only a round id.
    std::optional<Arm> arm;
    int8_t outcome = 0;
};

struct PairAgreement {
    size_t first = 0;
    size_t second = 0;
    uint64_t compared = 0;
    /// Fraction of differing bits.
    double qber = 0;
};

struct KeyMaterial {
    /// Holder labels: arm names, or "a*" for the merged A/A' party.
    std::vector<std::string> holders;
    /// bits[h] is holder h's key, one 0/1 entry per used round.
    std::vector<std::vector<uint8_t>> bits;
    std::vector<uint64_t> rounds;
    std::vector<PairAgreement> agreement;
    std::vector<Announcement> announcements;
    uint64_t candidate_rounds = 0;
    double kept_fraction = 1;
    double three_way_agreement = 1;
};

/// Key bit of a local result: (1 - l) / 2.
inline uint8_t key_bit(int l) {
    return l > 0 ? 0 : 1;
}

/// The revealing pair announces its key-round results; each remaining party
/// infers the other's result from the product rule l_a l_a' l_b l_b' = +1.
/// Holder 0 keeps the inferred bit, holder 1 its own. Key rounds are rounds
/// of kind kKey with a common basis on all four arms.
/// Throws std::invalid_argument for a bad pair, InsufficientDataError without
/// key rounds.
KeyMaterial extract_pair_keys(const ProtocolTranscript &transcript, Arm reveal_first, Arm reveal_second);

/// A and A' merge into A* and keep the key rounds where their results agree;
/// B and B' then hold the opposite result. Holders: "a*", "b", "bp".
/// Throws InsufficientDataError if no round qualifies or none is kept.
KeyMaterial distill_three_party(const ProtocolTranscript &transcript);

}  // namespace fourphoton

#endif
