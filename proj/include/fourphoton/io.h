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

// File formats. Floats are written with 12 significant digits ("%.12g") so
// artifacts are byte-stable for a fixed configuration. Arms are labelled
// a, ap, b, bp.
//
//   state dump        JSON array of 16 [re, im] pairs, index 8a + 4a' + 2b + b'
//   Fock dump         JSON list of {"occupation": [8 ints], "re", "im"}, modes
//                     ordered aH aV a'H a'V bH bV b'H b'V
//   correlation table CSV  k,l,m,n,E,sigma
//   Bell settings     CSV  arm,index,phi_radians
//   frames            CSV  setting_a,setting_ap,setting_b,setting_bp,outcome,count
//                          (settings in radians or "HV"; outcome like +-+- or HVHV)
//   transcript        CSV  round,kind,setting_*,l_*,announced_*
//                          (announced is none, setting or both)
//   keys              hex string, bits packed most significant first
//   security report   JSON

#ifndef FOURPHOTON_IO_H_
#define FOURPHOTON_IO_H_

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fourphoton/bell.h"
#include "fourphoton/experiment.h"
#include "fourphoton/fock.h"
#include "fourphoton/qkd.h"
#include "fourphoton/state.h"
#include "json.hpp"

namespace fourphoton {

struct FormatError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

std::string format_float(double value);

/// Radians, or k*pi/n forms: "pi/4", "-pi/4", "3pi/4", "3*pi/2", "2pi", "0.5".
double parse_angle(std::string_view text);

/// "HV" or an angle.
MeasurementSetting parse_setting(std::string_view text);
std::string format_setting(const MeasurementSetting &setting);

nlohmann::json state_to_json(const StateVector4 &state);
StateVector4 state_from_json(const nlohmann::json &j);

nlohmann::json fock_to_json(const FockVector &fock);
FockVector fock_from_json(const nlohmann::json &j, ModeSet mode_set);

void write_etable_csv(std::ostream &out, const ETable &table);
ETable read_etable_csv(std::istream &in);

void write_settings_csv(std::ostream &out, const BellSettings &settings);
BellSettings read_settings_csv(std::istream &in);

void write_frames_csv(std::ostream &out, std::span<const CoincidenceFrame> frames);
/// Settings and counts only; each consecutive run of 16 rows forms a frame.
std::vector<CoincidenceFrame> read_frames_csv(std::istream &in);

nlohmann::json bank_to_json(const DetectorBank &bank);
DetectorBank bank_from_json(const nlohmann::json &j);

void write_transcript_csv(std::ostream &out, const ProtocolTranscript &transcript);
std::vector<RoundRecord> read_transcript_csv(std::istream &in);

std::string bits_to_hex(std::span<const uint8_t> bits);
std::vector<uint8_t> hex_to_bits(std::string_view hex, size_t n_bits);

nlohmann::json security_report_to_json(const SecurityReport &report);
SecurityReport security_report_from_json(const nlohmann::json &j);

}  // namespace fourphoton

#endif
