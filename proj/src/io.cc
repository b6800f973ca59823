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

#include "fourphoton/io.h"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <regex>
#include <sstream>

namespace fourphoton {

namespace {

using nlohmann::json;

std::vector<std::string> split(const std::string &line, char sep = ',') {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, sep)) {
        out.push_back(cell);
    }
    if (!line.empty() && line.back() == sep) {
        out.emplace_back();
    }
    return out;
}

std::string strip(std::string s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) {
        s.pop_back();
    }
    size_t i = 0;
    while (i < s.size() && s[i] == ' ') {
        i++;
    }
    return s.substr(i);
}

// Reads the CSV body after checking the header; returns rows with the
// expected column count, with line numbers for diagnostics.
std::vector<std::pair<size_t, std::vector<std::string>>> read_csv(std::istream &in, std::string_view header) {
    std::string line;
    if (!std::getline(in, line) || strip(line) != header) {
        throw FormatError("line 1: expected header '" + std::string(header) + "'");
    }
    const size_t columns = split(std::string(header)).size();
    std::vector<std::pair<size_t, std::vector<std::string>>> rows;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        line_no++;
        line = strip(line);
        if (line.empty()) {
            continue;
        }
        auto cells = split(line);
        if (cells.size() != columns) {
            throw FormatError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) +
                              " columns, found " + std::to_string(cells.size()));
        }
        rows.emplace_back(line_no, std::move(cells));
    }
    return rows;
}

double parse_double(const std::string &s, size_t line_no) {
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw FormatError("line " + std::to_string(line_no) + ": not a number: '" + s + "'");
    }
}

uint64_t parse_count(const std::string &s, size_t line_no) {
    try {
        size_t used = 0;
        unsigned long long v = std::stoull(s, &used);
        if (used != s.size() || s.find('-') != std::string::npos) {
            throw std::invalid_argument(s);
        }
        return v;
    } catch (const std::exception &) {
        throw FormatError("line " + std::to_string(line_no) + ": not a non-negative integer: '" + s + "'");
    }
}

int parse_index12(const std::string &s, size_t line_no) {
    if (s == "1") {
        return 1;
    }
    if (s == "2") {
        return 2;
    }
    throw FormatError("line " + std::to_string(line_no) + ": setting index must be 1 or 2, got '" + s + "'");
}

std::string_view announced_name(bool setting, bool outcome) {
    if (outcome) {
        return "both";
    }
    return setting ? "setting" : "none";
}

}  // namespace

std::string format_float(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", value == 0 ? 0.0 : value);
    return buf;
}

double parse_angle(std::string_view text) {
    static const std::regex kPiForm(R"(^\s*([+-])?\s*(\d+(?:\.\d*)?)?\s*\*?\s*pi\s*(?:/\s*(\d+(?:\.\d*)?))?\s*$)");
    std::string s(text);
    std::smatch m;
    if (std::regex_match(s, m, kPiForm)) {
        double num = m[2].matched ? std::stod(m[2].str()) : 1.0;
        double den = m[3].matched ? std::stod(m[3].str()) : 1.0;
        if (den == 0) {
            throw FormatError("angle '" + s + "' divides by zero");
        }
        double v = num * kPi / den;
        return (m[1].matched && m[1].str() == "-") ? -v : v;
    }
    try {
        size_t used = 0;
        double v = std::stod(s, &used);
        if (strip(s.substr(used)).empty() && std::isfinite(v)) {
            return v;
        }
    } catch (const std::exception &) {
    }
    throw FormatError("cannot parse angle '" + s + "' (use radians or forms like pi/4, -3pi/4)");
}

MeasurementSetting parse_setting(std::string_view text) {
    if (strip(std::string(text)) == "HV") {
        return MeasurementSetting::computational();
    }
    return MeasurementSetting::equatorial(parse_angle(text));
}

std::string format_setting(const MeasurementSetting &setting) {
    return setting.is_equatorial() ? format_float(setting.phase()) : "HV";
}

json state_to_json(const StateVector4 &state) {
    json arr = json::array();
    for (const auto &a : state.amplitudes()) {
        arr.push_back({a.real(), a.imag()});
    }
    return arr;
}

StateVector4 state_from_json(const json &j) {
    if (!j.is_array() || j.size() != 16) {
        throw FormatError("state dump must be an array of 16 [re, im] pairs");
    }
    std::array<Complex, 16> amps;
    for (size_t k = 0; k < 16; k++) {
        const auto &p = j[k];
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            throw FormatError("state dump entry " + std::to_string(k) + " must be [re, im]");
        }
        amps[k] = {p[0].get<double>(), p[1].get<double>()};
    }
    return StateVector4(amps);
}

json fock_to_json(const FockVector &fock) {
    json arr = json::array();
    for (const auto &[occ, amp] : fock.terms) {
        json o = json::array();
        for (uint8_t n : occ) {
            o.push_back(static_cast<int>(n));
        }
        arr.push_back({{"occupation", o}, {"re", amp.real()}, {"im", amp.imag()}});
    }
    return arr;
}

FockVector fock_from_json(const json &j, ModeSet mode_set) {
    if (!j.is_array()) {
        throw FormatError("Fock dump must be a JSON list");
    }
    FockVector f;
    f.mode_set = mode_set;
    for (size_t i = 0; i < j.size(); i++) {
        const auto &rec = j[i];
        if (!rec.is_object() || !rec.contains("occupation") || !rec.contains("re") || !rec.contains("im") ||
            rec.size() != 3) {
            throw FormatError("Fock record " + std::to_string(i) + " must have exactly occupation, re, im");
        }
        const auto &o = rec["occupation"];
        if (!o.is_array() || o.size() != kNumModes) {
            throw FormatError("Fock record " + std::to_string(i) + ": occupation needs 8 integers");
        }
        ModeOccupation occ;
        for (size_t m = 0; m < kNumModes; m++) {
            int n = o[m].get<int>();
            if (n < 0) {
                throw FormatError("Fock record " + std::to_string(i) + ": negative occupation");
            }
            occ[m] = static_cast<uint8_t>(n);
        }
        f.terms[occ] = {rec["re"].get<double>(), rec["im"].get<double>()};
    }
    return f;
}

void write_etable_csv(std::ostream &out, const ETable &table) {
    out << "k,l,m,n,E,sigma\n";
    for (size_t i = 0; i < 16; i++) {
        out << ((i >> 3) & 1) + 1 << ',' << ((i >> 2) & 1) + 1 << ',' << ((i >> 1) & 1) + 1 << ',' << (i & 1) + 1
            << ',' << format_float(table.values[i]) << ',';
        if (table.errors) {
            out << format_float((*table.errors)[i]);
        }
        out << '\n';
    }
}

ETable read_etable_csv(std::istream &in) {
    auto rows = read_csv(in, "k,l,m,n,E,sigma");
    ETable t;
    std::array<bool, 16> seen{};
    std::array<double, 16> errors{};
    size_t with_errors = 0;
    for (const auto &[line_no, c] : rows) {
        size_t idx = ETable::index(parse_index12(c[0], line_no), parse_index12(c[1], line_no),
                                   parse_index12(c[2], line_no), parse_index12(c[3], line_no));
        if (seen[idx]) {
            throw FormatError("line " + std::to_string(line_no) + ": duplicate setting combination");
        }
        seen[idx] = true;
        t.values[idx] = parse_double(c[4], line_no);
        if (!c[5].empty()) {
            errors[idx] = parse_double(c[5], line_no);
            with_errors++;
        }
    }
    if (rows.size() != 16) {
        throw FormatError("correlation table needs 16 rows, found " + std::to_string(rows.size()));
    }
    if (with_errors == 16) {
        t.errors = errors;
    } else if (with_errors != 0) {
        throw FormatError("sigma column must be filled on all rows or none");
    }
    return t;
}

void write_settings_csv(std::ostream &out, const BellSettings &settings) {
    out << "arm,index,phi_radians\n";
    for (Arm arm : kArms) {
        for (int k = 0; k < 2; k++) {
            out << arm_name(arm) << ',' << k + 1 << ','
                << format_float(settings.phases[static_cast<size_t>(arm)][static_cast<size_t>(k)]) << '\n';
        }
    }
}

BellSettings read_settings_csv(std::istream &in) {
    auto rows = read_csv(in, "arm,index,phi_radians");
    BellSettings bs;
    std::array<std::array<bool, 2>, 4> seen{};
    for (const auto &[line_no, c] : rows) {
        Arm arm;
        try {
            arm = parse_arm(c[0]);
        } catch (const std::invalid_argument &e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        int k = parse_index12(c[1], line_no);
        double phi;
        try {
            phi = parse_angle(c[2]);
        } catch (const FormatError &e) {
            throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
        }
        auto x = static_cast<size_t>(arm);
        auto kk = static_cast<size_t>(k - 1);
        if (seen[x][kk]) {
            throw FormatError("line " + std::to_string(line_no) + ": duplicate entry");
        }
        seen[x][kk] = true;
        bs.phases[x][kk] = phi;
    }
    for (size_t x = 0; x < 4; x++) {
        for (size_t k = 0; k < 2; k++) {
            if (!seen[x][k]) {
                throw FormatError("settings file lacks arm " + std::string(arm_name(kArms[x])) + " index " +
                                  std::to_string(k + 1));
            }
        }
    }
    return bs;
}

void write_frames_csv(std::ostream &out, std::span<const CoincidenceFrame> frames) {
    out << "setting_a,setting_ap,setting_b,setting_bp,outcome,count\n";
    for (const auto &f : frames) {
        for (size_t k = 0; k < 16; k++) {
            for (const auto &s : f.settings) {
                out << format_setting(s) << ',';
            }
            out << outcome_label(f.settings, k) << ',' << f.counts[k] << '\n';
        }
    }
}

std::vector<CoincidenceFrame> read_frames_csv(std::istream &in) {
    auto rows = read_csv(in, "setting_a,setting_ap,setting_b,setting_bp,outcome,count");
    if (rows.size() % 16 != 0) {
        throw FormatError("frame file must contain whole frames of 16 rows, found " + std::to_string(rows.size()));
    }
    std::vector<CoincidenceFrame> frames(rows.size() / 16);
    for (size_t r = 0; r < rows.size(); r++) {
        const auto &[line_no, c] = rows[r];
        auto &f = frames[r / 16];
        SettingsQuad settings;
        for (size_t x = 0; x < 4; x++) {
            try {
                settings[x] = parse_setting(c[x]);
            } catch (const FormatError &e) {
                throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
            }
        }
        if (r % 16 == 0) {
            f.settings = settings;
        } else if (!(settings == f.settings)) {
            throw FormatError("line " + std::to_string(line_no) + ": settings change inside a frame");
        }
        const std::string &label = c[4];
        if (label.size() != 4) {
            throw FormatError("line " + std::to_string(line_no) + ": outcome must have 4 symbols");
        }
        size_t k = 0;
        for (size_t x = 0; x < 4; x++) {
            char ch = label[x];
            bool eq = settings[x].is_equatorial();
            if ((eq && ch != '+' && ch != '-') || (!eq && ch != 'H' && ch != 'V')) {
                throw FormatError("line " + std::to_string(line_no) + ": outcome symbol '" + std::string(1, ch) +
                                  "' does not match the setting of arm " + std::string(arm_name(kArms[x])));
            }
            k = 2 * k + ((ch == '-' || ch == 'V') ? 1 : 0);
        }
        f.counts[k] = parse_count(c[5], line_no);
    }
    for (auto &f : frames) {
        f.emissions_attempted = f.total();
    }
    return frames;
}

json bank_to_json(const DetectorBank &bank) {
    json j = json::object();
    for (Arm arm : kArms) {
        const auto &e = bank.efficiency[static_cast<size_t>(arm)];
        j[std::string(arm_name(arm))] = {e[0], e[1]};
    }
    return j;
}

DetectorBank bank_from_json(const json &j) {
    if (!j.is_object()) {
        throw FormatError("detector bank must be an object {a: [plus, minus], ap: ..., b: ..., bp: ...}");
    }
    DetectorBank bank;
    std::array<bool, 4> seen{};
    for (const auto &[key, value] : j.items()) {
        Arm arm;
        try {
            arm = parse_arm(key);
        } catch (const std::invalid_argument &) {
            throw FormatError("detector bank: unknown field '" + key + "'");
        }
        if (!value.is_array() || value.size() != 2 || !value[0].is_number() || !value[1].is_number()) {
            throw FormatError("detector bank: field '" + key + "' must be [eta_plus, eta_minus]");
        }
        bank.efficiency[static_cast<size_t>(arm)] = {value[0].get<double>(), value[1].get<double>()};
        seen[static_cast<size_t>(arm)] = true;
    }
    for (size_t x = 0; x < 4; x++) {
        if (!seen[x]) {
            throw FormatError("detector bank: missing arm '" + std::string(arm_name(kArms[x])) + "'");
        }
    }
    try {
        bank.validate();
    } catch (const std::invalid_argument &e) {
        throw FormatError(std::string("detector bank: ") + e.what());
    }
    return bank;
}

void write_transcript_csv(std::ostream &out, const ProtocolTranscript &transcript) {
    out << "round,kind,setting_a,setting_ap,setting_b,setting_bp,l_a,l_ap,l_b,l_bp,"
           "announced_a,announced_ap,announced_b,announced_bp\n";
    for (const auto &r : transcript.rounds) {
        out << r.id << ',' << round_kind_name(r.kind);
        for (const auto &s : r.settings) {
            out << ',' << format_setting(s);
        }
        for (int8_t l : r.outcomes) {
            out << ',' << (l > 0 ? "+1" : "-1");
        }
        for (size_t x = 0; x < 4; x++) {
            out << ',' << announced_name(r.setting_announced[x], r.outcome_announced[x]);
        }
        out << '\n';
    }
}

std::vector<RoundRecord> read_transcript_csv(std::istream &in) {
    auto rows = read_csv(in,
                         "round,kind,setting_a,setting_ap,setting_b,setting_bp,l_a,l_ap,l_b,l_bp,"
                         "announced_a,announced_ap,announced_b,announced_bp");
    std::vector<RoundRecord> out;
    for (const auto &[line_no, c] : rows) {
        RoundRecord r;
        r.id = parse_count(c[0], line_no);
        bool kind_ok = false;
        for (auto k : {RoundKind::kBell, RoundKind::kKey, RoundKind::kSifted}) {
            if (round_kind_name(k) == c[1]) {
                r.kind = k;
                kind_ok = true;
            }
        }
        if (!kind_ok) {
            throw FormatError("line " + std::to_string(line_no) + ": unknown round kind '" + c[1] + "'");
        }
        for (size_t x = 0; x < 4; x++) {
            r.settings[x] = parse_setting(c[2 + x]);
            const std::string &l = c[6 + x];
            if (l != "+1" && l != "-1") {
                throw FormatError("line " + std::to_string(line_no) + ": outcome must be +1 or -1");
            }
            r.outcomes[x] = static_cast<int8_t>(l == "+1" ? 1 : -1);
            const std::string &a = c[10 + x];
            if (a == "both") {
                r.setting_announced[x] = r.outcome_announced[x] = true;
            } else if (a == "setting") {
                r.setting_announced[x] = true;
            } else if (a != "none") {
                throw FormatError("line " + std::to_string(line_no) + ": announced must be none, setting or both");
            }
        }
        out.push_back(r);
    }
    return out;
}

std::string bits_to_hex(std::span<const uint8_t> bits) {
    static const char *kDigits = "0123456789abcdef";
    std::string hex;
    for (size_t i = 0; i < bits.size(); i += 4) {
        int nibble = 0;
        for (size_t b = 0; b < 4; b++) {
            nibble = 2 * nibble + ((i + b < bits.size()) ? (bits[i + b] & 1) : 0);
        }
        hex.push_back(kDigits[nibble]);
    }
    return hex;
}

std::vector<uint8_t> hex_to_bits(std::string_view hex, size_t n_bits) {
    if (hex.size() * 4 < n_bits) {
        throw FormatError("hex key shorter than the declared bit length");
    }
    std::vector<uint8_t> bits;
    for (char ch : hex) {
        int v;
        if (ch >= '0' && ch <= '9') {
            v = ch - '0';
        } else if (ch >= 'a' && ch <= 'f') {
            v = ch - 'a' + 10;
        } else {
            throw FormatError(std::string("invalid hex digit '") + ch + "'");
        }
        for (int b = 3; b >= 0; b--) {
            if (bits.size() < n_bits) {
                bits.push_back(static_cast<uint8_t>((v >> b) & 1));
            }
        }
    }
    return bits;
}

json security_report_to_json(const SecurityReport &report) {
    json j;
    j["s_estimate"] = report.s_estimate;
    j["s_error"] = report.s_error;
    j["k_sigma"] = report.k_sigma;
    j["violation"] = report.violation;
    j["rounds_used"] = report.rounds_used;
    j["rounds_per_setting"] = report.rounds_per_setting;
    j["correlations"] = report.table.values;
    if (report.table.errors) {
        j["correlation_errors"] = *report.table.errors;
    }
    return j;
}

SecurityReport security_report_from_json(const json &j) {
    SecurityReport r;
    try {
        r.s_estimate = j.at("s_estimate").get<double>();
        r.s_error = j.at("s_error").get<double>();
        r.k_sigma = j.at("k_sigma").get<double>();
        r.violation = j.at("violation").get<bool>();
        r.rounds_used = j.at("rounds_used").get<uint64_t>();
        r.rounds_per_setting = j.at("rounds_per_setting").get<std::array<uint64_t, 16>>();
        r.table.values = j.at("correlations").get<std::array<double, 16>>();
        if (j.contains("correlation_errors")) {
            r.table.errors = j.at("correlation_errors").get<std::array<double, 16>>();
        }
    } catch (const json::exception &e) {
        throw FormatError(std::string("security report: ") + e.what());
    }
    return r;
}

}  // namespace fourphoton
