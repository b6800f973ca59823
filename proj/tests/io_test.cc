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
#include <sstream>

#include "gtest/gtest.h"

using namespace fourphoton;

TEST(io, parse_angle_forms) {
    EXPECT_EQ(parse_angle("pi/4"), kPi / 4);
    EXPECT_EQ(parse_angle("-pi/4"), -kPi / 4);
    EXPECT_EQ(parse_angle("3pi/4"), 3 * kPi / 4);
    EXPECT_EQ(parse_angle("3*pi/2"), 3 * kPi / 2);
    EXPECT_EQ(parse_angle("2pi"), 2 * kPi);
    EXPECT_EQ(parse_angle("pi"), kPi);
    EXPECT_EQ(parse_angle("0.5"), 0.5);
    EXPECT_EQ(parse_angle("-1e-3"), -1e-3);
    EXPECT_THROW(parse_angle("pie"), FormatError);
    EXPECT_THROW(parse_angle("pi/0"), FormatError);
    EXPECT_THROW(parse_angle("1.5x"), FormatError);
    EXPECT_THROW(parse_angle(""), FormatError);
}

TEST(io, settings_text) {
    EXPECT_FALSE(parse_setting("HV").is_equatorial());
    EXPECT_EQ(parse_setting("pi/2").phase(), kPi / 2);
    EXPECT_EQ(format_setting(MeasurementSetting::computational()), "HV");
    EXPECT_EQ(format_setting(MeasurementSetting::equatorial(kPi / 4)), "0.785398163397");
    EXPECT_EQ(format_float(1.0 / 3), "0.333333333333");
    EXPECT_EQ(format_float(-0.0), "0");
}

TEST(io, state_json_round_trip) {
    auto j = state_to_json(canonical_psi4());
    ASSERT_EQ(j.size(), 16u);
    auto back = state_from_json(j);
    for (size_t k = 0; k < 16; k++) {
        EXPECT_EQ(back[k], canonical_psi4()[k]);
    }
    EXPECT_THROW(state_from_json(nlohmann::json::array()), FormatError);
    j[3] = "x";
    EXPECT_THROW(state_from_json(j), FormatError);
}

TEST(io, fock_json_round_trip) {
    FockVector arms = apply_beam_splitters(two_pair_source(), {});
    auto back = fock_from_json(fock_to_json(arms), ModeSet::kArms);
    EXPECT_EQ(back.terms, arms.terms);
    EXPECT_THROW(fock_from_json(nlohmann::json::parse(R"([{"occupation": [1], "re": 1, "im": 0}])"), ModeSet::kArms),
                 FormatError);
    EXPECT_THROW(fock_from_json(nlohmann::json::parse(R"([{"occupation": [0,0,0,0,0,0,0,1], "re": 1}])"),
                                ModeSet::kArms),
                 FormatError);
}

TEST(io, etable_round_trip) {
    ETable t = make_table(paper_optimal_settings(), correlation_closed_form);
    std::ostringstream os;
    write_etable_csv(os, t);
    std::istringstream is(os.str());
    ETable back = read_etable_csv(is);
    EXPECT_FALSE(back.errors.has_value());
    for (size_t i = 0; i < 16; i++) {
        EXPECT_NEAR(back.values[i], t.values[i], 1e-11);
    }
    std::array<double, 16> err;
    err.fill(0.04);
    t.errors = err;
    std::ostringstream os2;
    write_etable_csv(os2, t);
    std::istringstream is2(os2.str());
    EXPECT_EQ(read_etable_csv(is2).errors, t.errors);
}

TEST(io, etable_diagnostics) {
    std::istringstream bad_header("k,l,m,n,E\n");
    EXPECT_THROW(read_etable_csv(bad_header), FormatError);
    std::istringstream short_table("k,l,m,n,E,sigma\n1,1,1,1,0.5,\n");
    EXPECT_THROW(read_etable_csv(short_table), FormatError);
    std::istringstream bad_index("k,l,m,n,E,sigma\n3,1,1,1,0.5,\n");
    try {
        read_etable_csv(bad_index);
        FAIL();
    } catch (const FormatError &e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
}

TEST(io, settings_round_trip) {
    std::ostringstream os;
    write_settings_csv(os, paper_optimal_settings());
    std::istringstream is(os.str());
    BellSettings back = read_settings_csv(is);
    for (size_t x = 0; x < 4; x++) {
        for (size_t k = 0; k < 2; k++) {
            EXPECT_NEAR(back.phases[x][k], paper_optimal_settings().phases[x][k], 1e-11);
        }
    }
    std::istringstream exact("arm,index,phi_radians\na,1,0\na,2,pi/2\nap,1,pi/4\nap,2,-pi/4\n"
                             "b,1,pi/4\nb,2,-pi/4\nbp,1,pi/4\nbp,2,-pi/4\n");
    BellSettings parsed = read_settings_csv(exact);
    EXPECT_EQ(parsed.phases[0][1], kPi / 2);
    EXPECT_EQ(parsed.phases[1][1], -kPi / 4);
    std::istringstream missing("arm,index,phi_radians\na,1,0\n");
    EXPECT_THROW(read_settings_csv(missing), FormatError);
}

TEST(io, frames_round_trip) {
    auto run = run_bell(canonical_psi4(), {0.9}, {}, paper_optimal_settings(), 500, 4, false);
    std::ostringstream os;
    write_frames_csv(os, run.frames);
    std::istringstream is(os.str());
    auto frames = read_frames_csv(is);
    ASSERT_EQ(frames.size(), 16u);
    for (size_t i = 0; i < 16; i++) {
        EXPECT_EQ(frames[i].counts, run.frames[i].counts);
        for (size_t x = 0; x < 4; x++) {
            EXPECT_NEAR(frames[i].settings[x].phase(), run.frames[i].settings[x].phase(), 1e-11);
        }
    }
    std::istringstream mismatched(
        "setting_a,setting_ap,setting_b,setting_bp,outcome,count\nHV,0,0,0,++++,3\n");
    EXPECT_THROW(read_frames_csv(mismatched), FormatError);
}

TEST(io, bank_json) {
    DetectorBank bank;
    bank.efficiency[3] = {0.5, 0.25};
    auto back = bank_from_json(bank_to_json(bank));
    EXPECT_EQ(back, bank);
    EXPECT_THROW(bank_from_json(nlohmann::json::parse(R"({"a":[1,1],"ap":[1,1],"b":[1,1]})")), FormatError);
    EXPECT_THROW(bank_from_json(nlohmann::json::parse(R"({"a":[1,1],"ap":[1,1],"b":[1,1],"bp":[1,2]})")),
                 FormatError);
    EXPECT_THROW(bank_from_json(nlohmann::json::parse(R"({"a":[1,1],"ap":[1,1],"b":[1,1],"bp":[1,1],"c":[1,1]})")),
                 FormatError);
}

TEST(io, transcript_round_trip) {
    ProtocolOptions o;
    o.seed = 5;
    auto t = run_protocol(300, o);
    std::ostringstream os;
    write_transcript_csv(os, t);
    std::istringstream is(os.str());
    auto rounds = read_transcript_csv(is);
    ASSERT_EQ(rounds.size(), t.rounds.size());
    for (size_t i = 0; i < rounds.size(); i++) {
        EXPECT_EQ(rounds[i].id, t.rounds[i].id);
        EXPECT_EQ(rounds[i].kind, t.rounds[i].kind);
        EXPECT_EQ(rounds[i].outcomes, t.rounds[i].outcomes);
        EXPECT_EQ(rounds[i].setting_announced, t.rounds[i].setting_announced);
        EXPECT_EQ(rounds[i].outcome_announced, t.rounds[i].outcome_announced);
    }
}

TEST(io, hex_keys) {
    std::vector<uint8_t> bits{1, 0, 1, 1, 0, 0, 0, 1, 1};
    std::string hex = bits_to_hex(bits);
    EXPECT_EQ(hex, "b18");
    EXPECT_EQ(hex_to_bits(hex, bits.size()), bits);
    EXPECT_THROW(hex_to_bits("zz", 8), FormatError);
    EXPECT_THROW(hex_to_bits("a", 8), FormatError);
}

TEST(io, security_report_round_trip) {
    ProtocolOptions o;
    o.seed = 8;
    auto report = security_check(run_protocol(5000, o));
    auto back = security_report_from_json(security_report_to_json(report));
    EXPECT_EQ(back.s_estimate, report.s_estimate);
    EXPECT_EQ(back.s_error, report.s_error);
    EXPECT_EQ(back.violation, report.violation);
    EXPECT_EQ(back.rounds_per_setting, report.rounds_per_setting);
    EXPECT_EQ(back.table.values, report.table.values);
    EXPECT_THROW(security_report_from_json(nlohmann::json::object()), FormatError);
}
