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

// Batch command-line surface.
//
//   fourphoton state     [--state NAME] [--check-oracle] [--fock-out PATH]
//   fourphoton correlate [--quad a,ap,b,bp] [--scan N [--events N --seed S]]
//   fourphoton bell      --exact | --search | --events N --seed S [--corrected]
//   fourphoton counts    [--basis HV|pm45] [--events N --seed S]
//   fourphoton qkd       --rounds N --seed S [--mode M] [--eve arm:basis]
//
// Every flag may also come from a JSON object given with --config; keys are
// the flag names with dashes replaced by underscores, plus "command". Flags
// override the file. Unknown keys are rejected.
//
// Exit codes: 0 success, 1 failed oracle check, 2 configuration error,
// 3 insufficient data.

#ifndef FOURPHOTON_CLI_H_
#define FOURPHOTON_CLI_H_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fourphoton {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInsufficientData = 3;

struct RunConfig {
    std::string command;
    std::optional<uint64_t> seed;
    uint64_t events = 0;
    uint64_t rounds = 100000;
    double visibility = 1.0;
    std::string bank;
    std::string settings = "paper";
    /// Empty: human-readable summary on stdout.
    std::string format;
    std::string out;
    std::string state = "canonical";
    std::string model = "closed_form";
    std::string quad = "0,0,0,0";
    int scan = 0;
    bool exact = false;
    bool search = false;
    bool corrected = false;
    bool check_oracle = false;
    std::string resolution = "pi/12";
    std::string basis = "HV";
    std::string mode = "four_party";
    std::string eve;
    double key_fraction = 0.5;
    std::string three_party_basis = "HV";
    std::string reveal = "a,ap";
    double k_sigma = 3;
    std::string frames;
    std::string frames_out;
    std::string fock_out;
    std::string report_out;
    std::string keys_out;
};

/// Runs one command. `args` excludes the program name.
int execute(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

}  // namespace fourphoton

#endif
