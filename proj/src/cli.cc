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

#include "fourphoton/cli.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "fourphoton/bell.h"
#include "fourphoton/experiment.h"
#include "fourphoton/fit.h"
#include "fourphoton/fock.h"
#include "fourphoton/io.h"
#include "fourphoton/qkd.h"
#include "fourphoton/state.h"
#include "json.hpp"

namespace fourphoton {

namespace {

using nlohmann::json;

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

const std::vector<std::string> kCommands{"state", "correlate", "bell", "counts", "qkd"};

std::string fixed12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12f", v);
    return buf;
}

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

// ---- config file -----------------------------------------------------------

struct Field {
    std::set<std::string> commands;
    std::function<void(RunConfig &, const json &, const std::string &)> set;
};

template <typename T>
T field_value(const json &v, const std::string &key) {
    try {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) {
                throw ConfigError("");
            }
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) {
                throw ConfigError("");
            }
        } else if constexpr (std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) {
                throw ConfigError("");
            }
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) {
                throw ConfigError("");
            }
        } else {
            if (!v.is_number()) {
                throw ConfigError("");
            }
        }
        return v.get<T>();
    } catch (const std::exception &) {
        const char *what = std::is_same_v<T, bool>          ? "a boolean"
                           : std::is_same_v<T, std::string> ? "a string"
                           : std::is_unsigned_v<T>          ? "a non-negative integer"
                           : std::is_integral_v<T>          ? "an integer"
                                                            : "a number";
        throw ConfigError("config field '" + key + "': expected " + what + ", got " + v.dump());
    }
}

template <typename T>
Field field(std::set<std::string> commands, T RunConfig::*member) {
    return {std::move(commands),
            [member](RunConfig &c, const json &v, const std::string &key) { c.*member = field_value<T>(v, key); }};
}

const std::map<std::string, Field> &config_fields() {
    static const std::set<std::string> all(kCommands.begin(), kCommands.end());
    static const std::set<std::string> stochastic{"correlate", "bell", "counts", "qkd"};
    static const std::map<std::string, Field> fields{
        {"command", {all, [](RunConfig &, const json &, const std::string &) {}}},
        {"seed", {stochastic, [](RunConfig &c, const json &v, const std::string &key) {
                      c.seed = field_value<uint64_t>(v, key);
                  }}},
        {"events", field({"correlate", "bell", "counts"}, &RunConfig::events)},
        {"rounds", field({"qkd"}, &RunConfig::rounds)},
        {"visibility", field({"correlate", "bell", "counts", "qkd"}, &RunConfig::visibility)},
        {"bank", field({"correlate", "bell", "counts"}, &RunConfig::bank)},
        {"settings", field({"bell"}, &RunConfig::settings)},
        {"format", field(all, &RunConfig::format)},
        {"out", field(all, &RunConfig::out)},
        {"state", field({"state", "correlate", "bell", "counts"}, &RunConfig::state)},
        {"model", field({"bell"}, &RunConfig::model)},
        {"quad", field({"correlate"}, &RunConfig::quad)},
        {"scan", field({"correlate"}, &RunConfig::scan)},
        {"exact", field({"bell"}, &RunConfig::exact)},
        {"search", field({"bell"}, &RunConfig::search)},
        {"corrected", field({"correlate", "bell"}, &RunConfig::corrected)},
        {"check_oracle", field({"state"}, &RunConfig::check_oracle)},
        {"resolution", field({"bell"}, &RunConfig::resolution)},
        {"basis", field({"counts"}, &RunConfig::basis)},
        {"mode", field({"qkd"}, &RunConfig::mode)},
        {"eve", field({"qkd"}, &RunConfig::eve)},
        {"key_fraction", field({"qkd"}, &RunConfig::key_fraction)},
        {"three_party_basis", field({"qkd"}, &RunConfig::three_party_basis)},
        {"reveal", field({"qkd"}, &RunConfig::reveal)},
        {"k_sigma", field({"qkd"}, &RunConfig::k_sigma)},
        {"frames", field({"bell"}, &RunConfig::frames)},
        {"frames_out", field({"bell", "counts"}, &RunConfig::frames_out)},
        {"fock_out", field({"state"}, &RunConfig::fock_out)},
        {"report_out", field({"qkd"}, &RunConfig::report_out)},
        {"keys_out", field({"qkd"}, &RunConfig::keys_out)},
    };
    return fields;
}

json load_config_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error &e) {
        throw ConfigError("config file '" + path + "': " + e.what());
    }
    if (!j.is_object()) {
        throw ConfigError("config file '" + path + "': top level must be a JSON object");
    }
    return j;
}

void apply_config(RunConfig &cfg, const json &j) {
    const auto &fields = config_fields();
    for (const auto &[key, value] : j.items()) {
        auto it = fields.find(key);
        if (it == fields.end()) {
            throw ConfigError("config: unknown field '" + key + "'");
        }
        if (!it->second.commands.count(cfg.command)) {
            throw ConfigError("config: field '" + key + "' does not apply to command '" + cfg.command + "'");
        }
        it->second.set(cfg, value, key);
    }
}

// ---- option parsing helpers ------------------------------------------------

uint64_t require_seed(const RunConfig &cfg) {
    if (!cfg.seed) {
        throw ConfigError(cfg.command + ": --seed is required for simulated runs");
    }
    return *cfg.seed;
}

StateVector4 named_state(const std::string &name) {
    if (name == "canonical") {
        return canonical_psi4();
    }
    if (name == "singlet_signs") {
        return psi4_singlet_signs();
    }
    if (name == "ghz") {
        return ghz4();
    }
    if (name == "epr") {
        return epr_product(EprKind::kPsiPlus);
    }
    throw ConfigError("--state must be canonical, singlet_signs, ghz or epr, got '" + name + "'");
}

NoiseModel noise_from(const RunConfig &cfg) {
    NoiseModel n{cfg.visibility};
    try {
        n.validate();
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("--visibility: ") + e.what());
    }
    return n;
}

DetectorBank bank_from(const RunConfig &cfg) {
    if (cfg.bank.empty()) {
        return DetectorBank::ideal();
    }
    std::ifstream in(cfg.bank);
    if (!in) {
        throw ConfigError("cannot open bank file '" + cfg.bank + "'");
    }
    try {
        return bank_from_json(json::parse(in));
    } catch (const json::parse_error &e) {
        throw ConfigError("bank file '" + cfg.bank + "': " + e.what());
    } catch (const FormatError &e) {
        throw ConfigError("bank file '" + cfg.bank + "': " + e.what());
    }
}

BellSettings settings_from(const RunConfig &cfg) {
    if (cfg.settings == "paper") {
        return paper_optimal_settings();
    }
    std::ifstream in(cfg.settings);
    if (!in) {
        throw ConfigError("cannot open settings file '" + cfg.settings + "'");
    }
    try {
        return read_settings_csv(in);
    } catch (const FormatError &e) {
        throw ConfigError("settings file '" + cfg.settings + "': " + e.what());
    }
}

SettingQuad parse_quad(const std::string &text) {
    std::vector<double> phases;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        phases.push_back(parse_angle(item));
    }
    if (phases.size() != 4) {
        throw ConfigError("--quad needs four comma-separated angles, got '" + text + "'");
    }
    return {phases[0], phases[1], phases[2], phases[3]};
}

MeasurementSetting named_basis(const std::string &name, const std::string &flag) {
    if (name == "HV") {
        return MeasurementSetting::computational();
    }
    if (name == "pm45") {
        return MeasurementSetting::equatorial(0);
    }
    throw ConfigError(flag + " must be HV or pm45, got '" + name + "'");
}

EveModel parse_eve(const std::string &text) {
    if (text.empty() || text == "none") {
        return EveModel::none();
    }
    auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("--eve must look like arm:basis (e.g. a:HV or bp:pi/4), got '" + text + "'");
    }
    try {
        return EveModel::intercept_resend(parse_arm(text.substr(0, colon)), parse_setting(text.substr(colon + 1)));
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("--eve: ") + e.what());
    }
}

std::pair<Arm, Arm> parse_reveal(const std::string &text) {
    auto comma = text.find(',');
    if (comma == std::string::npos) {
        throw ConfigError("--reveal must name two arms, e.g. a,ap");
    }
    try {
        return {parse_arm(text.substr(0, comma)), parse_arm(text.substr(comma + 1))};
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("--reveal: ") + e.what());
    }
}

// ---- output ----------------------------------------------------------------

struct Artifact {
    std::string csv;
    json doc;
};

std::string resolved_format(const RunConfig &cfg) {
    std::string f = cfg.format;
    if (f.empty() && !cfg.out.empty()) {
        f = cfg.out.size() >= 5 && cfg.out.ends_with(".json") ? "json" : "csv";
    }
    if (!f.empty() && f != "csv" && f != "json") {
        throw ConfigError("--format must be csv or json, got '" + f + "'");
    }
    return f;
}

void write_text_file(const std::string &path, const std::string &text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw ConfigError("cannot write '" + path + "'");
    }
    f << text;
}

// The summary goes to stdout unless the artifact itself is requested there.
void emit(const RunConfig &cfg, const std::string &summary, const Artifact &artifact, std::ostream &out) {
    const std::string format = resolved_format(cfg);
    const std::string body = format == "json" ? artifact.doc.dump(2) + "\n" : artifact.csv;
    if (!cfg.out.empty()) {
        write_text_file(cfg.out, body);
        out << summary;
    } else if (!format.empty()) {
        out << body;
    } else {
        out << summary;
    }
}

json etable_json(const ETable &t) {
    json j;
    j["values"] = t.values;
    if (t.errors) {
        j["errors"] = *t.errors;
    }
    return j;
}

json settings_json(const BellSettings &s) {
    json j = json::object();
    for (Arm arm : kArms) {
        j[std::string(arm_name(arm))] = s.phases[static_cast<size_t>(arm)];
    }
    return j;
}

std::string distribution_csv(const SettingsQuad &settings, const std::array<double, 16> &p) {
    std::ostringstream os;
    os << "outcome,probability\n";
    for (size_t k = 0; k < 16; k++) {
        os << outcome_label(settings, k) << ',' << format_float(p[k]) << '\n';
    }
    return os.str();
}

// ---- commands --------------------------------------------------------------

int cmd_state(const RunConfig &cfg, std::ostream &out) {
    const StateVector4 state = named_state(cfg.state);
    std::ostringstream summary;
    std::ostringstream csv;
    json doc;
    doc["state"] = cfg.state;
    doc["amplitudes"] = state_to_json(state);
    csv << "index,pattern,re,im\n";
    summary << "state " << cfg.state << "\n";
    static const char *kPol = "HV";
    for (size_t k = 0; k < 16; k++) {
        std::string pattern;
        for (int x = 3; x >= 0; x--) {
            pattern.push_back(kPol[(k >> x) & 1]);
        }
        const Complex a = state[k];
        csv << k << ',' << pattern << ',' << format_float(a.real()) << ',' << format_float(a.imag()) << '\n';
        if (std::abs(a) > kExactTolerance) {
            summary << "  " << pattern << "  " << format_float(a.real());
            if (std::abs(a.imag()) > kExactTolerance) {
                summary << (a.imag() < 0 ? " - " : " + ") << format_float(std::abs(a.imag())) << "i";
            }
            summary << "\n";
        }
    }
    const auto d = decompose_ghz_epr(state);
    doc["decomposition"] = {{"ghz", {d.ghz_coef.real(), d.ghz_coef.imag()}},
                            {"epr", {d.epr_coef.real(), d.epr_coef.imag()}},
                            {"residual_norm", d.residual_norm}};
    summary << "decomposition ghz = " << format_float(d.ghz_coef.real()) << ", epr = " << format_float(d.epr_coef.real())
            << ", residual = " << format_float(d.residual_norm) << "\n";

    int status = kExitOk;
    if (cfg.check_oracle) {
        const Postselection post = oracle_state();
        if (!post.state) {
            throw InsufficientDataError("oracle: post-selection left no amplitude");
        }
        const double mag = std::abs(overlap(*post.state, state));
        const bool ok = std::abs(mag - 1) <= kExactTolerance && std::abs(post.success_probability - 0.25) <= kExactTolerance;
        doc["oracle"] = {{"overlap", mag}, {"success_probability", post.success_probability}, {"match", ok}};
        summary << "oracle overlap " << fixed12(mag) << "\n";
        summary << "oracle success probability " << fixed12(post.success_probability) << "\n";
        summary << "oracle check " << (ok ? "passed" : "FAILED") << "\n";
        status = ok ? kExitOk : kExitCheckFailed;
    }
    if (!cfg.fock_out.empty()) {
        write_text_file(cfg.fock_out, fock_to_json(apply_beam_splitters(two_pair_source(), {})).dump(2) + "\n");
    }
    emit(cfg, summary.str(), {csv.str(), doc}, out);
    return status;
}

int cmd_correlate(const RunConfig &cfg, std::ostream &out) {
    const StateVector4 state = named_state(cfg.state);
    const NoiseModel noise = noise_from(cfg);
    std::ostringstream summary;
    std::ostringstream csv;
    json doc;
    if (cfg.scan == 0) {
        const SettingQuad q = parse_quad(cfg.quad);
        const double closed = cfg.visibility * correlation_closed_form(q);
        const double exact = correlation_exact(state, q, cfg.visibility);
        csv << "phi_a,phi_ap,phi_b,phi_bp,E_closed_form,E_state\n";
        for (size_t x = 0; x < 4; x++) {
            csv << format_float(q[x]) << ',';
        }
        csv << format_float(closed) << ',' << format_float(exact) << '\n';
        doc = {{"quad", {q[0], q[1], q[2], q[3]}}, {"visibility", cfg.visibility}, {"closed_form", closed},
               {"state", exact}};
        summary << "E closed form = " << format_float(closed) << "\n";
        summary << "E " << cfg.state << " = " << format_float(exact) << "\n";
    } else if (cfg.events == 0) {
        if (cfg.scan < 1) {
            throw ConfigError("--scan must be positive");
        }
        csv << "phi,E,sigma\n";
        doc["points"] = json::array();
        for (int k = 0; k < cfg.scan; k++) {
            const double phi = 2 * kPi * k / cfg.scan;
            const double e = correlation_exact(state, SettingQuad(phi, 0, 0, 0), cfg.visibility);
            csv << format_float(phi) << ',' << format_float(e) << ",\n";
            doc["points"].push_back({{"phi", phi}, {"E", e}});
            summary << "phi = " << format_float(phi) << "  E = " << format_float(e) << "\n";
        }
    } else {
        const DetectorBank bank = bank_from(cfg);
        if (cfg.scan < 3) {
            throw ConfigError("--scan needs at least 3 points for a fit");
        }
        const ScanDataset ds = run_scan(state, noise, bank, cfg.scan, cfg.events, require_seed(cfg));
        auto pts = ds.fit_points();
        if (!cfg.corrected) {
            // run_scan reports corrected rates; redo from raw counts on request.
            for (size_t i = 0; i < pts.size(); i++) {
                auto est = correlation_estimate(ds.points[i].frame, false);
                pts[i].value = est.value;
                pts[i].sigma = est.std_error;
            }
        }
        const ScanFit fit = fit_scan(pts);
        csv << "phi,E,sigma\n";
        doc["points"] = json::array();
        for (const auto &p : pts) {
            csv << format_float(p.phase) << ',' << format_float(p.value) << ',' << format_float(p.sigma) << '\n';
            doc["points"].push_back({{"phi", p.phase}, {"E", p.value}, {"sigma", p.sigma}});
            summary << "phi = " << format_float(p.phase) << "  E = " << format_float(p.value) << " +- "
                    << format_float(p.sigma) << "\n";
        }
        doc["fit"] = {{"visibility", fit.visibility},
                      {"visibility_error", fit.visibility_error},
                      {"phase_offset", fit.phase_offset},
                      {"phase_offset_error", fit.phase_offset_error},
                      {"offset", fit.offset},
                      {"offset_error", fit.offset_error}};
        summary << "fitted visibility = " << format_float(fit.visibility) << " +- "
                << format_float(fit.visibility_error) << "\n";
    }
    emit(cfg, summary.str(), {csv.str(), doc}, out);
    return kExitOk;
}

SearchOptions search_options(const RunConfig &cfg) {
    SearchOptions o;
    if (cfg.model == "closed_form") {
        o.model = CorrelationModel::kClosedForm;
    } else if (cfg.model == "ghz") {
        o.model = CorrelationModel::kGhz;
    } else if (cfg.model == "state") {
        o.model = CorrelationModel::kState;
        o.state = named_state(cfg.state);
    } else {
        throw ConfigError("--model must be closed_form, ghz or state, got '" + cfg.model + "'");
    }
    o.visibility = noise_from(cfg).visibility;
    o.resolution = parse_angle(cfg.resolution);
    return o;
}

int cmd_bell(const RunConfig &cfg, std::ostream &out) {
    std::ostringstream summary;
    if (cfg.exact && cfg.search) {
        throw ConfigError("bell: --exact and --search are exclusive");
    }
    if (cfg.exact) {
        const SearchOptions o = search_options(cfg);
        const BellSettings settings = settings_from(cfg);
        const ETable t = make_table(settings, correlation_for(o));
        const double s = bell_functional(t);
        const CriticalVisibility cv = critical_visibility(settings, correlation_for(o));
        std::ostringstream csv;
        write_etable_csv(csv, t);
        json doc = {{"settings", settings_json(settings)},
                    {"correlations", etable_json(t)},
                    {"S", s},
                    {"critical_visibility", cv.value}};
        summary << "S = " << format_float(s) << " (" << fixed3(s) << ")\n";
        summary << "critical visibility = " << format_float(cv.value) << " (" << fixed3(cv.value) << ")\n";
        emit(cfg, summary.str(), {csv.str(), doc}, out);
        return kExitOk;
    }
    if (cfg.search) {
        const SearchResult r = settings_search(search_options(cfg));
        std::ostringstream csv;
        write_settings_csv(csv, r.settings);
        json doc = {{"settings", settings_json(r.settings)},
                    {"S", r.s},
                    {"grid_S", r.grid_s},
                    {"configurations", r.configurations}};
        summary << "grid S = " << format_float(r.grid_s) << " over " << r.configurations << " configurations\n";
        summary << "refined S = " << format_float(r.s) << "\n";
        for (Arm arm : kArms) {
            const auto &p = r.settings.phases[static_cast<size_t>(arm)];
            summary << "  " << arm_name(arm) << ": " << format_float(p[0]) << ", " << format_float(p[1]) << "\n";
        }
        emit(cfg, summary.str(), {csv.str(), doc}, out);
        return kExitOk;
    }

    const BellSettings settings = settings_from(cfg);
    BellRunResult run;
    if (!cfg.frames.empty()) {
        std::ifstream in(cfg.frames);
        if (!in) {
            throw ConfigError("cannot open frames file '" + cfg.frames + "'");
        }
        std::vector<CoincidenceFrame> frames;
        try {
            frames = read_frames_csv(in);
        } catch (const FormatError &e) {
            throw ConfigError("frames file '" + cfg.frames + "': " + e.what());
        }
        if (frames.size() != 16) {
            throw InsufficientDataError("frames file must hold 16 frames, found " + std::to_string(frames.size()));
        }
        std::array<CoincidenceFrame, 16> arr;
        const DetectorBank bank = bank_from(cfg);
        for (size_t i = 0; i < 16; i++) {
            arr[i] = frames[i];
            arr[i].bank = bank;
        }
        run = evaluate_bell_frames(settings, arr, cfg.corrected);
    } else {
        if (cfg.events == 0) {
            throw ConfigError("bell: give --exact, --search, --frames FILE or --events N");
        }
        run = run_bell(named_state(cfg.state), noise_from(cfg), bank_from(cfg), settings, cfg.events,
                       require_seed(cfg), cfg.corrected);
    }
    if (!cfg.frames_out.empty()) {
        std::ostringstream fcsv;
        write_frames_csv(fcsv, run.frames);
        write_text_file(cfg.frames_out, fcsv.str());
    }
    uint64_t total = 0;
    for (const auto &f : run.frames) {
        total += f.total();
    }
    std::ostringstream csv;
    write_etable_csv(csv, run.table);
    json doc = {{"settings", settings_json(run.settings)},
                {"correlations", etable_json(run.table)},
                {"S", run.s},
                {"S_error", run.s_error},
                {"corrected", run.corrected},
                {"fourfold_events", total}};
    summary << "S = " << format_float(run.s) << " +- " << format_float(run.s_error)
            << (run.corrected ? " (efficiency corrected)" : " (raw)") << "\n";
    summary << "violation margin (S - 1) / sigma = " << format_float((run.s - 1) / run.s_error) << "\n";
    summary << "fourfold events = " << total << " (" << format_float(fourfolds_to_hours(total)) << " h at 150/h)\n";
    emit(cfg, summary.str(), {csv.str(), doc}, out);
    return kExitOk;
}

int cmd_counts(const RunConfig &cfg, std::ostream &out) {
    const MeasurementSetting basis = named_basis(cfg.basis, "--basis");
    const SettingsQuad settings{basis, basis, basis, basis};
    const StateVector4 state = named_state(cfg.state);
    const NoiseModel noise = noise_from(cfg);
    std::ostringstream summary;
    if (cfg.events == 0) {
        const auto p = mixture_distribution(state, settings, noise);
        json doc = json::object();
        for (size_t k = 0; k < 16; k++) {
            doc[outcome_label(settings, k)] = p[k];
        }
        summary << "outcome  probability\n";
        for (size_t k = 0; k < 16; k++) {
            summary << outcome_label(settings, k) << "     " << format_float(p[k]) << "\n";
        }
        emit(cfg, summary.str(), {distribution_csv(settings, p), doc}, out);
        return kExitOk;
    }
    const CoincidenceFrame frame =
        sample_frame(state, settings, noise, bank_from(cfg), cfg.events, require_seed(cfg));
    std::ostringstream csv;
    write_frames_csv(csv, std::span<const CoincidenceFrame>(&frame, 1));
    if (!cfg.frames_out.empty()) {
        write_text_file(cfg.frames_out, csv.str());
    }
    json doc = json::object();
    summary << "outcome  count\n";
    for (size_t k = 0; k < 16; k++) {
        doc[outcome_label(settings, k)] = frame.counts[k];
        summary << outcome_label(settings, k) << "     " << frame.counts[k] << "\n";
    }
    summary << "fourfold events = " << frame.total() << " of " << frame.emissions_attempted << " emissions\n";
    emit(cfg, summary.str(), {csv.str(), doc}, out);
    return kExitOk;
}

json key_json(const KeyMaterial &km) {
    json j;
    j["holders"] = km.holders;
    j["bits"] = km.bits.empty() ? 0 : km.bits[0].size();
    j["candidate_rounds"] = km.candidate_rounds;
    j["kept_fraction"] = km.kept_fraction;
    j["three_way_agreement"] = km.three_way_agreement;
    j["agreement"] = json::array();
    for (const auto &a : km.agreement) {
        j["agreement"].push_back(
            {{"first", km.holders[a.first]}, {"second", km.holders[a.second]}, {"compared", a.compared}, {"qber", a.qber}});
    }
    return j;
}

int cmd_qkd(const RunConfig &cfg, std::ostream &out) {
    ProtocolOptions o;
    try {
        o.mode = parse_protocol_mode(cfg.mode);
    } catch (const std::invalid_argument &e) {
        throw ConfigError(std::string("--mode: ") + e.what());
    }
    if (!(cfg.key_fraction > 0 && cfg.key_fraction < 1)) {
        throw ConfigError("--key-fraction must lie strictly between 0 and 1");
    }
    if (cfg.rounds == 0) {
        throw ConfigError("--rounds must be positive");
    }
    o.key_fraction = cfg.key_fraction;
    o.noise = noise_from(cfg);
    o.eve = parse_eve(cfg.eve);
    o.three_party_basis = named_basis(cfg.three_party_basis, "--three-party-basis");
    o.seed = require_seed(cfg);
    const auto reveal = parse_reveal(cfg.reveal);

    const ProtocolTranscript t = run_protocol(cfg.rounds, o);
    const SecurityReport report = security_check(t, cfg.k_sigma);
    const KeyMaterial km =
        o.mode == ProtocolMode::kThreeParty ? distill_three_party(t) : extract_pair_keys(t, reveal.first, reveal.second);

    std::ostringstream summary;
    summary << "mode " << protocol_mode_name(o.mode) << ", " << cfg.rounds << " rounds\n";
    summary << "S = " << format_float(report.s_estimate) << " +- " << format_float(report.s_error) << " from "
            << report.rounds_used << " Bell rounds\n";
    summary << "violation (S - " << format_float(report.k_sigma) << " sigma > 1): " << (report.violation ? "yes" : "no")
            << "\n";
    summary << "key bits = " << km.bits[0].size() << " from " << km.candidate_rounds << " candidate rounds\n";
    for (const auto &a : km.agreement) {
        summary << "QBER " << km.holders[a.first] << "/" << km.holders[a.second] << " = " << format_float(a.qber)
                << "\n";
    }
    if (o.mode == ProtocolMode::kThreeParty) {
        summary << "kept fraction = " << format_float(km.kept_fraction)
                << ", three-way agreement = " << format_float(km.three_way_agreement) << "\n";
    }

    json doc = {{"security", security_report_to_json(report)}, {"keys", key_json(km)}};
    if (!cfg.report_out.empty()) {
        write_text_file(cfg.report_out, security_report_to_json(report).dump(2) + "\n");
    }
    if (!cfg.keys_out.empty()) {
        for (size_t h = 0; h < km.holders.size(); h++) {
            std::string name = km.holders[h] == "a*" ? "astar" : km.holders[h];
            write_text_file(cfg.keys_out + "_" + name + ".hex", bits_to_hex(km.bits[h]) + "\n");
        }
    }
    std::ostringstream csv;
    write_transcript_csv(csv, t);
    emit(cfg, summary.str(), {csv.str(), doc}, out);
    return kExitOk;
}

// ---- argument handling -----------------------------------------------------

void add_common(CLI::App &sub, RunConfig &cfg, std::string &config_path) {
    sub.add_option("--config", config_path, "JSON config file; flags override it");
    sub.add_option("--format", cfg.format, "Artifact format: csv or json");
    sub.add_option("--out", cfg.out, "Artifact path");
}

void add_seed(CLI::App &sub, uint64_t &seed) {
    sub.add_option("--seed", seed, "RNG seed (required for simulated runs)");
}

std::string find_command(const std::vector<std::string> &args) {
    for (const auto &a : args) {
        if (std::find(kCommands.begin(), kCommands.end(), a) != kCommands.end()) {
            return a;
        }
    }
    return "";
}

std::string find_config_path(const std::vector<std::string> &args) {
    for (size_t i = 0; i < args.size(); i++) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            return args[i + 1];
        }
        if (args[i].rfind("--config=", 0) == 0) {
            return args[i].substr(9);
        }
    }
    return "";
}

int run(std::vector<std::string> args, std::ostream &out, std::ostream &err) {
    RunConfig cfg;
    std::string command = find_command(args);
    const std::string config_path = find_config_path(args);
    json file;
    if (!config_path.empty()) {
        file = load_config_file(config_path);
        if (file.contains("command")) {
            if (!file["command"].is_string()) {
                throw ConfigError("config field 'command' must be a string");
            }
            const std::string fc = file["command"].get<std::string>();
            if (std::find(kCommands.begin(), kCommands.end(), fc) == kCommands.end()) {
                throw ConfigError("config field 'command': unknown command '" + fc + "'");
            }
            if (command.empty()) {
                command = fc;
                args.insert(args.begin(), fc);
            }
        }
    }
    cfg.command = command;
    if (!command.empty() && !file.is_null()) {
        apply_config(cfg, file);
    }

    CLI::App app{"Four-photon polarization entanglement toolkit"};
    app.require_subcommand(1);
    std::string config_dummy;
    uint64_t seed = 0;

    auto *state = app.add_subcommand("state", "Amplitudes, GHZ/EPR decomposition and the Fock-space oracle");
    add_common(*state, cfg, config_dummy);
    state->add_option("--state", cfg.state, "canonical, singlet_signs, ghz or epr");
    state->add_flag("--check-oracle", cfg.check_oracle, "Compare with the post-selected Fock-space state");
    state->add_option("--fock-out", cfg.fock_out, "Write the post-splitter Fock state as JSON");

    auto *correlate = app.add_subcommand("correlate", "Correlation function values and phase scans");
    add_common(*correlate, cfg, config_dummy);
    add_seed(*correlate, seed);
    correlate->add_option("--state", cfg.state, "canonical, singlet_signs, ghz or epr");
    correlate->add_option("--quad", cfg.quad, "Four analyzer phases a,ap,b,bp");
    correlate->add_option("--scan", cfg.scan, "Number of phi_a scan points");
    correlate->add_option("--events", cfg.events, "Emissions per scan point (0: exact)");
    correlate->add_option("--visibility", cfg.visibility, "Source visibility");
    correlate->add_option("--bank", cfg.bank, "Detector bank JSON");
    correlate->add_flag("--corrected", cfg.corrected, "Fit efficiency-corrected rates");

    auto *bell = app.add_subcommand("bell", "Bell functional: exact, grid search or simulated");
    add_common(*bell, cfg, config_dummy);
    add_seed(*bell, seed);
    bell->add_flag("--exact", cfg.exact, "Exact value from the correlation model");
    bell->add_flag("--search", cfg.search, "Grid search over analyzer settings");
    bell->add_option("--settings", cfg.settings, "'paper' for the standard optimal settings, or a settings CSV");
    bell->add_option("--model", cfg.model, "closed_form, ghz or state");
    bell->add_option("--state", cfg.state, "State for --model state and simulation");
    bell->add_option("--resolution", cfg.resolution, "Search grid step, e.g. pi/12");
    bell->add_option("--events", cfg.events, "Emissions per setting combination");
    bell->add_option("--visibility", cfg.visibility, "Source visibility");
    bell->add_option("--bank", cfg.bank, "Detector bank JSON");
    bell->add_flag("--corrected", cfg.corrected, "Use efficiency-corrected rates");
    bell->add_option("--frames", cfg.frames, "Re-evaluate stored frames instead of sampling");
    bell->add_option("--frames-out", cfg.frames_out, "Write the frames CSV");

    auto *counts = app.add_subcommand("counts", "Fourfold outcome distributions");
    add_common(*counts, cfg, config_dummy);
    add_seed(*counts, seed);
    counts->add_option("--basis", cfg.basis, "HV or pm45");
    counts->add_option("--state", cfg.state, "canonical, singlet_signs, ghz or epr");
    counts->add_option("--events", cfg.events, "Emissions to simulate (0: exact)");
    counts->add_option("--visibility", cfg.visibility, "Source visibility");
    counts->add_option("--bank", cfg.bank, "Detector bank JSON");
    counts->add_option("--frames-out", cfg.frames_out, "Write the frame CSV");

    auto *qkd = app.add_subcommand("qkd", "Key distribution protocol runs with a security check");
    add_common(*qkd, cfg, config_dummy);
    add_seed(*qkd, seed);
    qkd->add_option("--rounds", cfg.rounds, "Protocol rounds");
    qkd->add_option("--mode", cfg.mode, "four_party, secret_sharing or three_party");
    qkd->add_option("--eve", cfg.eve, "Intercept-resend as arm:basis, e.g. a:HV or b:pi/4");
    qkd->add_option("--key-fraction", cfg.key_fraction, "Probability of a key round");
    qkd->add_option("--visibility", cfg.visibility, "Source visibility");
    qkd->add_option("--three-party-basis", cfg.three_party_basis, "HV or pm45");
    qkd->add_option("--reveal", cfg.reveal, "Arms announcing their results for pair keys");
    qkd->add_option("--k-sigma", cfg.k_sigma, "Security threshold in standard errors");
    qkd->add_option("--report-out", cfg.report_out, "Write the security report JSON");
    qkd->add_option("--keys-out", cfg.keys_out, "Prefix for per-holder hex key files");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError &e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
    for (CLI::App *sub : app.get_subcommands()) {
        cfg.command = sub->get_name();
        if (sub->get_option_no_throw("--seed") && sub->count("--seed")) {
            cfg.seed = seed;
        }
    }
    if (cfg.command == "state") {
        return cmd_state(cfg, out);
    }
    if (cfg.command == "correlate") {
        return cmd_correlate(cfg, out);
    }
    if (cfg.command == "bell") {
        return cmd_bell(cfg, out);
    }
    if (cfg.command == "counts") {
        return cmd_counts(cfg, out);
    }
    return cmd_qkd(cfg, out);
}

}  // namespace

int execute(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    try {
        return run(args, out, err);
    } catch (const InsufficientDataError &e) {
        err << "insufficient data: " << e.what() << "\n";
        return kExitInsufficientData;
    } catch (const std::invalid_argument &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return kExitConfig;
    }
}

}  // namespace fourphoton
