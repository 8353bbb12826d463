// SPDX-License-Identifier: Apache-2.0
//
// Run configuration: a sectioned key=value format, schema-validated with
// defaults echoed back, plus the JSON run manifest.

#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "anlq/dynamics.hpp"
#include "anlq/grid.hpp"
#include "anlq/qtensor.hpp"

namespace anlq {

inline constexpr const char* version_string = "anlq 0.1.0";

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeConfig {
    double dt = 0.01;
    double t_end = 1.0;
    int output_cadence = 1;
};

struct ScenarioConfig {
    std::string name = "run";
    int s = 2;           // Sobolev index for diagnostics and fits
    int samples = 40;    // t-samples for quadrature studies
    double t_lo = 1.0;
    double t_hi = 1000.0;
    double profile_sigma_q = -1.0; // <0: matched default sqrt(1/(2 Gamma))
    double profile_sigma_u = -1.0; // <0: matched default sqrt(1/(2 mu))
    std::string fit_csv;
    std::string fit_column = "normQ0";
};

struct OutputConfig {
    std::string series_path = "series.csv";
    std::string snapshot_dir = "snapshots";
    std::string report_path = "report.json";
    int snapshot_every = 0; // steps between snapshots; 0 = final only
};

struct RunConfig {
    GridSpec grid;
    PhysParams phys;
    TimeConfig time;
    InitConfig init;
    double target_e0 = -1.0; // <0: keep the family's native amplitude
    ScenarioConfig scenario;
    OutputConfig outputs;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["grid"] = {{"n", grid.n},
                     {"box_length", grid.box_length},
                     {"dealias", dealias_name(grid.dealias)}};
        j["phys"] = {{"a", phys.a},         {"b", phys.b},     {"c", phys.c},
                     {"c_star", phys.c_star}, {"kappa", phys.kappa}, {"lambda", phys.lambda},
                     {"mu", phys.mu},        {"gamma", phys.gamma}};
        j["time"] = {{"dt", time.dt}, {"t_end", time.t_end}, {"output_cadence", time.output_cadence}};
        j["init"] = {{"family", init_family_name(init.family)},
                     {"amplitude", init.amplitude},
                     {"sigma", init.sigma},
                     {"seed", init.seed},
                     {"target_e0", target_e0}};
        j["scenario"] = {{"name", scenario.name},     {"s", scenario.s},
                         {"samples", scenario.samples}, {"t_lo", scenario.t_lo},
                         {"t_hi", scenario.t_hi},
                         {"profile_sigma_q", scenario.profile_sigma_q},
                         {"profile_sigma_u", scenario.profile_sigma_u},
                         {"fit_csv", scenario.fit_csv},
                         {"fit_column", scenario.fit_column}};
        j["outputs"] = {{"series_path", outputs.series_path},
                        {"snapshot_dir", outputs.snapshot_dir},
                        {"report_path", outputs.report_path},
                        {"snapshot_every", outputs.snapshot_every}};
        j["version"] = version_string;
        return j;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct RawConfig {
    std::map<std::string, std::pair<std::string, int>> kv; // key -> (value, line)
};

inline RawConfig tokenize_config(const std::string& text) {
    RawConfig raw;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) +
                                  ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section.empty())
                throw ConfigError("config line " + std::to_string(lineno) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        const std::string full = section.empty() ? key : section + "." + key;
        if (raw.kv.count(full))
            throw ConfigError("config line " + std::to_string(lineno) + ": duplicate key '" +
                              full + "'");
        raw.kv[full] = {value, lineno};
    }
    return raw;
}

inline double to_double(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' expects a number, got '" + v + "'");
    }
}

inline long long to_int(const std::string& key, const std::string& v, int line) {
    try {
        std::size_t pos = 0;
        const long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing");
        return d;
    } catch (...) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                          "' expects an integer, got '" + v + "'");
    }
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::to_double;
    using detail::to_int;
    const detail::RawConfig raw = detail::tokenize_config(text);

    static const std::set<std::string> known = {
        "grid.n", "grid.box_length", "grid.dealias",
        "phys.a", "phys.b", "phys.c", "phys.c_star", "phys.alpha2", "phys.kappa",
        "phys.lambda", "phys.mu", "phys.gamma",
        "time.dt", "time.t_end", "time.output_cadence",
        "init.family", "init.amplitude", "init.sigma", "init.seed", "init.target_e0",
        "scenario.name", "scenario.s", "scenario.samples", "scenario.t_lo", "scenario.t_hi",
        "scenario.profile_sigma_q", "scenario.profile_sigma_u",
        "scenario.fit_csv", "scenario.fit_column",
        "outputs.series_path", "outputs.snapshot_dir", "outputs.report_path",
        "outputs.snapshot_every"};

    for (const auto& [key, vl] : raw.kv) {
        if (known.count(key)) continue;
        if (key == "phys.xi")
            throw ConfigError("config line " + std::to_string(vl.second) +
                              ": 'phys.xi' (tumbling parameter) is not supported; only the "
                              "corotational system (xi = 0) is modeled");
        throw ConfigError("config line " + std::to_string(vl.second) + ": unknown key '" + key +
                          "'");
    }

    auto get = [&](const std::string& key) -> std::optional<std::pair<std::string, int>> {
        auto it = raw.kv.find(key);
        if (it == raw.kv.end()) return std::nullopt;
        return it->second;
    };

    RunConfig cfg;

    if (auto v = get("grid.n")) cfg.grid.n = int(to_int("grid.n", v->first, v->second));
    if (auto v = get("grid.box_length"))
        cfg.grid.box_length = to_double("grid.box_length", v->first, v->second);
    if (auto v = get("grid.dealias")) {
        if (v->first == "two_thirds") cfg.grid.dealias = DealiasRule::two_thirds;
        else if (v->first == "half") cfg.grid.dealias = DealiasRule::half;
        else if (v->first == "none") cfg.grid.dealias = DealiasRule::none;
        else
            throw ConfigError("config line " + std::to_string(v->second) +
                              ": grid.dealias must be two_thirds | half | none");
    }
    try {
        cfg.grid.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("grid: ") + e.what());
    }

    // physical coefficients; reduced (a, kappa) and physical (c_star, alpha2)
    // forms may coexist only when consistent
    const double b = get("phys.b") ? to_double("phys.b", get("phys.b")->first, 0) : 1.0;
    const double c = get("phys.c") ? to_double("phys.c", get("phys.c")->first, 0) : 1.0;
    const double lambda =
        get("phys.lambda") ? to_double("phys.lambda", get("phys.lambda")->first, 0) : 1.0;
    const double mu = get("phys.mu") ? to_double("phys.mu", get("phys.mu")->first, 0) : 1.0;
    const double gamma =
        get("phys.gamma") ? to_double("phys.gamma", get("phys.gamma")->first, 0) : 1.0;

    std::optional<double> a_opt, cstar_opt, kappa_opt, alpha2_opt;
    if (auto v = get("phys.a")) a_opt = to_double("phys.a", v->first, v->second);
    if (auto v = get("phys.c_star")) cstar_opt = to_double("phys.c_star", v->first, v->second);
    if (auto v = get("phys.kappa")) kappa_opt = to_double("phys.kappa", v->first, v->second);
    if (auto v = get("phys.alpha2")) alpha2_opt = to_double("phys.alpha2", v->first, v->second);

    double a = 1.0;
    if (a_opt && cstar_opt) {
        const double a_derived = 0.5 * (c - *cstar_opt);
        if (std::abs(a_derived - *a_opt) > 1e-12 * std::max(1.0, std::abs(*a_opt)))
            throw ConfigError("phys: inconsistent parameterization, a = " +
                              std::to_string(*a_opt) + " but (c - c_star)/2 = " +
                              std::to_string(a_derived));
        a = *a_opt;
    } else if (a_opt) {
        a = *a_opt;
    } else if (cstar_opt) {
        a = 0.5 * (c - *cstar_opt);
    }

    double kappa = 1.0;
    if (kappa_opt && alpha2_opt) {
        const double k_derived = *alpha2_opt * c * c;
        if (std::abs(k_derived - *kappa_opt) > 1e-12 * std::max(1.0, std::abs(*kappa_opt)))
            throw ConfigError("phys: inconsistent parameterization, kappa = " +
                              std::to_string(*kappa_opt) + " but alpha2 c^2 = " +
                              std::to_string(k_derived));
        kappa = *kappa_opt;
    } else if (kappa_opt) {
        kappa = *kappa_opt;
    } else if (alpha2_opt) {
        kappa = *alpha2_opt * c * c;
    }

    try {
        cfg.phys = PhysParams::reduced(a, b, c, kappa, lambda, mu, gamma);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("phys: ") + e.what());
    }

    if (auto v = get("time.dt")) cfg.time.dt = to_double("time.dt", v->first, v->second);
    if (auto v = get("time.t_end")) cfg.time.t_end = to_double("time.t_end", v->first, v->second);
    if (auto v = get("time.output_cadence"))
        cfg.time.output_cadence = int(to_int("time.output_cadence", v->first, v->second));
    if (!(cfg.time.dt > 0.0)) throw ConfigError("time.dt must be > 0");
    if (cfg.time.t_end < 0.0) throw ConfigError("time.t_end must be >= 0");
    if (cfg.time.output_cadence < 1) throw ConfigError("time.output_cadence must be >= 1");

    if (auto v = get("init.family")) {
        if (v->first == "gaussian") cfg.init.family = InitFamily::gaussian;
        else if (v->first == "random_band") cfg.init.family = InitFamily::random_band;
        else if (v->first == "single_mode") cfg.init.family = InitFamily::single_mode;
        else
            throw ConfigError("config line " + std::to_string(v->second) +
                              ": init.family must be gaussian | random_band | single_mode");
    }
    if (auto v = get("init.amplitude"))
        cfg.init.amplitude = to_double("init.amplitude", v->first, v->second);
    if (auto v = get("init.sigma")) cfg.init.sigma = to_double("init.sigma", v->first, v->second);
    if (auto v = get("init.seed"))
        cfg.init.seed = std::uint64_t(to_int("init.seed", v->first, v->second));
    if (auto v = get("init.target_e0"))
        cfg.target_e0 = to_double("init.target_e0", v->first, v->second);

    if (auto v = get("scenario.name")) {
        static const std::set<std::string> names = {"run",         "linear-decay", "kernel-probe",
                                                    "lower-bound", "validate",     "fit"};
        if (!names.count(v->first))
            throw ConfigError("config line " + std::to_string(v->second) +
                              ": unknown scenario '" + v->first + "'");
        cfg.scenario.name = v->first;
    }
    if (auto v = get("scenario.s")) cfg.scenario.s = int(to_int("scenario.s", v->first, v->second));
    if (cfg.scenario.s < 2) throw ConfigError("scenario.s must be >= 2");
    if (auto v = get("scenario.samples"))
        cfg.scenario.samples = int(to_int("scenario.samples", v->first, v->second));
    if (cfg.scenario.samples < 4) throw ConfigError("scenario.samples must be >= 4");
    if (auto v = get("scenario.t_lo")) cfg.scenario.t_lo = to_double("scenario.t_lo", v->first, v->second);
    if (auto v = get("scenario.t_hi")) cfg.scenario.t_hi = to_double("scenario.t_hi", v->first, v->second);
    if (!(cfg.scenario.t_lo > 0.0) || !(cfg.scenario.t_hi > cfg.scenario.t_lo))
        throw ConfigError("scenario window requires 0 < t_lo < t_hi");
    if (auto v = get("scenario.profile_sigma_q"))
        cfg.scenario.profile_sigma_q = to_double("scenario.profile_sigma_q", v->first, v->second);
    if (auto v = get("scenario.profile_sigma_u"))
        cfg.scenario.profile_sigma_u = to_double("scenario.profile_sigma_u", v->first, v->second);
    if (auto v = get("scenario.fit_csv")) cfg.scenario.fit_csv = v->first;
    if (auto v = get("scenario.fit_column")) cfg.scenario.fit_column = v->first;

    if (auto v = get("outputs.series_path")) cfg.outputs.series_path = v->first;
    if (auto v = get("outputs.snapshot_dir")) cfg.outputs.snapshot_dir = v->first;
    if (auto v = get("outputs.report_path")) cfg.outputs.report_path = v->first;
    if (auto v = get("outputs.snapshot_every"))
        cfg.outputs.snapshot_every = int(to_int("outputs.snapshot_every", v->first, v->second));
    if (cfg.outputs.snapshot_every < 0) throw ConfigError("outputs.snapshot_every must be >= 0");

    return cfg;
}

} // namespace anlq
