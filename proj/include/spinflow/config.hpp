/*
 * Copyright 2026 The spinflow Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

// Run configuration as flat "section.key = value" text. '#' starts a comment. Unknown keys are
// rejected so that a typo cannot silently fall back to a default.

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "spinflow/ensemble.hpp"
#include "spinflow/error.hpp"
#include "spinflow/integrator.hpp"
#include "spinflow/io.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/sweep.hpp"

namespace spinflow {

using ConfigMap = std::map<std::string, std::string>;

inline const std::set<std::string>& known_config_keys() {
    static const std::set<std::string> keys{
        "sim.N", "sim.nu", "sim.dt", "sim.T", "sim.seed", "sim.scheme", "sim.record_stride", "sim.corrector_sweeps",
        "sim.snapshot_stride", "sim.init", "sim.init_modes", "sim.init_file",
        "noise.profile", "noise.J", "noise.exponent", "noise.lambda0", "noise.custom",
        "ensemble.n_samples", "ensemble.n_trajectories", "ensemble.burn_in", "ensemble.max_interval", "ensemble.pilot_records",
        "ensemble.snapshots", "ensemble.nus",
        "analyze.input", "bcf.input"};
    return keys;
}

namespace detail {

inline std::string trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return std::string(s);
}

} // namespace detail

inline ConfigMap parse_config_text(std::string_view text) {
    ConfigMap m;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const std::string t = detail::trim(line);
        if (t.empty()) continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(std::string_view(t).substr(0, eq));
        const std::string value = detail::trim(std::string_view(t).substr(eq + 1));
        if (!known_config_keys().count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        if (m.count(key)) throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        m[key] = value;
    }
    return m;
}

inline ConfigMap load_config(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const FormatError&) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    return parse_config_text(text);
}

inline std::string config_to_text(const ConfigMap& m) {
    std::string s;
    for (const auto& [k, v] : m) s += k + " = " + v + "\n";
    return s;
}

namespace detail {

inline double get_double(const ConfigMap& m, const std::string& key, double fallback) {
    auto it = m.find(key);
    if (it == m.end()) return fallback;
    try {
        return io::parse_double(it->second);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a number, got '" + it->second + "'");
    }
}

template <class Int>
Int get_int(const ConfigMap& m, const std::string& key, Int fallback) {
    auto it = m.find(key);
    if (it == m.end()) return fallback;
    try {
        return io::parse_int<Int>(it->second);
    } catch (const FormatError&) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + it->second + "'");
    }
}

inline std::vector<double> get_list(const ConfigMap& m, const std::string& key) {
    std::vector<double> out;
    auto it = m.find(key);
    if (it == m.end()) return out;
    for (auto part : io::split(it->second)) {
        try {
            out.push_back(io::parse_double(part));
        } catch (const FormatError&) {
            throw ConfigError(key + ": bad list entry '" + std::string(part) + "'");
        }
    }
    return out;
}

} // namespace detail

/// noise.profile = power (default: J, exponent, lambda0) or custom ("j:lambda, j:lambda, ...").
inline NoiseSpectrum spectrum_from_config(const ConfigMap& m, std::size_t n_grid) {
    const std::string profile = m.count("noise.profile") ? m.at("noise.profile") : "power";
    try {
        if (profile == "power") {
            const int def_j = static_cast<int>(std::min<std::size_t>(32, n_grid / 4));
            return NoiseSpectrum::power_law(detail::get_int<int>(m, "noise.J", def_j), detail::get_double(m, "noise.exponent", 2.0),
                                            detail::get_double(m, "noise.lambda0", 0.0), n_grid);
        }
        if (profile == "custom") {
            if (!m.count("noise.custom")) throw ConfigError("noise.profile = custom needs noise.custom");
            std::vector<std::pair<int, double>> pairs;
            for (auto part : io::split(m.at("noise.custom"))) {
                const std::string item = detail::trim(part);
                const auto colon = item.find(':');
                if (colon == std::string::npos) throw ConfigError("noise.custom: expected j:lambda, got '" + item + "'");
                try {
                    pairs.emplace_back(io::parse_int<int>(detail::trim(std::string_view(item).substr(0, colon))),
                                       io::parse_double(std::string_view(item).substr(colon + 1)));
                } catch (const FormatError&) {
                    throw ConfigError("noise.custom: bad entry '" + item + "'");
                }
            }
            return NoiseSpectrum::custom(pairs, n_grid);
        }
    } catch (const ArgumentError& e) {
        throw ConfigError(std::string("noise: ") + e.what());
    }
    throw ConfigError("noise.profile must be 'power' or 'custom', got '" + profile + "'");
}

/// SimConfig from the sim.* and noise.* keys; sim.dt defaults to default_dt(nu, N).
inline SimConfig sim_config_from(const ConfigMap& m) {
    const auto n = detail::get_int<std::size_t>(m, "sim.N", 256);
    if (n < 8 || n % 2 != 0) throw ConfigError("sim.N must be even and >= 8");
    const double nu = detail::get_double(m, "sim.nu", 0.5);
    Scheme scheme = Scheme::rotation_heun;
    if (m.count("sim.scheme")) {
        try {
            scheme = scheme_from_string(m.at("sim.scheme"));
        } catch (const ArgumentError& e) {
            throw ConfigError(std::string("sim.scheme: ") + e.what());
        }
    }
    SimConfig cfg{.nu = nu,
                  .dt = detail::get_double(m, "sim.dt", default_dt(nu, n)),
                  .n_grid = n,
                  .horizon = detail::get_double(m, "sim.T", 1.0),
                  .seed = detail::get_int<std::uint64_t>(m, "sim.seed", 0),
                  .trajectory = 0,
                  .scheme = scheme,
                  .record_stride = detail::get_int<std::size_t>(m, "sim.record_stride", 1),
                  .corrector_sweeps = detail::get_int<int>(m, "sim.corrector_sweeps", 2),
                  .spectrum = spectrum_from_config(m, n)};
    validate(cfg);
    return cfg;
}

struct EnsembleSettings {
    std::size_t n_samples = 2000;
    std::size_t n_trajectories = 4;
    EnsembleOptions options;
    std::vector<double> nus;
};

inline EnsembleSettings ensemble_settings_from(const ConfigMap& m) {
    EnsembleSettings s;
    s.n_samples = detail::get_int<std::size_t>(m, "ensemble.n_samples", s.n_samples);
    s.n_trajectories = detail::get_int<std::size_t>(m, "ensemble.n_trajectories", s.n_trajectories);
    s.options.burn_in = detail::get_double(m, "ensemble.burn_in", -1.0);
    s.options.max_interval = detail::get_int<std::size_t>(m, "ensemble.max_interval", s.options.max_interval);
    s.options.pilot_records = detail::get_int<std::size_t>(m, "ensemble.pilot_records", s.options.pilot_records);
    if (m.count("ensemble.snapshots")) {
        const auto& v = m.at("ensemble.snapshots");
        if (v != "true" && v != "false") throw ConfigError("ensemble.snapshots must be true or false");
        s.options.keep_snapshots = v == "true";
    }
    s.nus = detail::get_list(m, "ensemble.nus");
    if (s.nus.empty()) s.nus = default_nu_ladder();
    return s;
}

/// Initial field from sim.init: random (default; sim.init_modes), file (sim.init_file), or
/// great_circle.
inline SphereField initial_field_from(const ConfigMap& m, const SimConfig& cfg) {
    const std::string kind = m.count("sim.init") ? m.at("sim.init") : "random";
    if (kind == "random") return random_smooth_field(cfg.n_grid, cfg.seed, cfg.trajectory, detail::get_int<int>(m, "sim.init_modes", 3));
    if (kind == "great_circle") return SphereField::sample(cfg.n_grid, [](double x) { return Vec3{std::cos(x), std::sin(x), 0.0}; });
    if (kind == "file") {
        if (!m.count("sim.init_file")) throw ConfigError("sim.init = file needs sim.init_file");
        auto f = load_field(m.at("sim.init_file"));
        if (f.size() != cfg.n_grid) throw ConfigError("sim.init_file grid size differs from sim.N");
        return f;
    }
    throw ConfigError("sim.init must be random, great_circle or file");
}

} // namespace spinflow
