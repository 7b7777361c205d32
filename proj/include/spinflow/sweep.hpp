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

// Stationary ensembles along a decreasing ladder of nu with per-nu summaries.

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spinflow/analysis.hpp"
#include "spinflow/ensemble.hpp"
#include "spinflow/io.hpp"

namespace spinflow {

inline const std::vector<double>& default_nu_ladder() {
    static const std::vector<double> ladder{0.5, 0.25, 0.1, 0.05};
    return ladder;
}

struct SweepRow {
    double nu = 0.0;
    double dt = 0.0;
    bool ok = false;
    std::string error;
    std::optional<EnsembleAnalysis> analysis;
};

struct SweepResult {
    std::vector<double> nus;
    std::vector<SweepRow> rows;
    /// statistics that grow monotonically by more than 2x as nu decreases
    std::vector<std::string> flags;
};

/// Receives each finished ensemble (e.g. to store it) before the next nu starts.
using EnsembleSink = std::function<void(const StationaryEnsemble&)>;

namespace detail {

struct TrackedStatistic {
    const char* name;
    double (*get)(const EnsembleAnalysis&);
};

inline const std::vector<TrackedStatistic>& tracked_statistics() {
    static const std::vector<TrackedStatistic> s{
        {"balance_time_average", [](const EnsembleAnalysis& a) { return a.balance.time_average; }},
        {"small_ball_bound", [](const EnsembleAnalysis& a) { return a.small_balls.count("centered_l2") ? a.small_balls.at("centered_l2").bound : 0.0; }},
        {"sup_occupation_density", [](const EnsembleAnalysis& a) { return a.occupation.sup(); }},
        {"mean_h2_norm", [](const EnsembleAnalysis& a) { return a.mean_h2_norm; }},
        // sigma carries a factor nu, so det sigma / nu^2 is the nu-free part
        {"det_sigma_median_over_nu2", [](const EnsembleAnalysis& a) { return a.det_sigma.median / (a.nu * a.nu); }},
    };
    return s;
}

} // namespace detail

/// Flags a statistic whose magnitude is non-decreasing along the ladder and grows by more than
/// `factor` between the largest and smallest nu (needs >= 3 successful rows).
inline std::vector<std::string> trend_flags(const std::vector<SweepRow>& rows, double factor = 2.0) {
    std::vector<std::string> flags;
    for (const auto& stat : detail::tracked_statistics()) {
        std::vector<double> v;
        for (const auto& r : rows)
            if (r.ok && r.analysis) v.push_back(std::abs(stat.get(*r.analysis)));
        if (v.size() < 3 || !(v.front() > 0.0)) continue;
        bool monotone = true;
        for (std::size_t i = 1; i < v.size(); ++i) monotone = monotone && v[i] >= v[i - 1];
        if (monotone && v.back() > factor * v.front())
            flags.push_back(std::string(stat.name) + " grows from " + io::format_double(v.front()) + " to " + io::format_double(v.back()) +
                            " as nu decreases");
    }
    return flags;
}

/// One estimate_stationary per nu with dt = default_dt(nu, N); failures are recorded in the
/// row and the sweep continues.
inline SweepResult inviscid_sweep(const SimConfig& base, const std::vector<double>& nus, std::size_t n_samples, std::size_t n_trajectories,
                                  const EnsembleOptions& opt = {}, const EnsembleSink& sink = {}) {
    if (nus.empty()) throw ConfigError("sweep: empty nu ladder");
    for (std::size_t i = 0; i < nus.size(); ++i) {
        if (!(nus[i] > 0.0 && nus[i] <= 1.0)) throw ConfigError("sweep: every nu must lie in (0, 1]");
        if (i > 0 && !(nus[i] < nus[i - 1])) throw ConfigError("sweep: nu ladder must be strictly decreasing");
    }
    SweepResult result;
    result.nus = nus;
    for (double nu : nus) {
        SweepRow row;
        row.nu = nu;
        SimConfig cfg = base;
        cfg.nu = nu;
        cfg.dt = default_dt(nu, cfg.n_grid);
        row.dt = cfg.dt;
        try {
            const auto ens = estimate_stationary(cfg, n_samples, n_trajectories, opt);
            row.analysis = analyze_ensemble(ens);
            row.ok = true;
            if (sink) sink(ens);
        } catch (const BlowupError& e) {
            row.error = e.what();
        } catch (const ConfigError& e) {
            row.error = e.what();
        }
        result.rows.push_back(std::move(row));
    }
    result.flags = trend_flags(result.rows);
    return result;
}

inline constexpr std::string_view kSweepHeader =
    "nu,dt,status,balance_time_average,balance_residual,energy_balance_residual,ensemble_mean_dissipation,tail_slope,tail_r2,"
    "small_ball_bound,small_ball_exponent,sup_occupation_density,det_sigma_q10,det_sigma_median,mean_h2_norm,error";

inline std::string sweep_summary_csv(const SweepResult& r) {
    std::string s = "# spinflow-sweep v1\n";
    s += kSweepHeader;
    s += '\n';
    auto f = io::format_double;
    for (const auto& row : r.rows) {
        s += f(row.nu) + ',' + f(row.dt) + ',' + (row.ok ? "ok" : "failed");
        if (row.ok && row.analysis) {
            const auto& a = *row.analysis;
            const auto sb = a.small_balls.count("centered_l2") ? a.small_balls.at("centered_l2") : SmallBallScaling{};
            s += ',' + f(a.balance.time_average) + ',' + f(a.balance.residual) + ',' + f(a.energy_balance.residual) + ',' +
                 f(a.ensemble_dissipation.mean) + ',' + f(a.tail.fit.slope) + ',' + f(a.tail.fit.r_squared) + ',' + f(sb.bound) + ',' +
                 f(sb.exponent) + ',' + f(a.occupation.sup()) + ',' + f(a.det_sigma.q10) + ',' + f(a.det_sigma.median) + ',' +
                 f(a.mean_h2_norm) + ',';
        } else {
            std::string err = row.error;
            for (auto& c : err)
                if (c == ',' || c == '\n') c = ';';
            s += ",,,,,,,,,,,,," + err;
        }
        s += '\n';
    }
    return s;
}

} // namespace spinflow
