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

// Summary statistics of a stationary ensemble and the JSON / CSV analysis report.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinflow/ensemble.hpp"
#include "spinflow/io.hpp"
#include "spinflow/statistics.hpp"

namespace spinflow {

struct DetSigmaStats {
    std::size_t n = 0;
    double min = 0.0, q10 = 0.0, median = 0.0, max = 0.0;
    /// min over snapshots of (det - bound) / det (1 when det = bound = 0)
    double min_relative_margin = 1.0;
    std::size_t n_degenerate = 0;  // det == 0 exactly
    bool all_psd = true;
    bool bound_holds = true;       // det >= bound - 1e-10 det everywhere
};

inline DetSigmaStats det_sigma_stats(std::span<const SphereField> fields, const NoiseSpectrum& spectrum, double nu) {
    DetSigmaStats s;
    std::vector<double> dets;
    for (const auto& f : fields) {
        const auto sigma = diffusion_matrix(f, spectrum, nu);
        const double bound = det_lower_bound(f, spectrum, nu);
        const double det = sigma.det();
        dets.push_back(det);
        s.all_psd = s.all_psd && sigma.is_psd();
        if (det == 0.0) ++s.n_degenerate;
        if (det < bound - 1e-10 * det) s.bound_holds = false;
        s.min_relative_margin = std::min(s.min_relative_margin, det > 0.0 ? (det - bound) / det : (bound == 0.0 ? 1.0 : -1.0));
    }
    s.n = dets.size();
    if (!dets.empty()) {
        s.min = *std::min_element(dets.begin(), dets.end());
        s.max = *std::max_element(dets.begin(), dets.end());
        s.q10 = quantile(dets, 0.1);
        s.median = quantile(dets, 0.5);
    }
    return s;
}

struct EnsembleAnalysis {
    double nu = 0.0;
    std::size_t n_samples = 0;
    /// time-averaged dissipation against injection_rate
    BalanceResult balance;
    /// time-averaged dissipation against energy_injection_rate
    BalanceResult energy_balance;
    MeanEstimate ensemble_dissipation;
    TailFit tail;  // energy
    std::map<std::string, SmallBallScaling> small_balls;
    Histogram occupation;  // energy samples
    DetSigmaStats det_sigma;
    double mean_h2_norm = 0.0;
    double nontrivial_fraction = 0.0;  // fraction of samples with energy > 0
    std::vector<StationarityCheck> stationarity;
};

/// Observables probed for small-ball scaling; the first is the headline ||u - <u>||_{L^2}.
inline const std::vector<std::string>& small_ball_observables() {
    static const std::vector<std::string> names{"centered_l2", "energy", "h2", "avg_sq"};
    return names;
}

/// eps from the sample median down two decades, 13 points.
inline std::vector<double> small_ball_grid(std::span<const double> values) {
    const double hi = quantile(std::vector<double>(values.begin(), values.end()), 0.5);
    if (!(hi > 0.0)) return {};
    return log_spaced(hi, hi / 100.0, 13);
}

inline EnsembleAnalysis analyze_ensemble(const StationaryEnsemble& ens) {
    if (ens.samples.empty()) throw ArgumentError("analyze_ensemble: empty ensemble");
    EnsembleAnalysis a;
    a.nu = ens.nu();
    a.n_samples = ens.samples.size();

    auto balance_of = [&](double rate) {
        BalanceResult b;
        b.time_average = ens.time_average_dissipation();
        b.rate = rate;
        b.t_stat = ens.stationary_time();
        b.residual = rate > 0.0 ? b.time_average / rate - 1.0 : -1.0;
        b.short_segment = !(a.nu > 0.0 && rate > 0.0) || b.t_stat < 10.0 / (a.nu * rate);
        return b;
    };
    a.balance = balance_of(injection_rate(ens.config.spectrum));
    a.energy_balance = balance_of(energy_injection_rate(ens.config.spectrum));

    const auto diss = ens.column("dissipation");
    a.ensemble_dissipation = estimate_mean(diss);

    const auto energy = ens.column("energy");
    const EmpiricalLaw energy_law(energy);
    if (energy.size() > 41) a.tail = fit_gaussian_tail(energy_law, populated_tail_thresholds(energy_law));

    for (const auto& name : small_ball_observables()) {
        const auto v = ens.column(name);
        const auto grid = small_ball_grid(v);
        if (grid.empty()) continue;
        a.small_balls[name] = small_ball_scaling(EmpiricalLaw(v), grid);
    }

    a.occupation = occupation_density(energy, default_bin_width(energy));
    if (!ens.snapshots.empty()) a.det_sigma = det_sigma_stats(ens.snapshots, ens.config.spectrum, ens.config.nu);

    const auto h2n = ens.column("h2_norm");
    a.mean_h2_norm = mean(h2n);
    a.nontrivial_fraction =
        static_cast<double>(std::count_if(energy.begin(), energy.end(), [](double e) { return e > 0.0; })) / static_cast<double>(energy.size());
    a.stationarity = stationarity_self_test(ens);
    return a;
}

inline nlohmann::json balance_to_json(const BalanceResult& b) {
    return {{"residual", b.residual}, {"time_average", b.time_average}, {"rate", b.rate}, {"t_stat", b.t_stat}, {"short_segment", b.short_segment}};
}

inline nlohmann::json analysis_to_json(const EnsembleAnalysis& a) {
    using nlohmann::json;
    std::vector<double> logp;
    for (double v : a.tail.neg_log_p) logp.push_back(-v);
    std::vector<double> centers;
    for (std::size_t i = 0; i < a.occupation.bins(); ++i) centers.push_back(a.occupation.center(i));

    json small = json::object();
    for (const auto& [name, s] : a.small_balls)
        small[name] = {{"eps", s.eps}, {"ratio", s.ratio}, {"counts", s.counts}, {"bound", s.bound}, {"exponent", s.exponent},
                       {"linear_bounded", s.linear_bounded}};
    json headline = json::object();
    if (auto it = a.small_balls.find("centered_l2"); it != a.small_balls.end()) {
        headline = {{"observable", "centered_l2"}, {"eps", it->second.eps}, {"ratio", it->second.ratio}, {"bound", it->second.bound}};
    }
    headline["observables"] = small;

    json stat = json::array();
    for (const auto& c : a.stationarity)
        stat.push_back({{"observable", c.observable}, {"first_mean", c.first_mean}, {"second_mean", c.second_mean},
                        {"combined_se", c.combined_se}, {"z", c.z}, {"pass", c.pass}});

    return {{"nu", a.nu},
            {"n_samples", a.n_samples},
            {"tail", {{"observable", "energy"}, {"R", a.tail.R}, {"logP", logp}, {"slope_vs_R2", a.tail.fit.slope}, {"r_squared", a.tail.fit.r_squared}}},
            {"small_ball", headline},
            {"occupation", {{"observable", "energy"}, {"bin_width", a.occupation.bin_width}, {"bins", centers}, {"density", a.occupation.density},
                            {"sup", a.occupation.sup()}}},
            {"balance_residual", a.balance.residual},
            {"balance", balance_to_json(a.balance)},
            {"energy_balance", balance_to_json(a.energy_balance)},
            {"ensemble_dissipation", {{"mean", a.ensemble_dissipation.mean}, {"std_error", a.ensemble_dissipation.std_error}}},
            {"det_sigma_stats", {{"n", a.det_sigma.n}, {"min", a.det_sigma.min}, {"q10", a.det_sigma.q10}, {"median", a.det_sigma.median},
                                 {"max", a.det_sigma.max}, {"min_relative_margin", a.det_sigma.min_relative_margin},
                                 {"n_degenerate", a.det_sigma.n_degenerate}, {"all_psd", a.det_sigma.all_psd},
                                 {"bound_holds", a.det_sigma.bound_holds}}},
            {"mean_h2_norm", a.mean_h2_norm},
            {"nontrivial_fraction", a.nontrivial_fraction},
            {"stationarity", stat}};
}

/// report.json plus tail.csv, small_ball.csv, occupation.csv; returns the written paths.
inline std::vector<std::string> write_analysis(const std::filesystem::path& dir, const EnsembleAnalysis& a) {
    std::filesystem::create_directories(dir);
    std::vector<std::string> paths;
    auto put = [&](const std::string& name, const std::string& text) {
        const auto p = (dir / name).string();
        io::write_file(p, text);
        paths.push_back(p);
    };
    put("report.json", analysis_to_json(a).dump(2) + "\n");

    std::string tail = "# spinflow-tail v1\nR,logP\n";
    for (std::size_t i = 0; i < a.tail.R.size(); ++i) tail += io::format_double(a.tail.R[i]) + ',' + io::format_double(-a.tail.neg_log_p[i]) + '\n';
    put("tail.csv", tail);

    std::string sb = "# spinflow-small-ball v1\nobservable,eps,ratio,count\n";
    for (const auto& [name, s] : a.small_balls)
        for (std::size_t i = 0; i < s.eps.size(); ++i)
            sb += name + ',' + io::format_double(s.eps[i]) + ',' + io::format_double(s.ratio[i]) + ',' + std::to_string(s.counts[i]) + '\n';
    put("small_ball.csv", sb);

    std::string occ = "# spinflow-occupation v1\nbin_center,density\n";
    for (std::size_t i = 0; i < a.occupation.bins(); ++i)
        occ += io::format_double(a.occupation.center(i)) + ',' + io::format_double(a.occupation.density[i]) + '\n';
    put("occupation.csv", occ);
    return paths;
}

} // namespace spinflow
