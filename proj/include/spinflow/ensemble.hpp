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

// Stationary-measure estimation: independent trajectories are burned in, a pilot segment fixes
// the decorrelation interval, then snapshots are taken at that interval. Trajectory i draws
// its initial field and noise from trajectory id cfg.trajectory + i, so the result does not
// depend on how trajectories are spread over threads.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/integrator.hpp"
#include "spinflow/io.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/statistics.hpp"

namespace spinflow {

struct EnsembleOptions {
    /// Burn-in time; negative selects default_burn_in.
    double burn_in = -1.0;
    /// Upper bound of the sampling interval, in records.
    std::size_t max_interval = 100;
    /// Records used to estimate the energy autocorrelation time after burn-in.
    std::size_t pilot_records = 2000;
    unsigned threads = 1;
    /// Keep the full post-burn-in observable series of every trajectory.
    bool keep_series = false;
    bool keep_snapshots = true;
};

/// 20 dissipation times 1 / (nu L^2); 20 / nu without noise.
inline double default_burn_in(const SimConfig& cfg) {
    const double rate = injection_rate(cfg.spectrum);
    return rate > 0.0 ? 20.0 / (cfg.nu * rate) : 20.0 / cfg.nu;
}

struct EnsembleSample {
    std::uint32_t trajectory = 0;
    ObservableRecord obs;

    friend bool operator==(const EnsembleSample&, const EnsembleSample&) = default;
};

struct TrajectorySummary {
    std::uint32_t trajectory = 0;
    double tau = 1.0;               // energy autocorrelation time, in records
    std::size_t interval = 1;       // sampling interval, in records
    std::size_t n_samples = 0;
    std::size_t n_records = 0;      // post-burn-in records
    double t_start = 0.0;           // end of burn-in
    double t_end = 0.0;
    double mean_dissipation = 0.0;  // time average over the post-burn-in records
    double mean_energy = 0.0;
    double max_norm_drift = 0.0;

    friend bool operator==(const TrajectorySummary&, const TrajectorySummary&) = default;
};

struct StationaryEnsemble {
    SimConfig config;
    double burn_in = 0.0;
    std::vector<TrajectorySummary> trajectories;
    std::vector<EnsembleSample> samples;
    /// snapshots[i] is the field of samples[i] (empty when snapshots are not kept)
    std::vector<SphereField> snapshots;
    /// post-burn-in series per trajectory (only with keep_series; not stored on disk)
    std::vector<ObservableSeries> series;

    double nu() const noexcept { return config.nu; }

    std::vector<double> column(const std::string& observable) const {
        const auto f = observable_by_name(observable);
        std::vector<double> out;
        out.reserve(samples.size());
        for (const auto& s : samples) out.push_back(f(s.obs));
        return out;
    }

    /// Time average of the dissipation over all post-burn-in records, weighted by record count.
    double time_average_dissipation() const {
        std::vector<double> w;
        std::size_t total = 0;
        for (const auto& t : trajectories) {
            w.push_back(t.mean_dissipation * static_cast<double>(t.n_records));
            total += t.n_records;
        }
        return total > 0 ? pairwise_sum(w) / static_cast<double>(total) : 0.0;
    }

    /// Total length of the post-burn-in segments.
    double stationary_time() const {
        std::vector<double> w;
        for (const auto& t : trajectories) w.push_back(t.t_end - t.t_start);
        return pairwise_sum(w);
    }

    friend bool operator==(const StationaryEnsemble& a, const StationaryEnsemble& b) {
        return a.config == b.config && a.burn_in == b.burn_in && a.trajectories == b.trajectories && a.samples == b.samples &&
               a.snapshots == b.snapshots;
    }
};

namespace detail {

struct TrajectoryOutput {
    TrajectorySummary summary;
    std::vector<EnsembleSample> samples;
    std::vector<SphereField> snapshots;
    ObservableSeries series;
};

inline TrajectoryOutput run_stationary_trajectory(const SimConfig& base, std::uint32_t index, std::size_t quota, double burn_in,
                                                  const EnsembleOptions& opt) {
    SimConfig cfg = base;
    cfg.trajectory = base.trajectory + index;
    Stepper stepper(cfg);
    const SphereField u0 = random_smooth_field(cfg.n_grid, cfg.seed, cfg.trajectory);
    std::vector<Vec3> u(u0.values().begin(), u0.values().end());

    TrajectoryOutput out;
    out.summary.trajectory = cfg.trajectory;
    std::uint64_t step = 0;
    auto advance = [&](std::uint64_t n) {
        for (std::uint64_t i = 0; i < n; ++i, ++step) {
            try {
                const auto rep = stepper.advance(u, step);
                out.summary.max_norm_drift = std::max(out.summary.max_norm_drift, rep.max_norm_drift);
            } catch (const BlowupError& e) {
                throw BlowupError("trajectory " + std::to_string(cfg.trajectory) + ": " + e.what(), e.step(), e.dt());
            }
        }
    };

    advance(step_count(burn_in, cfg.dt));
    out.summary.t_start = static_cast<double>(step) * cfg.dt;

    std::vector<double> diss, energy;
    auto record = [&]() {
        SphereField f(trusted, u);
        const auto r = measure(f, static_cast<double>(step) * cfg.dt);
        diss.push_back(r.dissipation);
        energy.push_back(r.energy);
        if (opt.keep_series) out.series.records.push_back(r);
        return std::pair{std::move(f), r};
    };

    const std::size_t pilot = std::max<std::size_t>(opt.pilot_records, 2);
    record();
    for (std::size_t i = 1; i < pilot; ++i) {
        advance(cfg.record_stride);
        record();
    }
    const double tau = integrated_autocorrelation_time(energy);
    out.summary.tau = tau;
    out.summary.interval = std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(tau)), 1, std::max<std::size_t>(opt.max_interval, 1));

    for (std::size_t m = 0; m < quota; ++m) {
        for (std::size_t i = 0; i < out.summary.interval; ++i) advance(cfg.record_stride);
        auto [f, r] = record();
        out.samples.push_back({cfg.trajectory, r});
        if (opt.keep_snapshots) out.snapshots.push_back(std::move(f));
    }
    out.summary.n_samples = quota;
    out.summary.n_records = diss.size();
    out.summary.t_end = static_cast<double>(step) * cfg.dt;
    out.summary.mean_dissipation = mean(diss);
    out.summary.mean_energy = mean(energy);
    return out;
}

} // namespace detail

/// Samples the stationary law at cfg.nu > 0 with n_samples snapshots split over n_trajectories.
inline StationaryEnsemble estimate_stationary(const SimConfig& cfg, std::size_t n_samples, std::size_t n_trajectories,
                                              const EnsembleOptions& opt = {}) {
    validate(cfg);
    if (!(cfg.nu > 0.0)) throw ConfigError("stationary estimation needs sim.nu > 0");
    if (n_samples == 0 || n_trajectories == 0) throw ConfigError("ensemble.n_samples and ensemble.n_trajectories must be >= 1");
    if (n_trajectories > n_samples) throw ConfigError("ensemble.n_trajectories exceeds ensemble.n_samples");

    StationaryEnsemble ens{cfg, opt.burn_in >= 0.0 ? opt.burn_in : default_burn_in(cfg), {}, {}, {}, {}};
    std::vector<detail::TrajectoryOutput> outputs(n_trajectories);
    std::vector<std::exception_ptr> errors(n_trajectories);
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i; (i = next.fetch_add(1)) < n_trajectories;) {
            const std::size_t quota = n_samples / n_trajectories + (i < n_samples % n_trajectories ? 1 : 0);
            try {
                outputs[i] = detail::run_stationary_trajectory(cfg, static_cast<std::uint32_t>(i), quota, ens.burn_in, opt);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n_threads = static_cast<unsigned>(std::min<std::size_t>(std::max(opt.threads, 1u), n_trajectories));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);

    for (auto& o : outputs) {
        ens.trajectories.push_back(o.summary);
        ens.samples.insert(ens.samples.end(), o.samples.begin(), o.samples.end());
        for (auto& f : o.snapshots) ens.snapshots.push_back(std::move(f));
        if (opt.keep_series) ens.series.push_back(std::move(o.series));
    }
    return ens;
}

// ---------------------------------------------------------------------------------------------
// Stationarity self-test

struct StationarityCheck {
    std::string observable;
    double first_mean = 0.0;
    double second_mean = 0.0;
    double combined_se = 0.0;
    double z = 0.0;  // |difference| / combined_se
    bool pass = true;
};

/// First half vs second half (in time, within each trajectory) of the sample means; passes when
/// they differ by < `n_se` combined standard errors.
inline std::vector<StationarityCheck> stationarity_self_test(const StationaryEnsemble& ens, double n_se = 3.0) {
    std::vector<StationarityCheck> out;
    for (const char* name : {"avg_sq", "energy", "centered_l2_sq", "dissipation", "h2"}) {
        const auto f = observable_by_name(name);
        std::vector<double> first, second;
        std::size_t offset = 0;
        for (const auto& t : ens.trajectories) {
            const std::size_t h = t.n_samples / 2;
            for (std::size_t i = 0; i < t.n_samples; ++i) {
                // the middle sample of an odd count is left out
                const double v = f(ens.samples[offset + i].obs);
                if (i < h) first.push_back(v);
                else if (i >= t.n_samples - h) second.push_back(v);
            }
            offset += t.n_samples;
        }
        StationarityCheck c;
        c.observable = name;
        if (first.size() < 2 || second.size() < 2) {
            out.push_back(c);
            continue;
        }
        const auto a = estimate_mean(first), b = estimate_mean(second);
        c.first_mean = a.mean;
        c.second_mean = b.mean;
        c.combined_se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
        const double d = std::abs(a.mean - b.mean);
        c.z = c.combined_se > 0.0 ? d / c.combined_se : (d == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        c.pass = c.z < n_se;
        out.push_back(c);
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// Store: meta.json, observables.csv, fields/NNNN.csv

inline nlohmann::json config_to_json(const SimConfig& cfg) {
    return {{"nu", cfg.nu},
            {"dt", cfg.dt},
            {"N", cfg.n_grid},
            {"T", cfg.horizon},
            {"seed", cfg.seed},
            {"trajectory", cfg.trajectory},
            {"scheme", to_string(cfg.scheme)},
            {"record_stride", cfg.record_stride},
            {"corrector_sweeps", cfg.corrector_sweeps},
            {"noise_lambdas", std::vector<double>(cfg.spectrum.lambdas().begin(), cfg.spectrum.lambdas().end())}};
}

inline SimConfig config_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("N").get<std::size_t>();
        SimConfig cfg{.nu = j.at("nu").get<double>(),
                      .dt = j.at("dt").get<double>(),
                      .n_grid = n,
                      .horizon = j.at("T").get<double>(),
                      .seed = j.at("seed").get<std::uint64_t>(),
                      .trajectory = j.at("trajectory").get<std::uint32_t>(),
                      .scheme = scheme_from_string(j.at("scheme").get<std::string>()),
                      .record_stride = j.at("record_stride").get<std::size_t>(),
                      .corrector_sweeps = j.at("corrector_sweeps").get<int>(),
                      .spectrum = NoiseSpectrum(j.at("noise_lambdas").get<std::vector<double>>(), n)};
        return cfg;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("config record: ") + e.what());
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("config record: ") + e.what());
    } catch (const ConfigError& e) {
        throw FormatError(std::string("config record: ") + e.what());
    }
}

inline constexpr std::string_view kEnsembleFormat = "spinflow-ensemble";
inline constexpr int kEnsembleVersion = 1;
inline constexpr std::string_view kObservablesHeader = "trajectory,t,avg_sq,energy,centered_l2_sq,dissipation,h2";

inline std::string field_file_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04zu.csv", i);
    return buf;
}

inline std::string observables_to_csv(const StationaryEnsemble& ens) {
    std::string s = "# spinflow-observables v1\n";
    s += kObservablesHeader;
    s += '\n';
    for (const auto& x : ens.samples) {
        const auto& r = x.obs;
        s += std::to_string(x.trajectory) + ',' + io::format_double(r.t) + ',' + io::format_double(r.avg_sq) + ',' +
             io::format_double(r.energy) + ',' + io::format_double(r.centered_l2_sq) + ',' + io::format_double(r.dissipation) + ',' +
             io::format_double(r.h2) + '\n';
    }
    return s;
}

inline void save_ensemble(const std::filesystem::path& dir, const StationaryEnsemble& ens) {
    namespace fs = std::filesystem;
    fs::create_directories(dir / "fields");
    nlohmann::json traj = nlohmann::json::array();
    for (const auto& t : ens.trajectories)
        traj.push_back({{"trajectory", t.trajectory},
                        {"tau", t.tau},
                        {"interval", t.interval},
                        {"n_samples", t.n_samples},
                        {"n_records", t.n_records},
                        {"t_start", t.t_start},
                        {"t_end", t.t_end},
                        {"mean_dissipation", t.mean_dissipation},
                        {"mean_energy", t.mean_energy},
                        {"max_norm_drift", t.max_norm_drift}});
    const nlohmann::json meta = {{"format", kEnsembleFormat},
                                 {"version", kEnsembleVersion},
                                 {"nu", ens.config.nu},
                                 {"burn_in", ens.burn_in},
                                 {"seed", ens.config.seed},
                                 {"n_samples", ens.samples.size()},
                                 {"n_snapshots", ens.snapshots.size()},
                                 {"config", config_to_json(ens.config)},
                                 {"trajectories", traj}};
    io::write_file((dir / "meta.json").string(), meta.dump(2) + "\n");
    io::write_file((dir / "observables.csv").string(), observables_to_csv(ens));
    for (std::size_t i = 0; i < ens.snapshots.size(); ++i) save_field((dir / "fields" / field_file_name(i)).string(), ens.snapshots[i]);
}

inline StationaryEnsemble load_ensemble(const std::filesystem::path& dir) {
    const std::string meta_text = io::read_file((dir / "meta.json").string());
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(meta_text);
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("ensemble meta.json: corrupt file (" + std::string(e.what()) + ")");
    }
    StationaryEnsemble ens{config_from_json(meta.value("config", nlohmann::json::object())), 0.0, {}, {}, {}, {}};
    std::size_t n_samples = 0, n_snapshots = 0;
    try {
        if (meta.at("format").get<std::string>() != kEnsembleFormat || meta.at("version").get<int>() != kEnsembleVersion)
            throw FormatError("ensemble meta.json: version mismatch (expected " + std::string(kEnsembleFormat) + " v" +
                              std::to_string(kEnsembleVersion) + ")");
        ens.burn_in = meta.at("burn_in").get<double>();
        n_samples = meta.at("n_samples").get<std::size_t>();
        n_snapshots = meta.at("n_snapshots").get<std::size_t>();
        for (const auto& t : meta.at("trajectories"))
            ens.trajectories.push_back({t.at("trajectory").get<std::uint32_t>(), t.at("tau").get<double>(),
                                        t.at("interval").get<std::size_t>(), t.at("n_samples").get<std::size_t>(),
                                        t.at("n_records").get<std::size_t>(), t.at("t_start").get<double>(),
                                        t.at("t_end").get<double>(), t.at("mean_dissipation").get<double>(),
                                        t.at("mean_energy").get<double>(), t.at("max_norm_drift").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("ensemble meta.json: corrupt file (" + std::string(e.what()) + ")");
    }

    const std::string obs_text = io::read_file((dir / "observables.csv").string());
    const auto lines = io::lines_of(obs_text, "ensemble observables");
    if (lines.size() < 2 || lines[0] != "# spinflow-observables v1") throw FormatError("ensemble observables: version mismatch");
    if (lines[1] != kObservablesHeader) throw FormatError("ensemble observables: unexpected column header");
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto c = io::split(lines[i]);
        if (c.size() != 7) throw FormatError("ensemble observables: corrupt row " + std::to_string(i - 2));
        ens.samples.push_back({io::parse_int<std::uint32_t>(c[0]),
                               {io::parse_double(c[1]), io::parse_double(c[2]), io::parse_double(c[3]), io::parse_double(c[4]),
                                io::parse_double(c[5]), io::parse_double(c[6])}});
    }
    if (ens.samples.size() != n_samples)
        throw FormatError("ensemble observables: corrupt file, expected " + std::to_string(n_samples) + " rows, found " +
                          std::to_string(ens.samples.size()));
    for (std::size_t i = 0; i < n_snapshots; ++i) {
        auto f = load_field((dir / "fields" / field_file_name(i)).string());
        if (f.size() != ens.config.n_grid) throw FormatError("ensemble field " + field_file_name(i) + ": grid size differs from sim.N");
        ens.snapshots.push_back(std::move(f));
    }
    return ens;
}

} // namespace spinflow
