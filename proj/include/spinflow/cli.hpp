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

// Subcommands behind the spinflow executable. Each writes its outputs plus one manifest.json
// into the output directory and returns a process exit code:
//   0 ok, 1 other failure, 2 configuration error, 3 numerical blowup, 4 missing/corrupt input.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "spinflow/analysis.hpp"
#include "spinflow/bcf.hpp"
#include "spinflow/config.hpp"
#include "spinflow/ensemble.hpp"
#include "spinflow/error.hpp"
#include "spinflow/integrator.hpp"
#include "spinflow/io.hpp"
#include "spinflow/sweep.hpp"

namespace spinflow {

inline constexpr std::string_view kVersion = "spinflow 1.0.0";

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitBlowup = 3, kExitInput = 4 };

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    bool quiet = false;
};

/// --threads, else SPINFLOW_THREADS, else 1.
inline unsigned resolve_threads(const CliOptions& o) {
    if (o.threads) return std::max(1u, *o.threads);
    if (const char* env = std::getenv("SPINFLOW_THREADS")) {
        try {
            return std::max(1u, io::parse_int<unsigned>(env));
        } catch (const FormatError&) {
            throw ConfigError("SPINFLOW_THREADS must be a positive integer");
        }
    }
    return 1;
}

inline std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

/// A config path may also point at a previous manifest.json; its recorded config is reused.
inline ConfigMap read_config_or_manifest(const std::string& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const FormatError&) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        try {
            const auto j = nlohmann::json::parse(text);
            return j.at("config").get<ConfigMap>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("manifest '" + path + "' has no usable config: " + e.what());
        }
    }
    return parse_config_text(text);
}

class RunContext {
public:
    RunContext(std::string command, const CliOptions& opt) : command_(std::move(command)), opt_(opt), start_(utc_timestamp()) {
        if (opt_.out_dir.empty()) throw ConfigError("--out is required");
        config_ = read_config_or_manifest(opt_.config_path);
        if (opt_.seed) config_["sim.seed"] = std::to_string(*opt_.seed);
        std::filesystem::create_directories(opt_.out_dir);
    }

    ConfigMap& config() noexcept { return config_; }
    std::filesystem::path out() const { return opt_.out_dir; }
    bool quiet() const noexcept { return opt_.quiet; }
    void add_output(const std::filesystem::path& p) { outputs_.push_back(p.string()); }
    void set_status(std::string s) { status_ = std::move(s); }

    /// Pins derived values so the manifest alone reproduces the run.
    void pin(const SimConfig& cfg) {
        config_["sim.dt"] = io::format_double(cfg.dt);
        config_["sim.seed"] = std::to_string(cfg.seed);
    }

    void write_manifest(unsigned threads) const {
        std::uint64_t seed = 0;
        if (auto it = config_.find("sim.seed"); it != config_.end()) {
            try {
                seed = io::parse_int<std::uint64_t>(it->second);
            } catch (const FormatError&) {
            }
        }
        const nlohmann::json m = {{"version", kVersion}, {"command", command_}, {"status", status_},   {"config", config_},
                                  {"seed", seed},        {"threads", threads},  {"start_time", start_}, {"end_time", utc_timestamp()},
                                  {"outputs", outputs_}};
        io::write_file((out() / "manifest.json").string(), m.dump(2) + "\n");
    }

private:
    std::string command_;
    CliOptions opt_;
    std::string start_;
    ConfigMap config_;
    std::vector<std::string> outputs_;
    std::string status_ = "ok";
};

inline std::string frame_file_name(std::size_t frame) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "frame_%06zu.csv", frame);
    return buf;
}

inline int cmd_simulate_impl(RunContext& ctx) {
    const SimConfig cfg = sim_config_from(ctx.config());
    ctx.pin(cfg);
    const SphereField u0 = initial_field_from(ctx.config(), cfg);
    const auto stride = detail::get_int<std::size_t>(ctx.config(), "sim.snapshot_stride", 0);
    const auto fields = ctx.out() / "fields";
    if (stride > 0) std::filesystem::create_directories(fields);
    SnapshotSink sink;
    if (stride > 0)
        sink = [&](std::size_t frame, double, const SphereField& f) {
            save_field((fields / frame_file_name(frame)).string(), f);
            ctx.add_output(fields / frame_file_name(frame));
        };
    try {
        const auto res = run_trajectory(u0, cfg, sink, stride);
        io::write_file((ctx.out() / "series.csv").string(), series_to_csv(res.series));
        save_field((ctx.out() / "final_state.csv").string(), res.final_state);
        ctx.add_output(ctx.out() / "series.csv");
        ctx.add_output(ctx.out() / "final_state.csv");
        if (!ctx.quiet())
            std::cout << "simulate: " << res.steps << " steps, max | |u|-1 | = " << io::format_double(res.max_norm_drift) << "\n";
        return kExitOk;
    } catch (const TrajectoryBlowup& e) {
        io::write_file((ctx.out() / "series.partial.csv").string(), series_to_csv(e.partial()));
        ctx.add_output(ctx.out() / "series.partial.csv");
        throw;
    }
}

inline int cmd_stationary_impl(RunContext& ctx, unsigned threads) {
    const SimConfig cfg = sim_config_from(ctx.config());
    ctx.pin(cfg);
    auto settings = ensemble_settings_from(ctx.config());
    settings.options.threads = threads;
    const auto ens = estimate_stationary(cfg, settings.n_samples, settings.n_trajectories, settings.options);
    save_ensemble(ctx.out(), ens);
    for (const char* f : {"meta.json", "observables.csv"}) ctx.add_output(ctx.out() / f);
    if (!ens.snapshots.empty()) ctx.add_output(ctx.out() / "fields");
    if (!ctx.quiet()) {
        std::cout << "stationary: nu=" << io::format_double(cfg.nu) << " samples=" << ens.samples.size()
                  << " time-averaged dissipation=" << io::format_double(ens.time_average_dissipation()) << "\n";
        for (const auto& c : stationarity_self_test(ens))
            if (!c.pass) std::cout << "  warning: stationarity self-test fails for " << c.observable << " (z=" << io::format_double(c.z) << ")\n";
    }
    return kExitOk;
}

inline std::string nu_dir_name(double nu) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "nu_%g", nu);
    return buf;
}

inline int cmd_sweep_impl(RunContext& ctx, unsigned threads) {
    const SimConfig cfg = sim_config_from(ctx.config());
    ctx.config()["sim.seed"] = std::to_string(cfg.seed);
    auto settings = ensemble_settings_from(ctx.config());
    settings.options.threads = threads;
    const auto result = inviscid_sweep(cfg, settings.nus, settings.n_samples, settings.n_trajectories, settings.options,
                                       [&](const StationaryEnsemble& ens) {
                                           const auto dir = ctx.out() / nu_dir_name(ens.nu());
                                           save_ensemble(dir, ens);
                                           ctx.add_output(dir);
                                       });
    io::write_file((ctx.out() / "sweep_summary.csv").string(), sweep_summary_csv(result));
    ctx.add_output(ctx.out() / "sweep_summary.csv");
    bool all_ok = true;
    for (const auto& r : result.rows) {
        all_ok = all_ok && r.ok;
        if (!r.ok) std::cerr << "sweep: nu=" << io::format_double(r.nu) << " failed: " << r.error << "\n";
    }
    if (!ctx.quiet())
        for (const auto& f : result.flags) std::cout << "sweep: flag: " << f << "\n";
    if (!all_ok) {
        ctx.set_status("partial");
        return kExitBlowup;
    }
    return kExitOk;
}

inline int cmd_analyze_impl(RunContext& ctx) {
    if (!ctx.config().count("analyze.input")) throw ConfigError("analyze needs analyze.input (an ensemble directory)");
    const std::filesystem::path input = ctx.config().at("analyze.input");
    if (!std::filesystem::is_directory(input)) throw FormatError("analyze.input '" + input.string() + "' is not an ensemble directory");
    const auto ens = load_ensemble(input);
    for (const auto& p : write_analysis(ctx.out(), analyze_ensemble(ens))) ctx.add_output(p);
    return kExitOk;
}

/// Field files of bcf.input: one file, a directory of *.csv frames, or an ensemble directory.
inline std::vector<std::filesystem::path> field_stream(const std::filesystem::path& input) {
    namespace fs = std::filesystem;
    if (fs::is_regular_file(input)) return {input};
    fs::path dir = input;
    if (fs::is_directory(input / "fields")) dir = input / "fields";
    if (!fs::is_directory(dir)) throw FormatError("bcf.input '" + input.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw FormatError("bcf.input '" + input.string() + "' contains no field frames");
    return files;
}

inline int cmd_bcf_impl(RunContext& ctx) {
    if (!ctx.config().count("bcf.input")) throw ConfigError("bcf needs bcf.input (a field file or directory of frames)");
    const auto files = field_stream(ctx.config().at("bcf.input"));
    const auto curves = ctx.out() / "curves";
    std::filesystem::create_directories(curves);
    std::string report = "# spinflow-bcf v1\nframe,N,tangent_deviation,energy_residual,h2_residual,endpoint_residual\n";
    for (const auto& f : files) {
        const auto u = load_field(f.string());
        const auto v = bcf_transform(u);
        const auto r = bcf_checks(u, v);
        const auto name = f.stem().string() + ".csv";
        io::write_file((curves / name).string(), curve_to_csv(v));
        ctx.add_output(curves / name);
        report += f.stem().string() + ',' + std::to_string(u.size()) + ',' + io::format_double(r.tangent_deviation) + ',' +
                  io::format_double(r.energy_residual) + ',' + io::format_double(r.h2_residual) + ',' + io::format_double(r.endpoint_residual) + '\n';
    }
    io::write_file((ctx.out() / "bcf_report.csv").string(), report);
    ctx.add_output(ctx.out() / "bcf_report.csv");
    if (!ctx.quiet()) std::cout << "bcf: " << files.size() << " curve(s)\n";
    return kExitOk;
}

/// Runs one subcommand and maps failures to exit codes; errors go to stderr.
inline int run_command(const std::string& command, const CliOptions& opt) {
    std::optional<RunContext> ctx;
    unsigned threads = 1;
    auto finish = [&](int code, const std::string& status) {
        if (ctx) {
            if (status != "ok") ctx->set_status(status);
            try {
                ctx->write_manifest(threads);
            } catch (const std::exception& e) {
                std::cerr << "error: " << e.what() << "\n";
                return code == kExitOk ? kExitFailure : code;
            }
        }
        return code;
    };
    try {
        threads = resolve_threads(opt);
        ctx.emplace(command, opt);
        int code = kExitFailure;
        if (command == "simulate") code = cmd_simulate_impl(*ctx);
        else if (command == "stationary") code = cmd_stationary_impl(*ctx, threads);
        else if (command == "sweep") code = cmd_sweep_impl(*ctx, threads);
        else if (command == "analyze") code = cmd_analyze_impl(*ctx);
        else if (command == "bcf") code = cmd_bcf_impl(*ctx);
        else throw ConfigError("unknown command '" + command + "'");
        return finish(code, code == kExitOk ? "ok" : "partial");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return finish(kExitConfig, "config_error");
    } catch (const BlowupError& e) {
        std::cerr << "numerical blowup: " << e.what() << "\n";
        return finish(kExitBlowup, "blowup");
    } catch (const FormatError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return finish(kExitInput, "input_error");
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return finish(kExitFailure, "failed");
    }
}

inline int cmd_simulate(const CliOptions& o) { return run_command("simulate", o); }
inline int cmd_stationary(const CliOptions& o) { return run_command("stationary", o); }
inline int cmd_sweep(const CliOptions& o) { return run_command("sweep", o); }
inline int cmd_analyze(const CliOptions& o) { return run_command("analyze", o); }
inline int cmd_bcf(const CliOptions& o) { return run_command("bcf", o); }

} // namespace spinflow
