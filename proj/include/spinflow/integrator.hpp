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

// Time stepping for the scaled stochastic LLG equation
//
//   du = [u x d2u - nu u x (u x d2u)] dt + sqrt(nu) sum_j lambda_j e_j u x o dW^j,   |u| = 1.
//
// The drift is written as u x a with a = d2u + nu (d2u x u), and the noise as u x W, so every
// update is a pointwise rotation of u with angular velocity -(a dt + sqrt(nu) W). Rotations are
// exact isometries: no renormalization is ever applied. nu = 0 gives the Schroedinger map flow.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/io.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/philox.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

enum class Scheme {
    /// Predictor plus trapezoid-averaged corrector sweeps.
    rotation_heun,
    /// Single explicit rotation; kept for convergence studies.
    rotation_euler,
};

inline std::string to_string(Scheme s) { return s == Scheme::rotation_heun ? "rotation_heun" : "rotation_euler"; }

inline Scheme scheme_from_string(const std::string& s) {
    if (s == "rotation_heun") return Scheme::rotation_heun;
    if (s == "rotation_euler") return Scheme::rotation_euler;
    throw ConfigError("unknown scheme '" + s + "' (expected rotation_heun or rotation_euler)");
}

/// Recommended dt / dx^2 for rotation_heun at nu <= 1.
inline constexpr double kRecommendedStability = 0.2;
/// Configurations with dt / dx^2 above this are rejected.
inline constexpr double kHardStability = 1.0;

struct SimConfig {
    double nu = 0.5;
    double dt = 0.0;
    std::size_t n_grid = 256;
    double horizon = 1.0;
    std::uint64_t seed = 0;
    std::uint32_t trajectory = 0;
    Scheme scheme = Scheme::rotation_heun;
    std::size_t record_stride = 1;
    /// Corrector sweeps of rotation_heun. One sweep is the textbook Heun step, which amplifies
    /// the dispersive modes of the nu = 0 flow by 1 + (k^2 dt)^4 / 4 per step; two sweeps are
    /// stable for k^2 dt <= 2.
    int corrector_sweeps = 2;
    NoiseSpectrum spectrum;

    double dx() const noexcept { return kTwoPi / static_cast<double>(n_grid); }
    /// dt / dx^2
    double stability_ratio() const noexcept { return dt / (dx() * dx()); }

    friend bool operator==(const SimConfig&, const SimConfig&) = default;
};

/// dt(nu) = min(0.2, 0.05 / nu) dx^2: resolves the O(1) conservative drift and the O(nu) damping.
inline double default_dt(double nu, std::size_t n_grid) {
    const double dx = kTwoPi / static_cast<double>(n_grid);
    const double c = nu > 0.0 ? std::min(kRecommendedStability, 0.05 / nu) : kRecommendedStability;
    return c * dx * dx;
}

inline SimConfig make_config(std::size_t n_grid, double nu, NoiseSpectrum spectrum) {
    SimConfig cfg{.nu = nu, .dt = default_dt(nu, n_grid), .n_grid = n_grid, .spectrum = std::move(spectrum)};
    return cfg;
}

inline void validate(const SimConfig& cfg) {
    if (cfg.n_grid < 8 || cfg.n_grid % 2 != 0) throw ConfigError("sim.N must be even and >= 8");
    if (cfg.spectrum.n_grid() != cfg.n_grid) throw ConfigError("noise spectrum grid does not match sim.N");
    if (!(cfg.nu >= 0.0 && cfg.nu <= 1.0)) throw ConfigError("sim.nu must lie in [0, 1]");
    if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("sim.dt must be positive");
    const double bound = kHardStability * cfg.dx() * cfg.dx();
    if (cfg.dt > bound)
        throw ConfigError("sim.dt=" + io::format_double(cfg.dt) + " exceeds the stability bound " + io::format_double(bound) +
                          " (= " + io::format_double(kHardStability) + " dx^2; recommended <= " +
                          io::format_double(kRecommendedStability * cfg.dx() * cfg.dx()) + ")");
    if (!(cfg.horizon >= 0.0) || !std::isfinite(cfg.horizon)) throw ConfigError("sim.T must be finite and >= 0");
    if (cfg.record_stride == 0) throw ConfigError("sim.record_stride must be >= 1");
    if (cfg.corrector_sweeps < 1) throw ConfigError("sim.corrector_sweeps must be >= 1");
}

struct StepReport {
    /// max_k | |u[k]| - 1 | after the step; no renormalization is applied.
    double max_norm_drift = 0.0;
    double dt_used = 0.0;
};

// ---------------------------------------------------------------------------------------------

/// Rotation of u about axis/|axis| by the angle |axis| (Rodrigues).
inline Vec3 rotate(const Vec3& u, const Vec3& axis) noexcept {
    const double phi_sq = norm_sq(axis);
    double s = 0.0;  // sin(phi) / phi
    double c = 0.0;  // (1 - cos(phi)) / phi^2
    if (phi_sq < 1e-12) {
        s = 1.0 - phi_sq / 6.0;
        c = 0.5 - phi_sq / 24.0;
    } else {
        const double phi = std::sqrt(phi_sq);
        const double half = std::sin(0.5 * phi);
        s = std::sin(phi) / phi;
        c = 2.0 * half * half / phi_sq;
    }
    const Vec3 axu = cross(axis, u);
    return u + s * axu + c * cross(axis, axu);
}

/// a = d2u + nu (d2u x u) given a precomputed d2u.
inline void effective_axis_into(std::span<const Vec3> u, std::span<const Vec3> lap, double nu, std::span<Vec3> out) {
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = lap[k] + nu * cross(lap[k], u[k]);
}

/// a(x) = d2u + nu (d2u x u); the LLG drift is u x a.
inline std::vector<Vec3> effective_axis(const SphereField& u, double nu) {
    const auto lap = second_derivative(u);
    std::vector<Vec3> out(u.size());
    effective_axis_into(u.values(), lap, nu, out);
    return out;
}

/// Reusable buffers for stepping one trajectory.
class Stepper {
public:
    explicit Stepper(const SimConfig& cfg) : cfg_(cfg) {
        validate(cfg_);
        const std::size_t n = cfg_.n_grid;
        lap_.resize(n);
        axis0_.resize(n);
        axis1_.resize(n);
        kick_.resize(n);
        trial_.resize(n);
    }

    const SimConfig& config() const noexcept { return cfg_; }

    /// Advances `u` in place by one step; `step_index` selects the noise increment.
    StepReport advance(std::vector<Vec3>& u, std::uint64_t step_index) {
        const std::size_t n = u.size();
        const double dt = cfg_.dt;
        const double nu = cfg_.nu;

        // kick = -sqrt(nu) W, the state-independent noise rotation
        if (nu > 0.0 && !cfg_.spectrum.active_modes().empty()) {
            const auto inc = sample_increment(cfg_.spectrum, dt, {cfg_.seed, cfg_.trajectory, step_index});
            noise_field_into(cfg_.spectrum, inc, kick_);
            const double scale = -std::sqrt(nu);
            for (auto& v : kick_) v *= scale;
        } else {
            std::fill(kick_.begin(), kick_.end(), Vec3{});
        }

        second_derivative_into(u, lap_);
        effective_axis_into(u, lap_, nu, axis0_);
        for (std::size_t k = 0; k < n; ++k) trial_[k] = rotate(u[k], kick_[k] - dt * axis0_[k]);

        if (cfg_.scheme == Scheme::rotation_heun) {
            for (int sweep = 0; sweep < cfg_.corrector_sweeps; ++sweep) {
                second_derivative_into(trial_, lap_);
                effective_axis_into(trial_, lap_, nu, axis1_);
                for (std::size_t k = 0; k < n; ++k)
                    trial_[k] = rotate(u[k], kick_[k] - (0.5 * dt) * (axis0_[k] + axis1_[k]));
            }
        }

        StepReport report{0.0, dt};
        for (std::size_t k = 0; k < n; ++k) {
            const Vec3& v = trial_[k];
            if (!is_finite(v))
                throw BlowupError("non-finite state at step " + std::to_string(step_index) + " (dt=" + io::format_double(dt) +
                                      "); reduce sim.dt, recommended <= " +
                                      io::format_double(kRecommendedStability * cfg_.dx() * cfg_.dx()),
                                  step_index, dt);
            report.max_norm_drift = std::max(report.max_norm_drift, std::abs(norm(v) - 1.0));
        }
        u.swap(trial_);
        return report;
    }

private:
    SimConfig cfg_;
    std::vector<Vec3> lap_, axis0_, axis1_, kick_, trial_;
};

/// One step from u; `step_index` selects the noise increment of trajectory cfg.trajectory.
inline std::pair<SphereField, StepReport> step_stratonovich(const SphereField& u, const SimConfig& cfg, std::uint64_t step_index) {
    if (u.size() != cfg.n_grid) throw ArgumentError("step_stratonovich: field size does not match sim.N");
    Stepper stepper(cfg);
    std::vector<Vec3> v(u.values().begin(), u.values().end());
    const auto report = stepper.advance(v, step_index);
    return {SphereField(trusted, std::move(v)), report};
}

// ---------------------------------------------------------------------------------------------
// Observables along a trajectory

struct ObservableRecord {
    double t = 0.0;
    double avg_sq = 0.0;          // |<u>|^2
    double energy = 0.0;          // ||d_x u||^2
    double centered_l2_sq = 0.0;  // ||u - <u>||^2
    double dissipation = 0.0;     // ||u x d2u||^2
    double h2 = 0.0;              // ||d2u||^2

    friend bool operator==(const ObservableRecord&, const ObservableRecord&) = default;
};

inline ObservableRecord measure(const SphereField& u, double t) {
    const auto lap = second_derivative(u);
    ObservableRecord r;
    r.t = t;
    r.avg_sq = norm_sq(space_average(u));
    r.energy = dirichlet_energy(u);
    r.centered_l2_sq = centered_l2_sq(u);
    double diss = 0.0, h2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        diss += norm_sq(cross(u[k], lap[k]));
        h2 += norm_sq(lap[k]);
    }
    r.dissipation = diss * u.spacing();
    r.h2 = h2 * u.spacing();
    return r;
}

struct ObservableSeries {
    std::vector<ObservableRecord> records;

    std::size_t size() const noexcept { return records.size(); }
    bool empty() const noexcept { return records.empty(); }

    template <class Proj>
    std::vector<double> column(Proj proj) const {
        std::vector<double> out;
        out.reserve(records.size());
        for (const auto& r : records) out.push_back(std::invoke(proj, r));
        return out;
    }

    friend bool operator==(const ObservableSeries&, const ObservableSeries&) = default;
};

inline constexpr std::string_view kSeriesHeader = "t,avg_sq,energy,centered_l2_sq,dissipation,h2";

inline std::string series_to_csv(const ObservableSeries& s) {
    std::string out = "# spinflow-series v1\n";
    out += kSeriesHeader;
    out += '\n';
    for (const auto& r : s.records) {
        out += io::format_double(r.t) + ',' + io::format_double(r.avg_sq) + ',' + io::format_double(r.energy) + ',' +
               io::format_double(r.centered_l2_sq) + ',' + io::format_double(r.dissipation) + ',' + io::format_double(r.h2) + '\n';
    }
    return out;
}

inline ObservableSeries series_from_csv(std::string_view text) {
    const auto lines = io::lines_of(text, "observable series");
    if (lines.size() < 2 || lines[0] != "# spinflow-series v1") throw FormatError("observable series: missing or unsupported version header");
    if (lines[1] != kSeriesHeader) throw FormatError("observable series: unexpected column header");
    ObservableSeries s;
    for (std::size_t i = 2; i < lines.size(); ++i) {
        const auto c = io::split(lines[i]);
        if (c.size() != 6) throw FormatError("observable series: row " + std::to_string(i - 2) + " does not have 6 columns");
        s.records.push_back({io::parse_double(c[0]), io::parse_double(c[1]), io::parse_double(c[2]), io::parse_double(c[3]),
                             io::parse_double(c[4]), io::parse_double(c[5])});
    }
    return s;
}

/// Blowup during run_trajectory, carrying the records collected before the failure.
class TrajectoryBlowup : public BlowupError {
public:
    TrajectoryBlowup(const BlowupError& e, ObservableSeries partial)
        : BlowupError(e), partial_(std::move(partial)) {}
    const ObservableSeries& partial() const noexcept { return partial_; }

private:
    ObservableSeries partial_;
};

struct TrajectoryResult {
    ObservableSeries series;
    SphereField final_state;
    double max_norm_drift = 0.0;
    std::uint64_t steps = 0;
};

/// Called with (frame index, time, field) every `snapshot_stride` records.
using SnapshotSink = std::function<void(std::size_t, double, const SphereField&)>;

inline std::uint64_t step_count(double horizon, double dt) {
    return static_cast<std::uint64_t>(std::ceil(horizon / dt - 1e-9));
}

/// Integrates from u0 to cfg.horizon, recording observables every cfg.record_stride steps
/// (including t = 0). Starts from step index `first_step` so segments can be chained.
inline TrajectoryResult run_trajectory(const SphereField& u0, const SimConfig& cfg, const SnapshotSink& sink = {},
                                       std::size_t snapshot_stride = 0, std::uint64_t first_step = 0) {
    if (u0.size() != cfg.n_grid) throw ArgumentError("run_trajectory: field size does not match sim.N");
    Stepper stepper(cfg);
    const std::uint64_t n_steps = step_count(cfg.horizon, cfg.dt);
    std::vector<Vec3> u(u0.values().begin(), u0.values().end());
    TrajectoryResult result{{}, u0, u0.max_norm_deviation(), 0};
    std::size_t frame = 0;

    auto record = [&](std::uint64_t step) {
        SphereField f(trusted, u);
        const double t = static_cast<double>(step) * cfg.dt;
        if (sink && snapshot_stride > 0 && result.series.size() % snapshot_stride == 0) sink(frame++, t, f);
        result.series.records.push_back(measure(f, t));
    };

    record(0);
    for (std::uint64_t s = 1; s <= n_steps; ++s) {
        try {
            const auto rep = stepper.advance(u, first_step + s - 1);
            result.max_norm_drift = std::max(result.max_norm_drift, rep.max_norm_drift);
        } catch (const BlowupError& e) {
            throw TrajectoryBlowup(e, std::move(result.series));
        }
        if (s % cfg.record_stride == 0) record(s);
    }
    result.steps = n_steps;
    result.final_state = SphereField(trusted, std::move(u));
    return result;
}

/// Smooth random unit field: normalized c0 + sum_{m<=modes} (a_m cos mx + b_m sin mx) / m with
/// Gaussian R^3 coefficients drawn from the trajectory's reserved initial-data stream.
inline SphereField random_smooth_field(std::size_t n, std::uint64_t seed, std::uint32_t trajectory, int modes = 3) {
    const NormalStream stream({seed, trajectory, std::numeric_limits<std::uint64_t>::max()});
    auto draw = [&](std::uint32_t idx) { return Vec3{stream.normal(3 * idx), stream.normal(3 * idx + 1), stream.normal(3 * idx + 2)}; };
    const Vec3 c0 = draw(0);
    std::vector<Vec3> a, b;
    for (int m = 1; m <= modes; ++m) {
        a.push_back(draw(static_cast<std::uint32_t>(2 * m - 1)));
        b.push_back(draw(static_cast<std::uint32_t>(2 * m)));
    }
    return SphereField::sample(n, [&](double x) {
        Vec3 v = c0;
        for (int m = 1; m <= modes; ++m)
            v += (1.0 / m) * (std::cos(m * x) * a[static_cast<std::size_t>(m - 1)] + std::sin(m * x) * b[static_cast<std::size_t>(m - 1)]);
        return v;
    });
}

} // namespace spinflow
