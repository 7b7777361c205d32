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

// Sphere-valued fields on the periodic grid x_k = k * 2pi / N and their discrete calculus.
//
// Stencils: the second derivative is the 3-point periodic stencil and the Dirichlet energy is
// the matching forward-difference norm, so sum_k u_k . (D2 u)_k dx == -energy up to rounding.
// Integrals are left Riemann sums, exact for trigonometric polynomials below Nyquist.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinflow/error.hpp"
#include "spinflow/io.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Length |D| of the domain [0, 2pi].
inline constexpr double kDomainLength = kTwoPi;
inline constexpr double kUnitNormTolerance = 1e-12;

/// Tag for constructing a field whose unit-norm invariant the caller already guarantees.
struct trusted_t {
    explicit trusted_t() = default;
};
inline constexpr trusted_t trusted{};

class SphereField {
public:
    /// Validates N >= 8, N even and | |values[k]| - 1 | <= 1e-12.
    explicit SphereField(std::vector<Vec3> values) : values_(std::move(values)) {
        check_size(values_.size());
        for (std::size_t k = 0; k < values_.size(); ++k) {
            const Vec3& v = values_[k];
            if (!is_finite(v) || std::abs(norm(v) - 1.0) > kUnitNormTolerance)
                throw ArgumentError("SphereField: value " + std::to_string(k) + " is not a unit vector");
        }
    }

    SphereField(trusted_t, std::vector<Vec3> values) : values_(std::move(values)) {
        check_size(values_.size());
    }

    /// Normalizes an arbitrary nowhere-vanishing R^3 field onto the sphere.
    static SphereField normalized(std::vector<Vec3> raw) {
        for (auto& v : raw) {
            const double n = norm(v);
            if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("SphereField::normalized: zero or non-finite vector");
            v *= 1.0 / n;
        }
        return SphereField(std::move(raw));
    }

    /// Samples f(x_k) and normalizes.
    template <class F>
    static SphereField sample(std::size_t n, F&& f) {
        std::vector<Vec3> raw(n);
        const double dx = kTwoPi / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) raw[k] = f(static_cast<double>(k) * dx);
        return normalized(std::move(raw));
    }

    static SphereField constant(std::size_t n, const Vec3& direction) {
        return normalized(std::vector<Vec3>(n, direction));
    }

    std::size_t size() const noexcept { return values_.size(); }
    double spacing() const noexcept { return kTwoPi / static_cast<double>(values_.size()); }
    double x(std::size_t k) const noexcept { return static_cast<double>(k) * spacing(); }
    const Vec3& operator[](std::size_t k) const noexcept { return values_[k]; }
    std::span<const Vec3> values() const noexcept { return values_; }

    /// max_k | |values[k]| - 1 |
    double max_norm_deviation() const noexcept {
        double m = 0.0;
        for (const auto& v : values_) m = std::max(m, std::abs(norm(v) - 1.0));
        return m;
    }

    friend bool operator==(const SphereField&, const SphereField&) = default;

private:
    static void check_size(std::size_t n) {
        if (n < 8 || n % 2 != 0)
            throw ArgumentError("SphereField: grid size must be even and >= 8, got " + std::to_string(n));
    }

    std::vector<Vec3> values_;
};

/// |<u>|^2 and ||d_x u||^2, the pair of SME conservation laws.
struct ObservableVector {
    double avg_sq = 0.0;
    double energy = 0.0;
};

// ---------------------------------------------------------------------------------------------
// Integrals over the grid

/// sum_k w_k dx over [0, 2pi]
inline Vec3 integrate(std::span<const Vec3> w) {
    Vec3 s{};
    for (const auto& v : w) s += v;
    return (kTwoPi / static_cast<double>(w.size())) * s;
}

/// ||w||^2_{L^2}
inline double l2_sq(std::span<const Vec3> w) {
    double s = 0.0;
    for (const auto& v : w) s += norm_sq(v);
    return s * kTwoPi / static_cast<double>(w.size());
}

inline Vec3 space_average(const SphereField& u) {
    Vec3 s{};
    for (const auto& v : u.values()) s += v;
    return (1.0 / static_cast<double>(u.size())) * s;
}

/// Periodic 3-point stencil (u[k+1] - 2u[k] + u[k-1]) / dx^2.
inline void second_derivative_into(std::span<const Vec3> u, std::span<Vec3> out) {
    const std::size_t n = u.size();
    const double dx = kTwoPi / static_cast<double>(n);
    const double inv = 1.0 / (dx * dx);
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& l = u[k == 0 ? n - 1 : k - 1];
        const Vec3& r = u[k + 1 == n ? 0 : k + 1];
        const Vec3& c = u[k];
        out[k] = {(r.x - 2.0 * c.x + l.x) * inv, (r.y - 2.0 * c.y + l.y) * inv, (r.z - 2.0 * c.z + l.z) * inv};
    }
}

inline std::vector<Vec3> second_derivative(const SphereField& u) {
    std::vector<Vec3> out(u.size());
    second_derivative_into(u.values(), out);
    return out;
}

/// Periodic central difference (u[k+1] - u[k-1]) / (2 dx).
inline std::vector<Vec3> first_derivative(const SphereField& u) {
    const std::size_t n = u.size();
    const double inv = 1.0 / (2.0 * u.spacing());
    std::vector<Vec3> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = inv * (u[k + 1 == n ? 0 : k + 1] - u[k == 0 ? n - 1 : k - 1]);
    return out;
}

/// ||d_x u||^2 as sum_k |u[k+1] - u[k]|^2 / dx, which equals -(u, D2 u) on the grid.
inline double dirichlet_energy(const SphereField& u) {
    const std::size_t n = u.size();
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k) s += norm_sq(u[k + 1 == n ? 0 : k + 1] - u[k]);
    return s / u.spacing();
}

inline std::vector<Vec3> cross_field(std::span<const Vec3> u, std::span<const Vec3> w) {
    if (u.size() != w.size())
        throw ArgumentError("cross_field: length mismatch " + std::to_string(u.size()) + " vs " + std::to_string(w.size()));
    std::vector<Vec3> out(u.size());
    for (std::size_t k = 0; k < u.size(); ++k) out[k] = cross(u[k], w[k]);
    return out;
}

inline std::vector<Vec3> cross_field(const SphereField& u, std::span<const Vec3> w) {
    return cross_field(u.values(), w);
}

/// ||u - <u>||^2_{L^2} by direct quadrature; equals |D| (1 - |<u>|^2) for unit fields.
inline double centered_l2_sq(const SphereField& u) {
    const Vec3 m = space_average(u);
    double s = 0.0;
    for (const auto& v : u.values()) s += norm_sq(v - m);
    return s * u.spacing();
}

inline ObservableVector observable_vector(const SphereField& u) {
    return {norm_sq(space_average(u)), dirichlet_energy(u)};
}

// ---------------------------------------------------------------------------------------------
// Snapshot file: "spinflow-field v1, N=<int>" then N rows "x,ux,uy,uz".

inline std::string field_to_csv(const SphereField& u) {
    std::string s = "spinflow-field v1, N=" + std::to_string(u.size()) + "\n";
    for (std::size_t k = 0; k < u.size(); ++k) {
        const Vec3& v = u[k];
        s += io::format_double(u.x(k)) + ',' + io::format_double(v.x) + ',' + io::format_double(v.y) + ',' +
             io::format_double(v.z) + '\n';
    }
    return s;
}

inline SphereField field_from_csv(std::string_view text) {
    const auto lines = io::lines_of(text, "field snapshot");
    constexpr std::string_view prefix = "spinflow-field v1, N=";
    if (lines.empty() || lines[0].substr(0, prefix.size()) != prefix) {
        if (!lines.empty() && lines[0].substr(0, 15) == "spinflow-field ")
            throw FormatError("field snapshot: unsupported version '" + std::string(lines[0]) + "'");
        throw FormatError("field snapshot: missing header");
    }
    const auto n = io::parse_int<std::size_t>(lines[0].substr(prefix.size()));
    if (lines.size() != n + 1)
        throw FormatError("field snapshot: expected " + std::to_string(n) + " rows, found " + std::to_string(lines.size() - 1));
    std::vector<Vec3> values(n);
    for (std::size_t k = 0; k < n; ++k) {
        const auto cols = io::split(lines[k + 1]);
        if (cols.size() != 4) throw FormatError("field snapshot: row " + std::to_string(k) + " does not have 4 columns");
        values[k] = {io::parse_double(cols[1]), io::parse_double(cols[2]), io::parse_double(cols[3])};
    }
    try {
        return SphereField(std::move(values));
    } catch (const ArgumentError& e) {
        throw FormatError(std::string("field snapshot: ") + e.what());
    }
}

inline void save_field(const std::string& path, const SphereField& u) { io::write_file(path, field_to_csv(u)); }
inline SphereField load_field(const std::string& path) { return field_from_csv(io::read_file(path)); }

} // namespace spinflow
