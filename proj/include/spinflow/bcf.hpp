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

// Curve lift v(x) = int_0^x u of a sphere-valued tangent field, by cumulative trapezoid on the
// periodic grid. Since u_N = u_0 the trapezoid sum over a full period equals dx sum_k u_k, so
// v(2pi) = 2pi <u> holds to rounding with the space average used everywhere else.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/io.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

struct CurveField {
    std::vector<Vec3> points;  // v(x_k), k = 0..N
    double grid_spacing = 0.0;

    std::size_t segments() const noexcept { return points.empty() ? 0 : points.size() - 1; }
};

inline CurveField bcf_transform(const SphereField& u) {
    const std::size_t n = u.size();
    const double dx = u.spacing();
    CurveField v{std::vector<Vec3>(n + 1), dx};
    // summing raw u_k + u_{k+1} and scaling once keeps v_N equal to dx * sum_k u_k up to rounding
    Vec3 acc{};
    for (std::size_t k = 0; k < n; ++k) {
        acc += u[k] + u[k + 1 == n ? 0 : k + 1];
        v.points[k + 1] = (0.5 * dx) * acc;
    }
    return v;
}

struct BcfReport {
    double tangent_deviation = 0.0;  // max_k | |dv| - 1 | on segments
    double energy_residual = 0.0;    // | ||d2 v||^2 - ||d u||^2 |
    double h2_residual = 0.0;        // | ||d3 v||^2 - ||d2 u||^2 |
    double endpoint_residual = 0.0;  // | v(2pi) / 2pi - <u> |
};

/// Residuals of the curve/field norm dictionary. The curve's derivatives are difference
/// quotients of v on its own grid; the field norms are the field_core discretizations.
inline BcfReport bcf_checks(const SphereField& u, const CurveField& v) {
    const std::size_t n = u.size();
    if (v.points.size() != n + 1) throw ArgumentError("bcf_checks: curve has " + std::to_string(v.points.size()) + " points, expected N+1");
    const double dx = v.grid_spacing;
    std::vector<Vec3> d(n);  // segment tangents (v_{k+1} - v_k) / dx, periodic in k
    BcfReport r;
    for (std::size_t k = 0; k < n; ++k) {
        d[k] = (1.0 / dx) * (v.points[k + 1] - v.points[k]);
        r.tangent_deviation = std::max(r.tangent_deviation, std::abs(norm(d[k]) - 1.0));
    }
    double e2 = 0.0, e3 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const Vec3& prev = d[k == 0 ? n - 1 : k - 1];
        const Vec3& next = d[k + 1 == n ? 0 : k + 1];
        e2 += norm_sq((1.0 / dx) * (d[k] - prev));
        e3 += norm_sq((1.0 / (dx * dx)) * (next - 2.0 * d[k] + prev));
    }
    e2 *= dx;
    e3 *= dx;
    const auto lap = second_derivative(u);
    r.energy_residual = std::abs(e2 - dirichlet_energy(u));
    r.h2_residual = std::abs(e3 - l2_sq(lap));
    r.endpoint_residual = norm((1.0 / kTwoPi) * v.points.back() - space_average(u));
    return r;
}

/// "spinflow-curve v1, points=<N+1>" then rows "x,vx,vy,vz".
inline std::string curve_to_csv(const CurveField& v) {
    std::string s = "spinflow-curve v1, points=" + std::to_string(v.points.size()) + "\n";
    for (std::size_t k = 0; k < v.points.size(); ++k) {
        const Vec3& p = v.points[k];
        s += io::format_double(static_cast<double>(k) * v.grid_spacing) + ',' + io::format_double(p.x) + ',' + io::format_double(p.y) + ',' +
             io::format_double(p.z) + '\n';
    }
    return s;
}

inline CurveField curve_from_csv(std::string_view text) {
    const auto lines = io::lines_of(text, "curve");
    constexpr std::string_view prefix = "spinflow-curve v1, points=";
    if (lines.empty() || lines[0].substr(0, prefix.size()) != prefix) throw FormatError("curve: missing or unsupported header");
    const auto m = io::parse_int<std::size_t>(lines[0].substr(prefix.size()));
    if (m < 2 || lines.size() != m + 1) throw FormatError("curve: truncated or corrupt row count");
    CurveField v{std::vector<Vec3>(m), 0.0};
    double x1 = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
        const auto c = io::split(lines[k + 1]);
        if (c.size() != 4) throw FormatError("curve: row " + std::to_string(k) + " does not have 4 columns");
        if (k == 1) x1 = io::parse_double(c[0]);
        v.points[k] = {io::parse_double(c[1]), io::parse_double(c[2]), io::parse_double(c[3])};
    }
    v.grid_spacing = x1;
    return v;
}

} // namespace spinflow
