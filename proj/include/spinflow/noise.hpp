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

// Truncated Q-Wiener noise sum_{|j|<=J} lambda_j e_j(x) W^j with R^3-valued Brownian motions W^j
// over the trigonometric basis
//   e_j = sin(j x)/sqrt(pi) (j > 0),  e_0 = 1/sqrt(2 pi),  e_j = cos(j x)/sqrt(pi) (j < 0).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spinflow/error.hpp"
#include "spinflow/field.hpp"
#include "spinflow/philox.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

/// e_j(x), defined for every integer j.
inline double basis_function(int j, double x) {
    if (j > 0) return std::sin(j * x) / std::sqrt(std::numbers::pi);
    if (j == 0) return 1.0 / std::sqrt(2.0 * std::numbers::pi);
    return std::cos(j * x) / std::sqrt(std::numbers::pi);
}

/// d/dx e_j(x).
inline double basis_derivative(int j, double x) {
    if (j > 0) return j * std::cos(j * x) / std::sqrt(std::numbers::pi);
    if (j == 0) return 0.0;
    return -j * std::sin(j * x) / std::sqrt(std::numbers::pi);
}

class NoiseSpectrum {
public:
    /// `lambdas[j + J]` is lambda_j for j in [-J, J]; `n_grid` fixes the cached basis tables.
    NoiseSpectrum(std::vector<double> lambdas, std::size_t n_grid) : lambdas_(std::move(lambdas)), n_grid_(n_grid) {
        if (lambdas_.size() % 2 != 1) throw ArgumentError("NoiseSpectrum: need 2J+1 coefficients");
        truncation_ = static_cast<int>(lambdas_.size() / 2);
        if (n_grid_ < 8 || n_grid_ % 2 != 0) throw ArgumentError("NoiseSpectrum: grid size must be even and >= 8");
        if (2 * static_cast<std::size_t>(truncation_) >= n_grid_)
            throw ArgumentError("NoiseSpectrum: truncation J=" + std::to_string(truncation_) +
                                " must satisfy J < N/2 for an orthonormal grid basis");
        for (int j = -truncation_; j <= truncation_; ++j) {
            const double l = lambda(j);
            if (!std::isfinite(l) || l < 0.0) throw ArgumentError("NoiseSpectrum: lambda_" + std::to_string(j) + " must be finite and >= 0");
            if (lambda(-j) != l) throw ArgumentError("NoiseSpectrum: lambda_j != lambda_{-j} for j=" + std::to_string(j));
        }
        for (int j = 1; j < truncation_; ++j)
            if (lambda(j + 1) > lambda(j))
                throw ArgumentError("NoiseSpectrum: (lambda_j)_{j>=1} must be non-increasing");
        build_tables();
    }

    /// lambda_j = |j|^{-exponent} for 1 <= |j| <= J and lambda_0 as given.
    static NoiseSpectrum power_law(int truncation, double exponent, double lambda0, std::size_t n_grid) {
        if (truncation < 0) throw ArgumentError("NoiseSpectrum: negative truncation");
        std::vector<double> l(2 * static_cast<std::size_t>(truncation) + 1);
        for (int j = -truncation; j <= truncation; ++j)
            l[static_cast<std::size_t>(j + truncation)] = j == 0 ? lambda0 : std::pow(std::abs(j), -exponent);
        return NoiseSpectrum(std::move(l), n_grid);
    }

    /// Coefficients given as (j, lambda_j) pairs for j >= 0 (mirrored to -j) or for both signs.
    static NoiseSpectrum custom(std::span<const std::pair<int, double>> pairs, std::size_t n_grid) {
        int truncation = 0;
        for (const auto& [j, l] : pairs) truncation = std::max(truncation, std::abs(j));
        std::vector<double> l(2 * static_cast<std::size_t>(truncation) + 1, 0.0);
        std::vector<bool> set(l.size(), false);
        auto assign = [&](int j, double v) {
            const auto idx = static_cast<std::size_t>(j + truncation);
            if (set[idx] && l[idx] != v) throw ArgumentError("NoiseSpectrum: conflicting values for lambda_" + std::to_string(j));
            l[idx] = v;
            set[idx] = true;
        };
        for (const auto& [j, v] : pairs) assign(j, v);
        for (const auto& [j, v] : pairs) {
            const auto mirror = static_cast<std::size_t>(-j + truncation);
            if (!set[mirror]) assign(-j, v);
        }
        return NoiseSpectrum(std::move(l), n_grid);
    }

    /// Default profile: J = min(32, N/4), lambda_j = |j|^-2, lambda_0 = 0.
    static NoiseSpectrum default_for(std::size_t n_grid) {
        return power_law(static_cast<int>(std::min<std::size_t>(32, n_grid / 4)), 2.0, 0.0, n_grid);
    }

    int truncation() const noexcept { return truncation_; }
    std::size_t n_grid() const noexcept { return n_grid_; }
    std::size_t n_modes() const noexcept { return lambdas_.size(); }

    double lambda(int j) const {
        check_mode(j);
        return lambdas_[static_cast<std::size_t>(j + truncation_)];
    }
    std::span<const double> lambdas() const noexcept { return lambdas_; }

    /// e_j(x) for |j| <= J.
    double basis_eval(int j, double x) const {
        check_mode(j);
        return basis_function(j, x);
    }

    /// Cached e_j(x_k), k = 0..N-1.
    std::span<const double> basis_row(int j) const {
        check_mode(j);
        return {basis_.data() + static_cast<std::size_t>(j + truncation_) * n_grid_, n_grid_};
    }
    /// Cached d_x e_j(x_k).
    std::span<const double> dbasis_row(int j) const {
        check_mode(j);
        return {dbasis_.data() + static_cast<std::size_t>(j + truncation_) * n_grid_, n_grid_};
    }

    /// Modes with lambda_j != 0, in increasing j.
    std::span<const int> active_modes() const noexcept { return active_; }

    /// Same spectrum with every lambda_j multiplied by c.
    NoiseSpectrum scaled(double c) const {
        std::vector<double> l = lambdas_;
        for (auto& v : l) v *= c;
        return NoiseSpectrum(std::move(l), n_grid_);
    }

    friend bool operator==(const NoiseSpectrum& a, const NoiseSpectrum& b) {
        return a.lambdas_ == b.lambdas_ && a.n_grid_ == b.n_grid_;
    }

private:
    void check_mode(int j) const {
        if (j < -truncation_ || j > truncation_)
            throw ArgumentError("NoiseSpectrum: mode " + std::to_string(j) + " outside [-J, J] with J=" + std::to_string(truncation_));
    }

    void build_tables() {
        basis_.resize(lambdas_.size() * n_grid_);
        dbasis_.resize(lambdas_.size() * n_grid_);
        const double dx = kTwoPi / static_cast<double>(n_grid_);
        for (int j = -truncation_; j <= truncation_; ++j) {
            const auto row = static_cast<std::size_t>(j + truncation_) * n_grid_;
            for (std::size_t k = 0; k < n_grid_; ++k) {
                const double x = static_cast<double>(k) * dx;
                basis_[row + k] = basis_function(j, x);
                dbasis_[row + k] = basis_derivative(j, x);
            }
            if (lambdas_[static_cast<std::size_t>(j + truncation_)] != 0.0) active_.push_back(j);
        }
    }

    std::vector<double> lambdas_;
    std::size_t n_grid_ = 0;
    int truncation_ = 0;
    std::vector<double> basis_;
    std::vector<double> dbasis_;
    std::vector<int> active_;
};

/// Brownian increments dW^j (one R^3 vector per mode j, index j + J) over a step of length dt.
struct NoiseIncrement {
    std::vector<Vec3> dW;
    double dt = 0.0;

    const Vec3& at(const NoiseSpectrum& s, int j) const { return dW.at(static_cast<std::size_t>(j + s.truncation())); }
};

/// Independent N(0, dt) coordinates for every (j, i); a pure function of the stream key.
inline NoiseIncrement sample_increment(const NoiseSpectrum& spectrum, double dt, const StreamKey& key) {
    if (!(dt >= 0.0) || !std::isfinite(dt)) throw ArgumentError("sample_increment: dt must be finite and >= 0");
    NoiseIncrement inc{std::vector<Vec3>(spectrum.n_modes()), dt};
    if (dt == 0.0) return inc;
    const NormalStream stream(key);
    const double s = std::sqrt(dt);
    // normal number 3m + i is coordinate i of mode index m
    const std::size_t count = 3 * spectrum.n_modes();
    std::vector<double> z(count + 1);
    for (std::uint32_t b = 0; 2 * static_cast<std::size_t>(b) < count; ++b) {
        const auto [z0, z1] = stream.normal_pair(b);
        z[2 * b] = z0;
        z[2 * b + 1] = z1;
    }
    for (std::size_t m = 0; m < spectrum.n_modes(); ++m) inc.dW[m] = {s * z[3 * m], s * z[3 * m + 1], s * z[3 * m + 2]};
    return inc;
}

/// W(x_k) = sum_j lambda_j e_j(x_k) dW^j into `out` (size N).
inline void noise_field_into(const NoiseSpectrum& spectrum, const NoiseIncrement& inc, std::span<Vec3> out) {
    if (out.size() != spectrum.n_grid()) throw ArgumentError("noise_field: output size does not match the spectrum grid");
    if (inc.dW.size() != spectrum.n_modes()) throw ArgumentError("noise_field: increment does not match the spectrum");
    std::fill(out.begin(), out.end(), Vec3{});
    for (int j : spectrum.active_modes()) {
        const Vec3 c = spectrum.lambda(j) * inc.at(spectrum, j);
        const auto row = spectrum.basis_row(j);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += row[k] * c;
    }
}

inline std::vector<Vec3> noise_field(const NoiseSpectrum& spectrum, const NoiseIncrement& inc) {
    std::vector<Vec3> out(spectrum.n_grid());
    noise_field_into(spectrum, inc, out);
    return out;
}

/// L^2 := (2/pi) sum_j j^2 lambda_j^2, the stationary dissipation level as normalized in the
/// stationary identity E||u x d2u||^2 = L^2.
inline double injection_rate(const NoiseSpectrum& spectrum) {
    double s = 0.0;
    for (int j = -spectrum.truncation(); j <= spectrum.truncation(); ++j) {
        const double l = spectrum.lambda(j);
        s += static_cast<double>(j) * j * l * l;
    }
    return 2.0 / std::numbers::pi * s;
}

/// sum_j lambda_j^2 ||d_x e_j||^2_{L^2} = sum_j j^2 lambda_j^2: the rate at which the Ito
/// correction of the noise feeds ||d_x u||^2 (per unit of nu).
inline double energy_injection_rate(const NoiseSpectrum& spectrum) {
    double s = 0.0;
    for (int j = -spectrum.truncation(); j <= spectrum.truncation(); ++j) {
        const double l = spectrum.lambda(j);
        s += static_cast<double>(j) * j * l * l;
    }
    return s;
}

/// (w, e_j)_{L^2} on the grid for a scalar sample vector.
inline double project(std::span<const double> w, std::span<const double> basis_row) {
    double s = 0.0;
    for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * basis_row[k];
    return s * kTwoPi / static_cast<double>(w.size());
}

} // namespace spinflow
