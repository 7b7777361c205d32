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

// Shared test fixtures: fields and spectra built with the standard library RNG so that test
// inputs do not depend on the generator under test.

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "spinflow/field.hpp"
#include "spinflow/noise.hpp"

namespace spinflow::testing {

inline Vec3 gaussian_vec(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    return {g(rng), g(rng), g(rng)};
}

/// Normalized low-mode trigonometric field with random R^3 coefficients.
inline SphereField smooth_field(std::size_t n, std::uint64_t seed, int modes = 3) {
    std::mt19937_64 rng(seed);
    const Vec3 c0 = gaussian_vec(rng);
    std::vector<Vec3> a, b;
    for (int m = 0; m < modes; ++m) {
        a.push_back(gaussian_vec(rng));
        b.push_back(gaussian_vec(rng));
    }
    return SphereField::sample(n, [&](double x) {
        Vec3 v = c0;
        for (int m = 1; m <= modes; ++m) v += (1.0 / m) * (std::cos(m * x) * a[m - 1] + std::sin(m * x) * b[m - 1]);
        return v;
    });
}

/// Independent uniform points on the sphere: rough, but a valid unit field.
inline SphereField rough_field(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<Vec3> v(n);
    for (auto& x : v) x = gaussian_vec(rng);
    return SphereField::normalized(std::move(v));
}

inline SphereField great_circle(std::size_t n) {
    return SphereField::sample(n, [](double x) { return Vec3{std::cos(x), std::sin(x), 0.0}; });
}

/// lambda_{+-1} = 1, everything else 0.
inline NoiseSpectrum unit_pair(std::size_t n) {
    const std::pair<int, double> p[] = {{1, 1.0}};
    return NoiseSpectrum::custom(p, n);
}

} // namespace spinflow::testing
