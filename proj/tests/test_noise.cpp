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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "spinflow/noise.hpp"
#include "spinflow/philox.hpp"
#include "support.hpp"

using namespace spinflow;

// Known-answer vectors of the Random123 Philox4x32-10 reference.
TEST(Philox, KnownAnswers) {
    using C = Philox4x32::Counter;
    EXPECT_EQ(Philox4x32::generate({0, 0, 0, 0}, {0, 0}), (C{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(Philox4x32::generate({~0u, ~0u, ~0u, ~0u}, {~0u, ~0u}), (C{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(Philox4x32::generate({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (C{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(NormalStream, IsAPureFunctionOfTheKey) {
    const NormalStream a({7, 3, 11}), b({7, 3, 11}), c({7, 3, 12}), d({7, 4, 11}), e({8, 3, 11});
    for (std::uint32_t i = 0; i < 16; ++i) {
        EXPECT_EQ(a.normal(i), b.normal(i));
        EXPECT_NE(a.normal(i), c.normal(i));
        EXPECT_NE(a.normal(i), d.normal(i));
        EXPECT_NE(a.normal(i), e.normal(i));
    }
}

TEST(NormalStream, StandardNormalMoments) {
    const std::size_t n = 400000;
    double s = 0, s2 = 0, s4 = 0, inside = 0;
    for (std::uint64_t step = 0; step < n / 2; ++step) {
        const auto [x, y] = NormalStream({1, 0, step}).normal_pair(0);
        for (double z : {x, y}) {
            s += z;
            s2 += z * z;
            s4 += z * z * z * z;
            inside += std::abs(z) < 1.0;
        }
    }
    EXPECT_NEAR(s / n, 0.0, 4 / std::sqrt(double(n)));
    EXPECT_NEAR(s2 / n, 1.0, 4 * std::sqrt(2.0 / n));
    EXPECT_NEAR(s4 / n, 3.0, 4 * std::sqrt(96.0 / n));
    EXPECT_NEAR(inside / n, 0.682689492, 4 * std::sqrt(0.2171 / n));
}

TEST(Basis, ClosedFormValues) {
    EXPECT_NEAR(basis_function(0, 1.234), 0.3989422804014327, 1e-15);
    EXPECT_NEAR(basis_function(1, std::numbers::pi / 2), 0.5641895835477563, 1e-15);
    EXPECT_NEAR(basis_function(-2, 0.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
    const auto s = NoiseSpectrum::power_law(3, 1.0, 0.0, 16);
    EXPECT_THROW(s.basis_eval(4, 0.0), ArgumentError);
    EXPECT_THROW(s.basis_eval(-4, 0.0), ArgumentError);
    EXPECT_THROW(s.lambda(5), ArgumentError);
}

TEST(Basis, DerivativeMatchesFiniteDifference) {
    for (int j = -4; j <= 4; ++j)
        for (double x : {0.1, 1.3, 4.0}) {
            const double h = 1e-6;
            EXPECT_NEAR(basis_derivative(j, x), (basis_function(j, x + h) - basis_function(j, x - h)) / (2 * h), 1e-8);
        }
}

TEST(Basis, GridGramMatrixIsIdentity) {
    const std::size_t n = 64;
    const auto s = NoiseSpectrum::power_law(31, 1.0, 1.0, n);
    for (int i = -31; i <= 31; ++i)
        for (int j = -31; j <= 31; ++j) {
            const double g = project(s.basis_row(i), s.basis_row(j));
            EXPECT_NEAR(g, i == j ? 1.0 : 0.0, 1e-12) << i << "," << j;
        }
}

TEST(NoiseSpectrum, Validation) {
    EXPECT_THROW(NoiseSpectrum({1.0, 1.0}, 16), ArgumentError);             // even count
    EXPECT_THROW(NoiseSpectrum({1.0, 0.0, 2.0}, 16), ArgumentError);        // asymmetric
    EXPECT_THROW(NoiseSpectrum({-1.0, 0.0, -1.0}, 16), ArgumentError);      // negative
    EXPECT_THROW(NoiseSpectrum({1.0, 0.5, 0.0, 0.5, 1.0}, 16), ArgumentError);  // increasing in j >= 1
    EXPECT_THROW(NoiseSpectrum::power_law(8, 1.0, 0.0, 16), ArgumentError);  // J >= N/2
    EXPECT_THROW(NoiseSpectrum({1.0, 0.0, 1.0}, 7), ArgumentError);
    EXPECT_NO_THROW(NoiseSpectrum::power_law(7, 1.0, 0.0, 16));
    // lambda_0 may exceed lambda_1 or vanish below it
    EXPECT_NO_THROW(NoiseSpectrum({0.5, 0.0, 0.5}, 16));
    EXPECT_NO_THROW(NoiseSpectrum({0.5, 3.0, 0.5}, 16));
}

TEST(NoiseSpectrum, CustomMirrorsAndDefaults) {
    const std::pair<int, double> p[] = {{1, 1.0}, {2, 0.5}, {-3, 0.25}, {3, 0.25}};
    const auto s = NoiseSpectrum::custom(p, 32);
    EXPECT_EQ(s.truncation(), 3);
    EXPECT_EQ(s.lambda(-1), 1.0);
    EXPECT_EQ(s.lambda(-2), 0.5);
    EXPECT_EQ(s.lambda(0), 0.0);
    EXPECT_THROW(NoiseSpectrum::custom(std::vector<std::pair<int, double>>{{1, 0.5}, {2, 1.0}}, 32), ArgumentError);
    // a gap followed by a larger coefficient breaks monotonicity
    EXPECT_THROW(NoiseSpectrum::custom(std::vector<std::pair<int, double>>{{1, 1.0}, {3, 0.25}}, 32), ArgumentError);
    EXPECT_THROW(NoiseSpectrum::custom(std::vector<std::pair<int, double>>{{1, 1.0}, {-1, 0.5}}, 32), ArgumentError);
    const std::vector<int> active(s.active_modes().begin(), s.active_modes().end());
    EXPECT_EQ(active, (std::vector<int>{-3, -2, -1, 1, 2, 3}));

    const auto d = NoiseSpectrum::default_for(256);
    EXPECT_EQ(d.truncation(), 32);
    EXPECT_EQ(d.lambda(0), 0.0);
    EXPECT_DOUBLE_EQ(d.lambda(4), 1.0 / 16.0);
    EXPECT_EQ(NoiseSpectrum::default_for(64).truncation(), 16);
}

TEST(SampleIncrement, ZeroAndNegativeDt) {
    const auto s = spinflow::testing::unit_pair(16);
    const auto inc = sample_increment(s, 0.0, {1, 0, 0});
    for (const auto& v : inc.dW) EXPECT_EQ(v, Vec3{});
    EXPECT_THROW(sample_increment(s, -1e-3, {1, 0, 0}), ArgumentError);
}

TEST(SampleIncrement, DeterministicAndKeyed) {
    const auto s = NoiseSpectrum::power_law(4, 1.0, 1.0, 16);
    const auto a = sample_increment(s, 0.01, {5, 2, 9});
    const auto b = sample_increment(s, 0.01, {5, 2, 9});
    const auto c = sample_increment(s, 0.01, {5, 2, 10});
    EXPECT_EQ(a.dW, b.dW);
    EXPECT_NE(a.dW, c.dW);
    // coordinate i of mode m is normal number 3m + i of the stream
    const NormalStream ns({5, 2, 9});
    EXPECT_DOUBLE_EQ(a.at(s, -4).x, std::sqrt(0.01) * ns.normal(0));
    EXPECT_DOUBLE_EQ(a.at(s, 1).z, std::sqrt(0.01) * ns.normal(3 * 5 + 2));
}

TEST(SampleIncrement, MeanAndVarianceOfOneCoordinate) {
    const auto s = spinflow::testing::unit_pair(16);
    const double dt = 0.01;
    const std::size_t n = 1000000;
    double sum = 0, sum2 = 0, cross = 0;
    for (std::uint64_t step = 0; step < n; ++step) {
        const auto inc = sample_increment(s, dt, {3, 0, step});
        const double w = inc.at(s, 1).x;
        sum += w;
        sum2 += w * w;
        cross += w * inc.at(s, -1).y;
    }
    EXPECT_NEAR(sum / n, 0.0, 4 * std::sqrt(dt / n));
    const double var = sum2 / n - (sum / n) * (sum / n);
    EXPECT_NEAR(var, dt, 0.01 * dt);
    EXPECT_NEAR(cross / n, 0.0, 4 * dt / std::sqrt(double(n)));
}

TEST(NoiseField, ZeroSpectrumGivesZeroField) {
    const auto s = NoiseSpectrum({0.0, 0.0, 0.0}, 16);
    for (const auto& v : noise_field(s, sample_increment(s, 0.1, {1, 0, 0}))) EXPECT_EQ(v, Vec3{});
}

TEST(NoiseField, SingleModeIsSineTimesIncrement) {
    const std::pair<int, double> p[] = {{1, 1.0}};
    const auto s = NoiseSpectrum::custom(p, 32);
    NoiseIncrement inc{std::vector<Vec3>(3), 0.1};
    inc.dW[2] = {0.3, -0.2, 0.5};  // j = 1 only
    const auto w = noise_field(s, inc);
    for (std::size_t k = 0; k < 32; ++k) {
        const double e = std::sin(k * kTwoPi / 32) / std::sqrt(std::numbers::pi);
        EXPECT_NEAR(w[k].x, 0.3 * e, 1e-15);
        EXPECT_NEAR(w[k].y, -0.2 * e, 1e-15);
        EXPECT_NEAR(w[k].z, 0.5 * e, 1e-15);
    }
}

TEST(NoiseField, ItoIsometry) {
    const auto s = NoiseSpectrum::power_law(4, 1.0, 0.5, 32);
    const double dt = 0.02;
    double expected = 0;
    for (double l : s.lambdas()) expected += 3 * l * l * dt;
    double acc = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) acc += l2_sq(noise_field(s, sample_increment(s, dt, {17, 0, std::uint64_t(i)})));
    EXPECT_NEAR(acc / n / expected, 1.0, 0.03);
}

TEST(InjectionRate, UnitPairAndScaling) {
    const auto s = spinflow::testing::unit_pair(32);
    EXPECT_NEAR(injection_rate(s), 4.0 / std::numbers::pi, 1e-15);
    EXPECT_EQ(energy_injection_rate(s), 2.0);
    const auto p = NoiseSpectrum::power_law(5, 1.5, 0.3, 32);
    for (double c : {2.0, 0.5, 3.0, 0.1}) {
        EXPECT_NEAR(injection_rate(p.scaled(c)), c * c * injection_rate(p), 1e-15 * c * c * injection_rate(p));
    }
    EXPECT_EQ(injection_rate(p.scaled(2.0)), 4.0 * injection_rate(p));
    EXPECT_EQ(injection_rate(NoiseSpectrum({0.0, 7.0, 0.0}, 16)), 0.0);  // j = 0 carries no gradient
}

TEST(InjectionRate, EnergyRateIsTheGradientNormOfTheNoise) {
    // sum_j lambda_j^2 ||d_x e_j||^2 by quadrature of the cached derivative tables
    const auto s = NoiseSpectrum::power_law(6, 1.0, 0.0, 64);
    double q = 0;
    for (int j = -6; j <= 6; ++j) {
        const auto d = s.dbasis_row(j);
        double n2 = 0;
        for (double v : d) n2 += v * v;
        q += s.lambda(j) * s.lambda(j) * n2 * kTwoPi / 64;
    }
    EXPECT_NEAR(energy_injection_rate(s), q, 1e-12);
    EXPECT_NEAR(injection_rate(s), 2.0 / std::numbers::pi * q, 1e-12);
}
