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
#include <string>

#include "spinflow/bcf.hpp"
#include "support.hpp"

using namespace spinflow;
using spinflow::testing::great_circle;
using spinflow::testing::smooth_field;

namespace {

double max_error_vs_exact_circle(std::size_t n) {
    const auto v = bcf_transform(great_circle(n));
    double worst = 0;
    for (std::size_t k = 0; k <= n; ++k) {
        const double x = k * v.grid_spacing;
        worst = std::max(worst, norm(v.points[k] - Vec3{std::sin(x), 1 - std::cos(x), 0.0}));
    }
    return worst;
}

Vec3 rotate_fixed(const Vec3& a) {
    // rotation by 0.7 rad about (1, 2, 2) / 3
    const Vec3 k{1.0 / 3, 2.0 / 3, 2.0 / 3};
    const double c = std::cos(0.7), s = std::sin(0.7);
    return c * a + s * cross(k, a) + ((1 - c) * dot(k, a)) * k;
}

} // namespace

TEST(Bcf, GreatCircleClosedForm) {
    const double e64 = max_error_vs_exact_circle(64), e128 = max_error_vs_exact_circle(128);
    EXPECT_LT(e64, 1e-2);
    EXPECT_NEAR(e64 / e128, 4.0, 0.1);
}

TEST(Bcf, ConstantFieldIsAStraightLine) {
    const Vec3 d{0.6, 0.0, -0.8};
    const auto u = SphereField::constant(16, d);
    const auto v = bcf_transform(u);
    ASSERT_EQ(v.points.size(), 17u);
    EXPECT_EQ(v.points[0], Vec3{});
    for (std::size_t k = 0; k <= 16; ++k) EXPECT_LT(norm(v.points[k] - (k * v.grid_spacing) * d), 1e-14);
    const auto r = bcf_checks(u, v);
    EXPECT_LT(r.tangent_deviation, 1e-14);
    EXPECT_LT(r.energy_residual, 1e-20);
    EXPECT_LT(r.h2_residual, 1e-20);
    EXPECT_LT(r.endpoint_residual, 1e-15);
}

TEST(Bcf, EndpointIsTwoPiTimesAverage) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto u = seed % 2 ? smooth_field(64, seed) : spinflow::testing::rough_field(48, seed);
        EXPECT_LT(bcf_checks(u, bcf_transform(u)).endpoint_residual, 1e-14) << seed;
    }
}

TEST(Bcf, ResidualsConvergeAtSecondOrder) {
    for (std::uint64_t seed : {3u, 4u}) {
        BcfReport prev;
        for (std::size_t n : {128u, 256u, 512u}) {
            const auto u = smooth_field(n, seed);
            const auto r = bcf_checks(u, bcf_transform(u));
            const double scale = dirichlet_energy(u);
            EXPECT_LT(r.tangent_deviation, 0.05) << n;
            EXPECT_LT(r.energy_residual, 0.05 * scale) << n;
            if (n > 128) {
                EXPECT_NEAR(prev.tangent_deviation / r.tangent_deviation, 4.0, 0.4) << n;
                EXPECT_NEAR(prev.energy_residual / r.energy_residual, 4.0, 0.6) << n;
                EXPECT_NEAR(prev.h2_residual / r.h2_residual, 4.0, 0.6) << n;
            }
            prev = r;
        }
    }
}

TEST(Bcf, RotationEquivariant) {
    const auto u = smooth_field(64, 9);
    std::vector<Vec3> ru(u.values().begin(), u.values().end());
    for (auto& p : ru) p = rotate_fixed(p);
    const auto v = bcf_transform(u);
    const auto rv = bcf_transform(SphereField(trusted, ru));
    for (std::size_t k = 0; k < v.points.size(); ++k) EXPECT_LT(norm(rv.points[k] - rotate_fixed(v.points[k])), 1e-13);
}

TEST(Bcf, ChecksRejectMismatchedCurve) {
    const auto v = bcf_transform(great_circle(16));
    EXPECT_THROW(bcf_checks(great_circle(32), v), ArgumentError);
}

TEST(BcfIo, CsvRoundTripIsExact) {
    const auto v = bcf_transform(smooth_field(32, 2));
    const auto back = curve_from_csv(curve_to_csv(v));
    EXPECT_EQ(back.points, v.points);
    EXPECT_EQ(back.grid_spacing, v.grid_spacing);
}

TEST(BcfIo, CorruptInputRaises) {
    const auto text = curve_to_csv(bcf_transform(great_circle(8)));
    EXPECT_THROW(curve_from_csv(""), FormatError);
    EXPECT_THROW(curve_from_csv("spinflow-curve v2, points=9\n"), FormatError);
    EXPECT_THROW(curve_from_csv(text.substr(0, text.rfind('\n', text.size() - 2) + 1)), FormatError);
    std::string bad = text;
    bad.replace(bad.find(",", bad.find('\n') + 1), 1, ";");
    EXPECT_THROW(curve_from_csv(bad), FormatError);
}
