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

// Philox4x32-10 counter-based generator (Salmon et al., SC'11) and the stream-key layout used
// for noise increments. A draw is a pure function of (seed, trajectory, step, index), so
// ensembles are reproducible regardless of thread scheduling.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace spinflow {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static constexpr Counter generate(Counter ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    static constexpr Counter single_round(const Counter& c, const Key& k) noexcept {
        const std::uint64_t p0 = std::uint64_t{kMul0} * c[0];
        const std::uint64_t p1 = std::uint64_t{kMul1} * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

/// Identifies one noise increment: seed, trajectory id and time-step index.
struct StreamKey {
    std::uint64_t seed = 0;
    std::uint32_t trajectory = 0;
    std::uint64_t step = 0;
};

/// Gaussian draws addressed by an index inside a stream; two normals per Philox block.
class NormalStream {
public:
    explicit constexpr NormalStream(const StreamKey& key) noexcept : key_(key) {}

    /// Standard normal number `index` of this stream.
    double normal(std::uint32_t index) const noexcept {
        const auto pair = normal_pair(index / 2);
        return index % 2 == 0 ? pair.first : pair.second;
    }

    /// Box-Muller on the block `block`.
    std::pair<double, double> normal_pair(std::uint32_t block) const noexcept {
        const auto out = Philox4x32::generate(
            {block, static_cast<std::uint32_t>(key_.step), static_cast<std::uint32_t>(key_.step >> 32), key_.trajectory},
            {static_cast<std::uint32_t>(key_.seed), static_cast<std::uint32_t>(key_.seed >> 32)});
        const std::uint64_t w0 = (std::uint64_t{out[0]} << 32) | out[1];
        const std::uint64_t w1 = (std::uint64_t{out[2]} << 32) | out[3];
        // u0 in (0, 1], u1 in [0, 1)
        const double u0 = (static_cast<double>(w0 >> 11) + 1.0) * 0x1.0p-53;
        const double u1 = static_cast<double>(w1 >> 11) * 0x1.0p-53;
        const double r = std::sqrt(-2.0 * std::log(u0));
        const double phi = 2.0 * std::numbers::pi * u1;
        return {r * std::cos(phi), r * std::sin(phi)};
    }

private:
    StreamKey key_;
};

} // namespace spinflow
