/*
   Copyright 2026 The mdlang Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "mdl/constants.hpp"

namespace mdl {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

/** Philox4x32 with 10 rounds (Salmon et al., SC'11). Stateless bijection. */
inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key)
{
    constexpr std::uint32_t kM0 = 0xD2511F53u;
    constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    constexpr std::uint32_t kW0 = 0x9E3779B9u;
    constexpr std::uint32_t kW1 = 0xBB67AE85u;
    for (int r = 0; r < 10; ++r) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kW0;
        key[1] += kW1;
    }
    return ctr;
}

/** Draw domains keep initial-condition and per-step draws disjoint. */
enum class DrawDomain : std::uint32_t {
    kStep = 0,
    kInitial = 1,
    kTest = 2,
};

/**
 * Counter-based Gaussian source. Every draw is a pure function of
 * (seed, domain, cell, step, slot), so evaluation order never matters.
 */
class NoiseStream {
public:
    explicit NoiseStream(std::uint64_t seed = 0) : seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /** Four raw words for block b of (domain, cell, step). */
    Philox4x32Counter block(DrawDomain domain, std::uint32_t cell, std::uint64_t step,
                            std::uint32_t b) const
    {
        const Philox4x32Counter ctr = {
            cell, static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
            (static_cast<std::uint32_t>(domain) << 24) | (b & 0x00FFFFFFu)};
        const Philox4x32Key key = {static_cast<std::uint32_t>(seed_),
                                   static_cast<std::uint32_t>(seed_ >> 32)};
        return philox4x32_10(ctr, key);
    }

    /** Uniform doubles strictly inside (0, 1), 52 random bits each. */
    static double to_open_unit(std::uint32_t hi, std::uint32_t lo)
    {
        const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
        return (static_cast<double>(u >> 12) + 0.5) * 0x1.0p-52;
    }

    /** Writes count unit Gaussians (slots 0..count-1) via Box-Muller pairs. */
    void gaussians(DrawDomain domain, std::uint32_t cell, std::uint64_t step, int count,
                   double* out) const
    {
        for (int s = 0, b = 0; s < count; s += 2, ++b) {
            const Philox4x32Counter w = block(domain, cell, step, static_cast<std::uint32_t>(b));
            const double u1 = to_open_unit(w[0], w[1]);
            const double u2 = to_open_unit(w[2], w[3]);
            const double r = std::sqrt(-2.0 * std::log(u1));
            const double a = 2.0 * kPi * u2;
            out[s] = r * std::cos(a);
            if (s + 1 < count)
                out[s + 1] = r * std::sin(a);
        }
    }

    /** Uniform draws in (0,1), slots 0..count-1. */
    void uniforms(DrawDomain domain, std::uint32_t cell, std::uint64_t step, int count,
                  double* out) const
    {
        for (int s = 0, b = 0; s < count; s += 2, ++b) {
            const Philox4x32Counter w = block(domain, cell, step, static_cast<std::uint32_t>(b));
            out[s] = to_open_unit(w[0], w[1]);
            if (s + 1 < count)
                out[s + 1] = to_open_unit(w[2], w[3]);
        }
    }

private:
    std::uint64_t seed_;
};

} // namespace mdl
