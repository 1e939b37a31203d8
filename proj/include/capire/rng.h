/*
 * Copyright (C) 2026 The capire authors
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
#ifndef CAPIRE_RNG_H
#define CAPIRE_RNG_H

#include <cmath>
#include <cstdint>
#include <numbers>

namespace capire
{

/// Draw sites inside one simulated semester.
enum class DrawPhase : std::uint32_t
{
    initial    = 1,
    enrolment  = 2,
    outcome    = 3,
    conversion = 4,
    dropout    = 5,
    search     = 6, ///< calibration sampling
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x)
{
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

constexpr std::uint64_t hash_combine(std::uint64_t h, std::uint64_t v)
{
    return mix64(h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
}

/**
 * Counter-based random stream for one agent of one replication.
 *
 * Every draw is a pure function of (seed, replication, agent, semester,
 * phase, index): there is no hidden state, so trajectories do not depend on
 * execution order or on how work is split across threads.
 */
class CounterRng
{
public:
    constexpr CounterRng(std::uint64_t seed, std::uint64_t replication, std::uint64_t agent)
        : m_key(hash_combine(hash_combine(hash_combine(0x6361706972650001ULL, seed), replication), agent))
    {
    }

    constexpr std::uint64_t bits(int semester, DrawPhase phase, std::uint64_t index) const
    {
        auto h = hash_combine(m_key, static_cast<std::uint64_t>(semester));
        h      = hash_combine(h, static_cast<std::uint64_t>(phase));
        return hash_combine(h, index);
    }

    /// Uniform on [0, 1) with 53 random bits.
    constexpr double uniform(int semester, DrawPhase phase, std::uint64_t index) const
    {
        return static_cast<double>(bits(semester, phase, index) >> 11) * 0x1.0p-53;
    }

    /// Standard normal by Box-Muller; consumes indices 2*index and 2*index+1.
    double normal(int semester, DrawPhase phase, std::uint64_t index) const
    {
        double u1 = 1.0 - uniform(semester, phase, 2 * index); // (0, 1]
        double u2 = uniform(semester, phase, 2 * index + 1);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::uint64_t m_key;
};

} // namespace capire

#endif // CAPIRE_RNG_H
