/*
   Copyright 2026 The nestlogit Authors

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

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "core/hierarchy.hpp"

namespace nestlogit {

using RandomEngine = std::mt19937_64;

// Engine for substream `stream` of a run seeded with `seed`. Substreams are
// seeded through std::seed_seq so neighbouring indices are decorrelated.
RandomEngine substream_engine(std::uint64_t seed, std::uint64_t stream);

// Uniform on the open interval (0, 1), from the top 53 bits of one draw.
inline double open_uniform(RandomEngine& rng)
{
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Standard Type-I extreme value draw: -log(-log(u)).
inline double standard_gumbel(RandomEngine& rng)
{
    return -std::log(-std::log(open_uniform(rng)));
}

std::vector<double> sample_gumbel(RandomEngine& rng, std::size_t n);

struct SimConfig {
    std::uint64_t draws = 1'000'000;
    std::uint64_t seed = 0;
    std::uint64_t chunk_size = 1 << 16;  // draws per RNG substream
    unsigned threads = 0;                // 0: hardware concurrency
    // Added to every alternative's value at the subgroup stage (C) and, doubled,
    // at the group stage (C'). Choices must not depend on it.
    double stage_constant = 0.0;
};

struct ChoiceCounts {
    std::vector<std::uint64_t> product;  // per inside product
    std::uint64_t outside = 0;
    std::uint64_t total = 0;
};

// Simulates the sequential process draw by draw: a group (or the outside
// option) maximizing I_g + zeta_g, then a subgroup maximizing
// I_hg + (1 - sigma2) zeta_h, then a product maximizing
// delta_j + (1 - sigma1) eps_j. Ties go to the lowest index, outside first.
//
// Chunk c uses substream_engine(seed, c); counts do not depend on the number
// of threads.
ChoiceCounts simulate_choices(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                              const NestingParams& params, const SimConfig& config);

struct EmpiricalShares {
    std::vector<double> frequency;
    std::vector<double> std_error;  // sqrt(f (1 - f) / N)
    double outside_frequency = 0.0;
    double outside_std_error = 0.0;
};

EmpiricalShares empirical_shares(const ChoiceCounts& counts);

} // namespace nestlogit
