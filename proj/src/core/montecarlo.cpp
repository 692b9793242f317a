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

#include "core/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "core/shares.hpp"

namespace nestlogit {

RandomEngine substream_engine(std::uint64_t seed, std::uint64_t stream)
{
    std::seed_seq seq{
        static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
        static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
    };
    return RandomEngine(seq);
}

std::vector<double> sample_gumbel(RandomEngine& rng, std::size_t n)
{
    std::vector<double> out(n);
    for (auto& x : out) {
        x = standard_gumbel(rng);
    }
    return out;
}

namespace {

constexpr std::size_t kOutside = static_cast<std::size_t>(-1);

struct StageValues {
    std::vector<double> group_iv;
    std::vector<double> subgroup_iv;
};

void simulate_chunk(const ChoiceHierarchy& hierarchy, std::span<const double> delta, const NestingParams& params,
                    const StageValues& stage, double constant, RandomEngine& rng, std::uint64_t draws,
                    ChoiceCounts& counts)
{
    const double scale1 = 1.0 - params.sigma1;
    const double scale2 = 1.0 - params.sigma2;
    const double group_constant = 2.0 * constant;

    for (std::uint64_t draw = 0; draw < draws; ++draw) {
        // Group stage; the outside option has I_0 = 0 and its own shock.
        std::size_t group = kOutside;
        double best = group_constant + standard_gumbel(rng);
        for (std::size_t g = 0; g < stage.group_iv.size(); ++g) {
            const double v = stage.group_iv[g] + group_constant + standard_gumbel(rng);
            if (v > best) {
                best = v;
                group = g;
            }
        }
        if (group == kOutside) {
            ++counts.outside;
            continue;
        }

        const auto& subgroups = hierarchy.groups()[group].subgroups;
        std::size_t subgroup = subgroups.front();
        best = stage.subgroup_iv[subgroup] + constant + scale2 * standard_gumbel(rng);
        for (std::size_t i = 1; i < subgroups.size(); ++i) {
            const double v = stage.subgroup_iv[subgroups[i]] + constant + scale2 * standard_gumbel(rng);
            if (v > best) {
                best = v;
                subgroup = subgroups[i];
            }
        }

        const auto& products = hierarchy.subgroups()[subgroup].products;
        std::size_t product = products.front();
        best = delta[product] + scale1 * standard_gumbel(rng);
        for (std::size_t i = 1; i < products.size(); ++i) {
            const double v = delta[products[i]] + scale1 * standard_gumbel(rng);
            if (v > best) {
                best = v;
                product = products[i];
            }
        }
        ++counts.product[product];
    }
}

} // namespace

ChoiceCounts simulate_choices(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                              const NestingParams& params, const SimConfig& config)
{
    require_aligned(hierarchy, delta);
    if (config.draws == 0 || config.chunk_size == 0) {
        throw Error(ErrorCode::InvalidArgument, "draws and chunk_size must be positive");
    }

    const auto iv = compute_inclusive_values(hierarchy, delta, params);
    const StageValues stage{iv.group, iv.subgroup};

    const std::uint64_t chunks = (config.draws + config.chunk_size - 1) / config.chunk_size;
    unsigned workers = config.threads != 0 ? config.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

    std::vector<ChoiceCounts> partial(workers);
    std::atomic<std::uint64_t> next_chunk{0};
    auto work = [&](ChoiceCounts& local) {
        local.product.assign(hierarchy.product_count(), 0);
        for (std::uint64_t c = next_chunk++; c < chunks; c = next_chunk++) {
            const std::uint64_t begin = c * config.chunk_size;
            const std::uint64_t count = std::min(config.chunk_size, config.draws - begin);
            auto rng = substream_engine(config.seed, c);
            simulate_chunk(hierarchy, delta, params, stage, config.stage_constant, rng, count, local);
        }
    };

    if (workers == 1) {
        work(partial[0]);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work, std::ref(partial[w]));
        }
    }

    ChoiceCounts total;
    total.product.assign(hierarchy.product_count(), 0);
    for (const auto& part : partial) {
        for (std::size_t j = 0; j < total.product.size(); ++j) {
            total.product[j] += part.product[j];
        }
        total.outside += part.outside;
    }
    total.total = config.draws;
    return total;
}

EmpiricalShares empirical_shares(const ChoiceCounts& counts)
{
    if (counts.total == 0) {
        throw Error(ErrorCode::InvalidArgument, "no draws to summarize");
    }
    const double n = static_cast<double>(counts.total);
    auto se = [n](double f) { return std::sqrt(f * (1.0 - f) / n); };

    EmpiricalShares out;
    out.frequency.reserve(counts.product.size());
    out.std_error.reserve(counts.product.size());
    for (std::uint64_t c : counts.product) {
        const double f = static_cast<double>(c) / n;
        out.frequency.push_back(f);
        out.std_error.push_back(se(f));
    }
    out.outside_frequency = static_cast<double>(counts.outside) / n;
    out.outside_std_error = se(out.outside_frequency);
    return out;
}

} // namespace nestlogit
