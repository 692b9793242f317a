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

// Shared test helpers: random market generators and reference evaluators that
// do not go through the library's log-sum-exp kernel.

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "core/hierarchy.hpp"

namespace nestlogit::fixtures {

struct Instance {
    ChoiceHierarchy hierarchy;
    std::vector<double> delta;
    NestingParams params;
};

struct InstanceShape {
    int max_groups = 3;
    int max_subgroups = 3;
    int max_products = 4;
    double delta_low = -10.0;
    double delta_high = 10.0;
    double sigma_max = 0.95;
    bool ordered = false;  // force sigma2 <= sigma1
};

inline ChoiceHierarchy random_tree(std::mt19937_64& rng, const InstanceShape& shape)
{
    std::uniform_int_distribution<int> groups(1, shape.max_groups);
    std::uniform_int_distribution<int> subgroups(1, shape.max_subgroups);
    std::uniform_int_distribution<int> products(1, shape.max_products);
    std::vector<HierarchyRow> rows;
    int product = 0;
    const int ng = groups(rng);
    for (int g = 0; g < ng; ++g) {
        const int nh = subgroups(rng);
        for (int h = 0; h < nh; ++h) {
            const int nj = products(rng);
            for (int j = 0; j < nj; ++j) {
                rows.push_back({"g" + std::to_string(g), "h" + std::to_string(h), "p" + std::to_string(product++)});
            }
        }
    }
    return ChoiceHierarchy::build("random", rows);
}

inline Instance random_instance(std::mt19937_64& rng, const InstanceShape& shape = {})
{
    auto tree = random_tree(rng, shape);
    std::uniform_real_distribution<double> d(shape.delta_low, shape.delta_high);
    std::uniform_real_distribution<double> s(0.0, shape.sigma_max);
    std::vector<double> delta(tree.product_count());
    for (auto& v : delta) v = d(rng);
    double s1 = s(rng);
    double s2 = s(rng);
    if (shape.ordered && s2 > s1) std::swap(s1, s2);
    return Instance{std::move(tree), std::move(delta), validate_params(s1, s2)};
}

// Balanced tree with the given dimensions and ids g<i>/h<k>/p<n>.
inline ChoiceHierarchy balanced_tree(int groups, int subgroups, int products)
{
    std::vector<HierarchyRow> rows;
    int p = 0;
    for (int g = 0; g < groups; ++g)
        for (int h = 0; h < subgroups; ++h)
            for (int j = 0; j < products; ++j)
                rows.push_back({"g" + std::to_string(g), "h" + std::to_string(h), "p" + std::to_string(p++)});
    return ChoiceHierarchy::build("balanced", rows);
}

struct ReferenceShares {
    std::vector<long double> joint;
    long double outside = 0;
};

// Direct evaluation of the triple-nested closed form in extended precision:
//   s_j = e^{d_j/(1-s1)} / S_h * S_h^b / T_g * T_g^(1-s2) / (1 + sum_g T_g^(1-s2))
// with S_h = sum_{j in h} e^{d_j/(1-s1)}, b = (1-s1)/(1-s2), T_g = sum_h S_h^b.
// No max-shifting, so only valid for moderate |delta| / (1 - sigma1).
inline ReferenceShares reference_shares(const ChoiceHierarchy& tree, const std::vector<double>& delta,
                                        const NestingParams& p)
{
    const long double one_m_s1 = 1.0L - p.sigma1;
    const long double one_m_s2 = 1.0L - p.sigma2;
    const long double b = one_m_s1 / one_m_s2;

    std::vector<long double> S(tree.subgroup_count(), 0.0L);
    for (std::size_t j = 0; j < delta.size(); ++j) {
        S[tree.location(j).subgroup] += std::exp(static_cast<long double>(delta[j]) / one_m_s1);
    }
    std::vector<long double> T(tree.group_count(), 0.0L);
    for (std::size_t h = 0; h < S.size(); ++h) {
        T[tree.subgroups()[h].group] += std::pow(S[h], b);
    }
    long double denom = 1.0L;
    for (long double t : T) denom += std::pow(t, one_m_s2);

    ReferenceShares out;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const auto& loc = tree.location(j);
        const long double cond_product = std::exp(static_cast<long double>(delta[j]) / one_m_s1) / S[loc.subgroup];
        const long double cond_subgroup = std::pow(S[loc.subgroup], b) / T[loc.group];
        const long double group = std::pow(T[loc.group], one_m_s2) / denom;
        out.joint.push_back(cond_product * cond_subgroup * group);
    }
    out.outside = 1.0L / denom;
    return out;
}

// Plain multinomial logit with an outside option.
inline std::vector<double> plain_logit(const std::vector<double>& delta)
{
    long double denom = 1.0L;
    for (double d : delta) denom += std::exp(static_cast<long double>(d));
    std::vector<double> out;
    for (double d : delta) out.push_back(static_cast<double>(std::exp(static_cast<long double>(d)) / denom));
    return out;
}

// One-level nested logit: products partitioned into nests by `nest_of`.
inline std::vector<double> one_level_nested(const std::vector<double>& delta, const std::vector<std::size_t>& nest_of,
                                            std::size_t nests, double sigma)
{
    const long double scale = 1.0L - sigma;
    std::vector<long double> D(nests, 0.0L);
    for (std::size_t j = 0; j < delta.size(); ++j) D[nest_of[j]] += std::exp(delta[j] / scale);
    long double denom = 1.0L;
    for (long double d : D) denom += std::pow(d, scale);
    std::vector<double> out;
    for (std::size_t j = 0; j < delta.size(); ++j) {
        const long double within = std::exp(delta[j] / scale) / D[nest_of[j]];
        out.push_back(static_cast<double>(within * std::pow(D[nest_of[j]], scale) / denom));
    }
    return out;
}

} // namespace nestlogit::fixtures
