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

#include <span>
#include <vector>

#include "core/hierarchy.hpp"

namespace nestlogit {

struct InclusiveValues {
    std::vector<double> subgroup;  // I_hg, one per subgroup
    std::vector<double> group;     // I_g, one per group
    double top = 0.0;              // log(1 + sum_g exp(I_g)), outside included
};

// Joint and conditional market shares. The log_* members are the primary
// representation: they are computed directly in log space and stay finite
// when the linear shares underflow (|delta| in the hundreds).
struct ShareTable {
    std::vector<double> joint;          // s_jhg, per product
    std::vector<double> cond_product;   // s_{j|hg}, per product
    std::vector<double> cond_subgroup;  // s_{h|g}, per subgroup
    std::vector<double> group;          // s_g, per group
    double outside = 0.0;               // s_0

    std::vector<double> log_joint;
    std::vector<double> log_cond_product;
    std::vector<double> log_cond_subgroup;
    std::vector<double> log_group;
    double log_outside = 0.0;
};

struct MarketShares {
    ShareTable shares;
    InclusiveValues inclusive;
};

// I_hg = (1 - sigma1) log sum_j exp(delta_j / (1 - sigma1))
double subgroup_inclusive_value(std::span<const double> deltas, double sigma1);

// I_g = (1 - sigma2) log sum_h exp(I_hg / (1 - sigma2))
double group_inclusive_value(std::span<const double> subgroup_ivs, double sigma2);

// I = log sum_g exp(I_g), plus exp(0) for the outside option when requested.
// Throws EmptyChoiceSet for an empty list without the outside option.
double top_inclusive_value(std::span<const double> group_ivs, bool include_outside);

std::vector<double> conditional_product_shares(std::span<const double> deltas, double sigma1);
std::vector<double> conditional_subgroup_shares(std::span<const double> subgroup_ivs, double sigma2);

struct GroupShares {
    std::vector<double> inside;
    double outside = 0.0;  // zero when the outside option is excluded
};
GroupShares group_shares(std::span<const double> group_ivs, bool include_outside);

InclusiveValues compute_inclusive_values(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                                         const NestingParams& params);

// s_jhg = s_{j|hg} * s_{h|g} * s_g, with the outside option entering only the
// top level as exp(0).
MarketShares compute_shares(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const NestingParams& params);

inline MarketShares compute_shares(const ChoiceHierarchy& hierarchy, const UtilityVector& delta,
                                   const NestingParams& params)
{
    return compute_shares(hierarchy, delta.values(), params);
}

} // namespace nestlogit
