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

#include "core/shares.hpp"

#include <cmath>

#include "core/logsumexp.hpp"

namespace nestlogit {

namespace {

std::vector<double> exp_all(std::span<const double> logs)
{
    std::vector<double> out(logs.size());
    for (std::size_t i = 0; i < logs.size(); ++i) {
        out[i] = std::exp(logs[i]);
    }
    return out;
}

} // namespace

double subgroup_inclusive_value(std::span<const double> deltas, double sigma1)
{
    if (deltas.empty()) {
        throw Error(ErrorCode::EmptyChoiceSet, "subgroup without products");
    }
    const double scale = 1.0 - sigma1;
    return scale * log_sum_exp(deltas, scale);
}

double group_inclusive_value(std::span<const double> subgroup_ivs, double sigma2)
{
    if (subgroup_ivs.empty()) {
        throw Error(ErrorCode::EmptyChoiceSet, "group without subgroups");
    }
    const double scale = 1.0 - sigma2;
    return scale * log_sum_exp(subgroup_ivs, scale);
}

double top_inclusive_value(std::span<const double> group_ivs, bool include_outside)
{
    if (!include_outside) {
        if (group_ivs.empty()) {
            throw Error(ErrorCode::EmptyChoiceSet, "no groups and no outside option");
        }
        return log_sum_exp(group_ivs);
    }
    std::vector<double> terms(group_ivs.begin(), group_ivs.end());
    terms.push_back(0.0);
    return log_sum_exp(terms);
}

std::vector<double> conditional_product_shares(std::span<const double> deltas, double sigma1)
{
    if (deltas.empty()) {
        throw Error(ErrorCode::EmptyChoiceSet, "subgroup without products");
    }
    return exp_all(log_softmax(deltas, 1.0 - sigma1));
}

std::vector<double> conditional_subgroup_shares(std::span<const double> subgroup_ivs, double sigma2)
{
    if (subgroup_ivs.empty()) {
        throw Error(ErrorCode::EmptyChoiceSet, "group without subgroups");
    }
    return exp_all(log_softmax(subgroup_ivs, 1.0 - sigma2));
}

GroupShares group_shares(std::span<const double> group_ivs, bool include_outside)
{
    const double top = top_inclusive_value(group_ivs, include_outside);
    GroupShares out;
    out.inside.reserve(group_ivs.size());
    for (double iv : group_ivs) {
        out.inside.push_back(std::exp(iv - top));
    }
    out.outside = include_outside ? std::exp(-top) : 0.0;
    return out;
}

InclusiveValues compute_inclusive_values(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                                         const NestingParams& params)
{
    require_aligned(hierarchy, delta);

    InclusiveValues iv;
    iv.subgroup.resize(hierarchy.subgroup_count());
    std::vector<double> buffer;
    for (std::size_t h = 0; h < hierarchy.subgroup_count(); ++h) {
        buffer.clear();
        for (std::size_t j : hierarchy.subgroups()[h].products) {
            buffer.push_back(delta[j]);
        }
        iv.subgroup[h] = subgroup_inclusive_value(buffer, params.sigma1);
    }

    iv.group.resize(hierarchy.group_count());
    for (std::size_t g = 0; g < hierarchy.group_count(); ++g) {
        buffer.clear();
        for (std::size_t h : hierarchy.groups()[g].subgroups) {
            buffer.push_back(iv.subgroup[h]);
        }
        iv.group[g] = group_inclusive_value(buffer, params.sigma2);
    }

    iv.top = top_inclusive_value(iv.group, true);
    return iv;
}

MarketShares compute_shares(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const NestingParams& params)
{
    MarketShares out;
    out.inclusive = compute_inclusive_values(hierarchy, delta, params);
    const InclusiveValues& iv = out.inclusive;
    ShareTable& t = out.shares;

    const double scale1 = 1.0 - params.sigma1;
    const double scale2 = 1.0 - params.sigma2;

    t.log_group.resize(hierarchy.group_count());
    for (std::size_t g = 0; g < hierarchy.group_count(); ++g) {
        t.log_group[g] = iv.group[g] - iv.top;
    }
    t.log_outside = -iv.top;

    std::vector<double> buffer;
    t.log_cond_subgroup.resize(hierarchy.subgroup_count());
    for (const auto& group : hierarchy.groups()) {
        buffer.clear();
        for (std::size_t h : group.subgroups) {
            buffer.push_back(iv.subgroup[h]);
        }
        const auto logs = log_softmax(buffer, scale2);
        for (std::size_t i = 0; i < group.subgroups.size(); ++i) {
            t.log_cond_subgroup[group.subgroups[i]] = logs[i];
        }
    }

    const std::size_t n = hierarchy.product_count();
    t.log_cond_product.resize(n);
    for (const auto& subgroup : hierarchy.subgroups()) {
        buffer.clear();
        for (std::size_t j : subgroup.products) {
            buffer.push_back(delta[j]);
        }
        const auto logs = log_softmax(buffer, scale1);
        for (std::size_t i = 0; i < subgroup.products.size(); ++i) {
            t.log_cond_product[subgroup.products[i]] = logs[i];
        }
    }

    t.log_joint.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& loc = hierarchy.location(j);
        t.log_joint[j] = t.log_cond_product[j] + t.log_cond_subgroup[loc.subgroup] + t.log_group[loc.group];
    }

    t.joint = exp_all(t.log_joint);
    t.cond_product = exp_all(t.log_cond_product);
    t.cond_subgroup = exp_all(t.log_cond_subgroup);
    t.group = exp_all(t.log_group);
    t.outside = std::exp(t.log_outside);
    return out;
}

} // namespace nestlogit
