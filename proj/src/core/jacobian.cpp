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

#include "core/jacobian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "core/logsumexp.hpp"

namespace nestlogit {

namespace {

void require_product(const ChoiceHierarchy& hierarchy, std::size_t k)
{
    if (k >= hierarchy.product_count()) {
        throw Error(ErrorCode::UnknownId, "unknown product index " + std::to_string(k));
    }
}

void require_table(const ChoiceHierarchy& hierarchy, const ShareTable& table)
{
    if (table.joint.size() != hierarchy.product_count() || table.cond_product.size() != hierarchy.product_count()
        || table.cond_subgroup.size() != hierarchy.subgroup_count()
        || table.group.size() != hierarchy.group_count()) {
        throw Error(ErrorCode::BadDimensions, "share table does not match the hierarchy");
    }
}

} // namespace

JacobianWorkspace make_workspace(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                                 const NestingParams& params)
{
    require_aligned(hierarchy, delta);

    JacobianWorkspace ws;
    ws.alpha = 1.0 / (1.0 - params.sigma1);
    ws.beta = (1.0 - params.sigma1) / (1.0 - params.sigma2);
    ws.gamma = 1.0 - params.sigma2;

    std::vector<double> terms;
    ws.log_subgroup_sums.resize(hierarchy.subgroup_count());
    for (std::size_t h = 0; h < hierarchy.subgroup_count(); ++h) {
        terms.clear();
        for (std::size_t j : hierarchy.subgroups()[h].products) {
            terms.push_back(ws.alpha * delta[j]);
        }
        ws.log_subgroup_sums[h] = log_sum_exp(terms);
    }

    ws.log_group_sums.resize(hierarchy.group_count());
    for (std::size_t g = 0; g < hierarchy.group_count(); ++g) {
        terms.clear();
        for (std::size_t h : hierarchy.groups()[g].subgroups) {
            terms.push_back(ws.beta * ws.log_subgroup_sums[h]);
        }
        ws.log_group_sums[g] = log_sum_exp(terms);
    }

    terms.clear();
    for (double log_t : ws.log_group_sums) {
        terms.push_back(ws.gamma * log_t);
    }
    terms.push_back(0.0);
    ws.log_total = log_sum_exp(terms);
    return ws;
}

ShareTable workspace_shares(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const JacobianWorkspace& ws)
{
    require_aligned(hierarchy, delta);
    ShareTable t;

    for (std::size_t g = 0; g < hierarchy.group_count(); ++g) {
        t.log_group.push_back(ws.gamma * ws.log_group_sums[g] - ws.log_total);
    }
    for (std::size_t h = 0; h < hierarchy.subgroup_count(); ++h) {
        const std::size_t g = hierarchy.subgroups()[h].group;
        t.log_cond_subgroup.push_back(ws.beta * ws.log_subgroup_sums[h] - ws.log_group_sums[g]);
    }
    for (std::size_t j = 0; j < hierarchy.product_count(); ++j) {
        const auto& loc = hierarchy.location(j);
        t.log_cond_product.push_back(ws.alpha * delta[j] - ws.log_subgroup_sums[loc.subgroup]);
        t.log_joint.push_back(t.log_cond_product[j] + t.log_cond_subgroup[loc.subgroup] + t.log_group[loc.group]);
    }
    t.log_outside = -ws.log_total;

    auto exp_of = [](const std::vector<double>& logs) {
        std::vector<double> out;
        out.reserve(logs.size());
        for (double v : logs) {
            out.push_back(std::exp(v));
        }
        return out;
    };
    t.joint = exp_of(t.log_joint);
    t.cond_product = exp_of(t.log_cond_product);
    t.cond_subgroup = exp_of(t.log_cond_subgroup);
    t.group = exp_of(t.log_group);
    t.outside = std::exp(t.log_outside);
    return t;
}

double d_cond_product(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t j, std::size_t k,
                      const NestingParams& params)
{
    require_product(hierarchy, j);
    require_product(hierarchy, k);
    const auto& lj = hierarchy.location(j);
    const auto& lk = hierarchy.location(k);
    if (lj.subgroup != lk.subgroup) {
        return 0.0;
    }
    const double alpha = 1.0 / (1.0 - params.sigma1);
    const double sj = table.cond_product[j];
    if (k == j) {
        return alpha * sj * (1.0 - sj);
    }
    return -alpha * sj * table.cond_product[k];
}

double d_cond_subgroup(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t subgroup,
                       std::size_t k, const NestingParams& params)
{
    if (subgroup >= hierarchy.subgroup_count()) {
        throw Error(ErrorCode::UnknownId, "unknown subgroup index " + std::to_string(subgroup));
    }
    require_product(hierarchy, k);
    const auto& lk = hierarchy.location(k);
    const std::size_t g = hierarchy.subgroups()[subgroup].group;
    if (lk.group != g) {
        return 0.0;
    }
    const double inv_gamma = 1.0 / (1.0 - params.sigma2);
    const double sh = table.cond_subgroup[subgroup];
    if (lk.subgroup == subgroup) {
        return inv_gamma * sh * table.cond_product[k] * (1.0 - sh);
    }
    return -inv_gamma * sh * table.cond_subgroup[lk.subgroup] * table.cond_product[k];
}

double d_group(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t group, std::size_t k)
{
    if (group >= hierarchy.group_count()) {
        throw Error(ErrorCode::UnknownId, "unknown group index " + std::to_string(group));
    }
    require_product(hierarchy, k);
    const double sg = table.group[group];
    if (hierarchy.location(k).group == group) {
        return table.joint[k] * (1.0 - sg);
    }
    return -sg * table.joint[k];
}

double d_outside(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t k)
{
    require_product(hierarchy, k);
    return -table.outside * table.joint[k];
}

ShareJacobian jacobian_from_table(const ChoiceHierarchy& hierarchy, const ShareTable& table,
                                  const NestingParams& params)
{
    require_table(hierarchy, table);
    const std::size_t n = hierarchy.product_count();

    ShareJacobian jac;
    jac.size = n;
    jac.matrix.assign(n * n, 0.0);
    jac.outside_row.assign(n, 0.0);

    for (std::size_t j = 0; j < n; ++j) {
        const auto& lj = hierarchy.location(j);
        const double s_prod = table.cond_product[j];
        const double s_sub = table.cond_subgroup[lj.subgroup];
        const double s_grp = table.group[lj.group];
        for (std::size_t k = 0; k < n; ++k) {
            jac(j, k) = d_cond_product(hierarchy, table, j, k, params) * s_sub * s_grp
                + s_prod * d_cond_subgroup(hierarchy, table, lj.subgroup, k, params) * s_grp
                + s_prod * s_sub * d_group(hierarchy, table, lj.group, k);
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        jac.outside_row[k] = d_outside(hierarchy, table, k);
    }
    return jac;
}

ShareJacobian full_jacobian(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const NestingParams& params)
{
    const auto market = compute_shares(hierarchy, delta, params);
    return jacobian_from_table(hierarchy, market.shares, params);
}

ShareJacobian fd_jacobian(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                          const NestingParams& params, double step)
{
    if (!(step > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "finite-difference step must be positive");
    }
    require_aligned(hierarchy, delta);
    const std::size_t n = hierarchy.product_count();

    ShareJacobian jac;
    jac.size = n;
    jac.matrix.assign(n * n, 0.0);
    jac.outside_row.assign(n, 0.0);

    std::vector<double> shifted(delta.begin(), delta.end());
    for (std::size_t k = 0; k < n; ++k) {
        shifted[k] = delta[k] + step;
        const auto up = compute_shares(hierarchy, shifted, params).shares;
        shifted[k] = delta[k] - step;
        const auto down = compute_shares(hierarchy, shifted, params).shares;
        shifted[k] = delta[k];

        for (std::size_t j = 0; j < n; ++j) {
            jac(j, k) = (up.joint[j] - down.joint[j]) / (2.0 * step);
        }
        jac.outside_row[k] = (up.outside - down.outside) / (2.0 * step);
    }
    return jac;
}

std::vector<double> log_share_jacobian(const ChoiceHierarchy& hierarchy, const ShareTable& table,
                                       const NestingParams& params)
{
    require_table(hierarchy, table);
    const std::size_t n = hierarchy.product_count();
    const double alpha = 1.0 / (1.0 - params.sigma1);
    const double inv_gamma = 1.0 / (1.0 - params.sigma2);

    std::vector<double> out(n * n, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const auto& lj = hierarchy.location(j);
        for (std::size_t k = 0; k < n; ++k) {
            const auto& lk = hierarchy.location(k);
            double value = -table.joint[k];  // group level, every k
            if (lk.group == lj.group) {
                const double within_group = table.cond_subgroup[lk.subgroup] * table.cond_product[k];
                value += within_group;
                if (lk.subgroup == lj.subgroup) {
                    value += inv_gamma * (table.cond_product[k] - within_group);
                    value += alpha * ((k == j ? 1.0 : 0.0) - table.cond_product[k]);
                } else {
                    value -= inv_gamma * within_group;
                }
            }
            out[j * n + k] = value;
        }
    }
    return out;
}

double max_relative_error(const ShareJacobian& a, const ShareJacobian& b, double floor)
{
    if (a.size != b.size || a.matrix.size() != b.matrix.size() || a.outside_row.size() != b.outside_row.size()) {
        throw Error(ErrorCode::BadDimensions, "jacobians differ in size");
    }
    double diff = 0.0;
    double scale = floor;
    auto visit = [&](const std::vector<double>& x, const std::vector<double>& y) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            diff = std::max(diff, std::abs(x[i] - y[i]));
            scale = std::max({scale, std::abs(x[i]), std::abs(y[i])});
        }
    };
    visit(a.matrix, b.matrix);
    visit(a.outside_row, b.outside_row);
    return diff / scale;
}

} // namespace nestlogit
