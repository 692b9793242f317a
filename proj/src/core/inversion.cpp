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

#include "core/inversion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "core/jacobian.hpp"

namespace nestlogit {

namespace {

void require_interior(const ShareTable& table)
{
    auto ok = [](double log_share) { return std::isfinite(log_share); };
    bool good = ok(table.log_outside);
    for (double v : table.log_joint) good = good && ok(v);
    for (double v : table.log_cond_product) good = good && ok(v);
    for (double v : table.log_cond_subgroup) good = good && ok(v);
    if (!good) {
        throw Error(ErrorCode::DegenerateShare, "share table has a zero or non-finite share; trim upstream");
    }
}

void require_table(const ChoiceHierarchy& hierarchy, const ShareTable& table)
{
    if (table.log_joint.size() != hierarchy.product_count()
        || table.log_cond_product.size() != hierarchy.product_count()
        || table.log_cond_subgroup.size() != hierarchy.subgroup_count()) {
        throw Error(ErrorCode::BadDimensions, "share table does not match the hierarchy");
    }
}

double max_abs_residual(std::span<const double> current, std::span<const double> target)
{
    double worst = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
        worst = std::max(worst, std::abs(current[i] - target[i]));
    }
    return worst;
}

} // namespace

ShareTable observed_share_table(const ChoiceHierarchy& hierarchy, std::span<const double> joint, double outside)
{
    require_aligned(hierarchy, joint);
    if (!(outside > 0.0) || !std::isfinite(outside)) {
        throw Error(ErrorCode::DegenerateShare, "outside share must be positive in market '"
                                                    + hierarchy.market_id() + "'");
    }
    for (std::size_t j = 0; j < joint.size(); ++j) {
        if (!(joint[j] > 0.0) || !std::isfinite(joint[j])) {
            throw Error(ErrorCode::DegenerateShare, "share of product '" + hierarchy.product_ids()[j]
                                                        + "' is not strictly positive");
        }
    }

    ShareTable t;
    t.joint.assign(joint.begin(), joint.end());
    t.outside = outside;

    std::vector<double> subgroup_total(hierarchy.subgroup_count(), 0.0);
    std::vector<double> group_total(hierarchy.group_count(), 0.0);
    for (std::size_t j = 0; j < joint.size(); ++j) {
        const auto& loc = hierarchy.location(j);
        subgroup_total[loc.subgroup] += joint[j];
        group_total[loc.group] += joint[j];
    }

    t.group = group_total;
    t.cond_subgroup.resize(hierarchy.subgroup_count());
    for (std::size_t h = 0; h < hierarchy.subgroup_count(); ++h) {
        t.cond_subgroup[h] = subgroup_total[h] / group_total[hierarchy.subgroups()[h].group];
    }
    t.cond_product.resize(joint.size());
    for (std::size_t j = 0; j < joint.size(); ++j) {
        t.cond_product[j] = joint[j] / subgroup_total[hierarchy.location(j).subgroup];
    }

    auto log_of = [](const std::vector<double>& v) {
        std::vector<double> out;
        out.reserve(v.size());
        for (double x : v) {
            out.push_back(std::log(x));
        }
        return out;
    };
    t.log_joint = log_of(t.joint);
    t.log_group = log_of(t.group);
    t.log_outside = std::log(outside);
    // log s_{j|hg} = log s_j - log sum_{k in h} s_k avoids a second rounding
    // through the ratio.
    t.log_cond_product.resize(joint.size());
    for (std::size_t j = 0; j < joint.size(); ++j) {
        t.log_cond_product[j] = t.log_joint[j] - std::log(subgroup_total[hierarchy.location(j).subgroup]);
    }
    t.log_cond_subgroup.resize(hierarchy.subgroup_count());
    for (std::size_t h = 0; h < hierarchy.subgroup_count(); ++h) {
        t.log_cond_subgroup[h] = std::log(subgroup_total[h]) - std::log(group_total[hierarchy.subgroups()[h].group]);
    }
    return t;
}

std::vector<RegressionRow> regression_rows(const ChoiceHierarchy& hierarchy, const ShareTable& table)
{
    require_table(hierarchy, table);
    require_interior(table);

    std::vector<RegressionRow> rows;
    rows.reserve(hierarchy.product_count());
    for (std::size_t j = 0; j < hierarchy.product_count(); ++j) {
        const auto& loc = hierarchy.location(j);
        rows.push_back(RegressionRow{
            j,
            table.log_joint[j] - table.log_outside,
            table.log_cond_product[j],
            table.log_cond_subgroup[loc.subgroup],
        });
    }
    return rows;
}

UtilityVector berry_invert(const ChoiceHierarchy& hierarchy, const ShareTable& table, const NestingParams& params)
{
    const auto rows = regression_rows(hierarchy, table);
    std::vector<double> delta(rows.size());
    for (const auto& row : rows) {
        delta[row.product] = row.y - params.sigma1 * row.x1 - params.sigma2 * row.x2;
    }
    return UtilityVector(std::move(delta));
}

NewtonResult numeric_invert(const ChoiceHierarchy& hierarchy, const ShareTable& target, const NestingParams& params,
                            double tol, int max_iter)
{
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::InvalidArgument, "tolerance must be positive");
    }
    require_table(hierarchy, target);
    require_interior(target);

    const std::size_t n = hierarchy.product_count();
    std::vector<double> delta(n);
    for (std::size_t j = 0; j < n; ++j) {
        delta[j] = target.log_joint[j] - target.log_outside;
    }

    auto evaluate = [&](std::span<const double> d) { return compute_shares(hierarchy, d, params).shares; };
    auto merit = [&](const ShareTable& t) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double r = t.log_joint[j] - target.log_joint[j];
            sum += r * r;
        }
        return sum;
    };

    ShareTable current = evaluate(delta);
    double residual = max_abs_residual(current.log_joint, target.log_joint);
    int iteration = 0;
    for (;;) {
        // A small residual alone is not enough: when s_0 is small the common
        // level of delta is weakly identified by log shares, so also require
        // the Newton correction itself to be below tol.
        const auto jac = log_share_jacobian(hierarchy, current, params);
        Eigen::MatrixXd g(n, n);
        Eigen::VectorXd rhs(n);
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                g(j, k) = jac[j * n + k];
            }
            rhs(j) = target.log_joint[j] - current.log_joint[j];
        }
        const Eigen::VectorXd step = g.fullPivLu().solve(rhs);
        if (!step.allFinite()) {
            throw Error(ErrorCode::NoConvergence, "Newton step is not finite");
        }
        const bool small_step = step.lpNorm<Eigen::Infinity>() <= tol;
        if (residual <= tol && small_step) {
            break;
        }
        if (iteration == max_iter) {
            if (residual <= tol) {
                break;
            }
            throw Error(ErrorCode::NoConvergence, "Newton inversion stopped after " + std::to_string(max_iter)
                                                      + " iterations with residual " + std::to_string(residual));
        }

        const double base = merit(current);
        double lambda = 1.0;
        std::vector<double> trial(n);
        bool accepted = false;
        while (lambda >= 1.0 / 1024.0) {
            for (std::size_t j = 0; j < n; ++j) {
                trial[j] = delta[j] + lambda * step(j);
            }
            auto candidate = evaluate(trial);
            if (merit(candidate) < base) {
                delta = trial;
                current = std::move(candidate);
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Rounding floor: the merit cannot decrease any further.
            if (residual <= tol) {
                break;
            }
            throw Error(ErrorCode::NoConvergence, "Newton line search stalled at residual " + std::to_string(residual));
        }
        ++iteration;
        residual = max_abs_residual(current.log_joint, target.log_joint);
    }
    return NewtonResult{UtilityVector(std::move(delta)), iteration, residual};
}

} // namespace nestlogit
