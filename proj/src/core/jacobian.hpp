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

#include <cstddef>
#include <span>
#include <vector>

#include "core/hierarchy.hpp"
#include "core/shares.hpp"

namespace nestlogit {

// Intermediate quantities of the share derivatives, held in log form so they
// survive large utilities:
//   alpha = 1/(1-sigma1), beta = (1-sigma1)/(1-sigma2), gamma = 1-sigma2
//   S_hg = sum_{j in h} exp(alpha delta_j)
//   T_g  = sum_{h in g} S_hg^beta
//   Z    = 1 + sum_g T_g^gamma            (the 1 is the outside option)
// With these, s_{k|hg} = exp(alpha delta_k)/S_hg, s_{h|g} = S_hg^beta/T_g and
// s_g = T_g^gamma/Z. Note alpha*beta*gamma == 1.
struct JacobianWorkspace {
    double alpha = 1.0;
    double beta = 1.0;
    double gamma = 1.0;
    std::vector<double> log_subgroup_sums;  // log S_hg
    std::vector<double> log_group_sums;     // log T_g
    double log_total = 0.0;                 // log Z
};

JacobianWorkspace make_workspace(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                                 const NestingParams& params);

// Shares rebuilt from the power-sum representation above. Independent of
// compute_shares; used to cross-check it.
ShareTable workspace_shares(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const JacobianWorkspace& ws);

// Dense d s / d delta over inside products (row-major, entry (j,k) is
// d s_j / d delta_k) plus the outside-option row d s_0 / d delta_k.
struct ShareJacobian {
    std::size_t size = 0;
    std::vector<double> matrix;
    std::vector<double> outside_row;

    double operator()(std::size_t j, std::size_t k) const { return matrix[j * size + k]; }
    double& operator()(std::size_t j, std::size_t k) { return matrix[j * size + k]; }
};

// d s_{j|hg} / d delta_k.
double d_cond_product(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t j, std::size_t k,
                      const NestingParams& params);

// d s_{h|g} / d delta_k for subgroup `subgroup` (flat index).
double d_cond_subgroup(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t subgroup,
                       std::size_t k, const NestingParams& params);

// d s_g / d delta_k. Independent of sigma: the scale factors multiply to one.
double d_group(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t group, std::size_t k);

// d s_0 / d delta_k = -s_0 s_k: the outside option treated as a group with
// inclusive value zero.
double d_outside(const ChoiceHierarchy& hierarchy, const ShareTable& table, std::size_t k);

// Product rule over the three levels, from cached shares.
ShareJacobian jacobian_from_table(const ChoiceHierarchy& hierarchy, const ShareTable& table,
                                  const NestingParams& params);

ShareJacobian full_jacobian(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                            const NestingParams& params);

// Central differences (s(delta + h e_k) - s(delta - h e_k)) / 2h.
ShareJacobian fd_jacobian(const ChoiceHierarchy& hierarchy, std::span<const double> delta,
                          const NestingParams& params, double step = 1e-6);

// d log s_j / d delta_k (row-major n x n). Same case tables divided through
// by the share being differentiated, so it stays well defined when s_j
// underflows.
std::vector<double> log_share_jacobian(const ChoiceHierarchy& hierarchy, const ShareTable& table,
                                       const NestingParams& params);

// max |a - b| over the matrix and outside row, divided by the largest entry
// magnitude of either Jacobian (at least `floor`). Central differences only
// resolve entries to about eps/step in absolute terms, so entries many orders
// below the largest one are compared on that common scale.
double max_relative_error(const ShareJacobian& a, const ShareJacobian& b, double floor = 1e-12);

} // namespace nestlogit
