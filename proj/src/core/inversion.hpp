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

// Builds a share table from observed joint shares and the outside share.
// Conditionals are the within-node normalizations of the joint shares.
// Throws DegenerateShare for any share that is not strictly positive.
ShareTable observed_share_table(const ChoiceHierarchy& hierarchy, std::span<const double> joint,
                                double outside);

// delta_j = log(s_j / s_0) - sigma1 log s_{j|hg} - sigma2 log s_{h|g}
UtilityVector berry_invert(const ChoiceHierarchy& hierarchy, const ShareTable& table,
                           const NestingParams& params);

struct RegressionRow {
    std::size_t product = 0;
    double y = 0.0;   // log(s_j / s_0)
    double x1 = 0.0;  // log s_{j|hg}
    double x2 = 0.0;  // log s_{h|g}
};

// One row per inside product; y - sigma1 x1 - sigma2 x2 == delta_j.
std::vector<RegressionRow> regression_rows(const ChoiceHierarchy& hierarchy, const ShareTable& table);

struct NewtonResult {
    UtilityVector delta;
    int iterations = 0;
    double residual = 0.0;  // max_j |log s_j(delta) - log target_j|
};

// Damped Newton on log s(delta) = log target using the analytic Jacobian,
// started from the plain-logit inversion log(s_j / s_0). Converged when the
// largest log-share residual is <= tol, which also bounds the absolute share
// residual by tol. Throws NoConvergence after max_iter iterations.
NewtonResult numeric_invert(const ChoiceHierarchy& hierarchy, const ShareTable& target,
                            const NestingParams& params, double tol = 1e-12, int max_iter = 100);

} // namespace nestlogit
