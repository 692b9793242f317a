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
#include <cstdint>
#include <span>
#include <vector>

#include "core/hierarchy.hpp"
#include "core/inversion.hpp"

namespace nestlogit {

struct SynthConfig {
    std::size_t n_groups = 2;
    std::size_t n_subgroups_per_group = 2;
    std::size_t n_products_per_subgroup = 2;
    std::vector<double> beta{1.0, -2.0};
    double x_low = 0.0;
    double x_high = 1.0;
    double xi_scale = 0.0;
    double sigma1 = 0.5;
    double sigma2 = 0.25;
    std::uint64_t seed = 0;
};

// Row-major product-by-covariate matrix.
struct Covariates {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double operator()(std::size_t i, std::size_t k) const { return values[i * cols + k]; }
};

struct SyntheticMarket {
    ChoiceHierarchy hierarchy;
    NestingParams params;
    UtilityVector delta;  // X beta + xi
    Covariates covariates;
    std::vector<double> xi;
};

// Balanced tree with ids g<i>, g<i>h<k>, p<n>; X ~ U[x_low, x_high],
// xi ~ N(0, xi_scale). Throws BadDimensions for empty dimensions or beta and
// OutOfDomain for invalid sigmas, ranges or scales.
SyntheticMarket generate_market(const SynthConfig& config);

struct EstimationResult {
    std::vector<double> beta_hat;
    double sigma1_hat = 0.0;
    double sigma2_hat = 0.0;
    double residual_norm = 0.0;
};

// Least squares of y on [X, x1, x2] through the normal equations, with the
// columns equilibrated and a pivoted LDL^T factorization. Throws
// SingularDesign when the smallest pivot is below 1e-10 times the largest.
EstimationResult estimate_linear(std::span<const RegressionRow> rows, const Covariates& covariates);

} // namespace nestlogit
