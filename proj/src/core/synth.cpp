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

#include "core/synth.hpp"

#include <cmath>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "core/montecarlo.hpp"

namespace nestlogit {

SyntheticMarket generate_market(const SynthConfig& config)
{
    if (config.n_groups == 0 || config.n_subgroups_per_group == 0 || config.n_products_per_subgroup == 0) {
        throw Error(ErrorCode::BadDimensions, "every tree dimension must be positive");
    }
    if (config.beta.empty()) {
        throw Error(ErrorCode::BadDimensions, "beta must have at least one coefficient");
    }
    if (!(config.x_low <= config.x_high) || !std::isfinite(config.x_low) || !std::isfinite(config.x_high)) {
        throw Error(ErrorCode::OutOfDomain, "x_range must be a finite interval with low <= high");
    }
    if (!(config.xi_scale >= 0.0) || !std::isfinite(config.xi_scale)) {
        throw Error(ErrorCode::OutOfDomain, "xi_scale must be a nonnegative number");
    }
    const auto params = validate_params(config.sigma1, config.sigma2);

    std::vector<HierarchyRow> rows;
    std::size_t product = 0;
    for (std::size_t g = 1; g <= config.n_groups; ++g) {
        const std::string gid = "g" + std::to_string(g);
        for (std::size_t h = 1; h <= config.n_subgroups_per_group; ++h) {
            const std::string hid = gid + "h" + std::to_string(h);
            for (std::size_t j = 0; j < config.n_products_per_subgroup; ++j) {
                rows.push_back(HierarchyRow{gid, hid, "p" + std::to_string(++product)});
            }
        }
    }
    auto hierarchy = ChoiceHierarchy::build("synthetic", rows);

    const std::size_t n = hierarchy.product_count();
    const std::size_t k = config.beta.size();
    RandomEngine rng(config.seed);
    std::uniform_real_distribution<double> uniform(config.x_low, config.x_high);
    std::normal_distribution<double> normal(0.0, 1.0);

    Covariates x{n, k, std::vector<double>(n * k)};
    for (auto& v : x.values) {
        v = uniform(rng);
    }
    std::vector<double> xi(n, 0.0);
    if (config.xi_scale > 0.0) {
        for (auto& v : xi) {
            v = config.xi_scale * normal(rng);
        }
    }

    std::vector<double> delta(n);
    for (std::size_t i = 0; i < n; ++i) {
        double value = xi[i];
        for (std::size_t c = 0; c < k; ++c) {
            value += x(i, c) * config.beta[c];
        }
        delta[i] = value;
    }

    return SyntheticMarket{std::move(hierarchy), params, UtilityVector(std::move(delta)), std::move(x),
                           std::move(xi)};
}

EstimationResult estimate_linear(std::span<const RegressionRow> rows, const Covariates& covariates)
{
    const std::size_t k = covariates.cols;
    const std::size_t p = k + 2;
    if (covariates.rows != rows.size() || covariates.values.size() != covariates.rows * k) {
        throw Error(ErrorCode::BadDimensions, "covariates do not match the regression rows");
    }
    if (rows.size() < p) {
        throw Error(ErrorCode::BadDimensions, "need at least " + std::to_string(p) + " rows, got "
                                                  + std::to_string(rows.size()));
    }

    const auto m = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd design(m, static_cast<Eigen::Index>(p));
    Eigen::VectorXd y(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        const std::size_t product = row.product;
        if (product >= covariates.rows) {
            throw Error(ErrorCode::BadDimensions, "regression row refers to a product without covariates");
        }
        for (std::size_t c = 0; c < k; ++c) {
            design(i, static_cast<Eigen::Index>(c)) = covariates(product, c);
        }
        design(i, static_cast<Eigen::Index>(k)) = row.x1;
        design(i, static_cast<Eigen::Index>(k + 1)) = row.x2;
        y(i) = row.y;
    }

    // Unit-norm columns; an all-zero column keeps scale 1 and shows up as a
    // zero pivot below.
    Eigen::VectorXd scale = design.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < scale.size(); ++c) {
        if (scale(c) == 0.0) {
            scale(c) = 1.0;
        }
    }
    const Eigen::MatrixXd scaled = design * scale.cwiseInverse().asDiagonal();

    const Eigen::MatrixXd normal = scaled.transpose() * scaled;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(normal);
    const Eigen::VectorXd pivots = ldlt.vectorD().cwiseAbs();
    if (ldlt.info() != Eigen::Success || pivots.minCoeff() < 1e-10 * pivots.maxCoeff()) {
        throw Error(ErrorCode::SingularDesign, "regressors are collinear (smallest/largest pivot "
                                                   + std::to_string(pivots.minCoeff() / pivots.maxCoeff()) + ")");
    }
    const Eigen::VectorXd coef = ldlt.solve(scaled.transpose() * y).cwiseQuotient(scale);

    EstimationResult out;
    out.beta_hat.assign(coef.data(), coef.data() + k);
    out.sigma1_hat = coef(static_cast<Eigen::Index>(k));
    out.sigma2_hat = coef(static_cast<Eigen::Index>(k + 1));
    out.residual_norm = (y - design * coef).norm();
    return out;
}

} // namespace nestlogit
