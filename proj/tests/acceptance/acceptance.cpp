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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "core/inversion.hpp"
#include "core/jacobian.hpp"
#include "core/montecarlo.hpp"
#include "core/shares.hpp"
#include "core/synth.hpp"
#include "support/test_support.hpp"

using namespace nestlogit;
using Clock = std::chrono::steady_clock;

namespace {

// Tolerances and limits.
constexpr int kInstances = 1000;
constexpr double kNormTol = 1e-12;
constexpr double kNormSeconds = 1.0;
constexpr double kRoundTripTol = 1e-10;
constexpr int kCollapseInstances = 100;
constexpr double kCollapseTol = 1e-12;
constexpr int kJacobianInstances = 100;
constexpr double kJacobianDeltaBound = 5.0;
constexpr double kFdStep = 1e-6;
constexpr double kFdTol = 1e-6;
constexpr double kColumnSumTol = 1e-12;
constexpr double kSymmetryTol = 1e-10;
constexpr double kJacobianSeconds = 5.0;
constexpr int kGradientInstances = 100;
constexpr double kGradientTol = 1e-8;
constexpr int kMonteCarloInstances = 10;
constexpr double kMonteCarloSigmas = 4.0;
constexpr double kRateMinVariance = 1e-3;
constexpr double kSlopeTarget = -0.5;
constexpr double kSlopeTol = 0.15;
constexpr double kMonteCarloSeconds = 30.0;
constexpr double kEstimateTol = 1e-8;
constexpr double kResidualTol = 1e-10;
constexpr int kNewtonInstances = 50;
constexpr double kNewtonTol = 1e-10;
constexpr int kNewtonMaxIter = 50;
constexpr double kNewtonAgreeTol = 1e-8;
constexpr double kOverflowTol = 1e-8;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args)
{
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

std::vector<fixtures::Instance> instances(std::uint64_t seed, int count, const fixtures::InstanceShape& shape = {})
{
    std::mt19937_64 rng(seed);
    std::vector<fixtures::Instance> out;
    out.reserve(count);
    for (int i = 0; i < count; ++i) out.push_back(fixtures::random_instance(rng, shape));
    return out;
}

Outcome normalization(const std::vector<fixtures::Instance>& family)
{
    const auto start = Clock::now();
    double worst = 0.0;
    for (const auto& in : family) {
        const auto table = compute_shares(in.hierarchy, in.delta, in.params).shares;
        double total = table.outside;
        for (double s : table.joint) total += s;
        worst = std::max(worst, std::abs(total - 1.0));
    }
    const double elapsed = seconds_since(start);
    return {worst <= kNormTol && elapsed < kNormSeconds,
            fmt("max |sum - 1| = %.2e (tol %.0e), %.3f s (limit %.0f s)", worst, kNormTol, elapsed, kNormSeconds)};
}

Outcome berry_round_trip(const std::vector<fixtures::Instance>& family)
{
    double worst = 0.0;
    double identity = 0.0;
    for (const auto& in : family) {
        const auto table = compute_shares(in.hierarchy, in.delta, in.params).shares;
        const auto back = berry_invert(in.hierarchy, table, in.params);
        for (std::size_t j = 0; j < in.delta.size(); ++j) worst = std::max(worst, std::abs(back[j] - in.delta[j]));
        for (const auto& row : regression_rows(in.hierarchy, table)) {
            const double implied = row.y - in.params.sigma1 * row.x1 - in.params.sigma2 * row.x2;
            identity = std::max(identity, std::abs(implied - back[row.product]));
        }
    }
    return {worst <= kRoundTripTol && identity == 0.0,
            fmt("max |delta' - delta| = %.2e (tol %.0e), regression identity gap %.1e", worst, kRoundTripTol,
                identity)};
}

Outcome collapses()
{
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> sigma(0.0, 0.95);
    fixtures::InstanceShape shape;
    double plain = 0.0, by_group = 0.0, by_subgroup = 0.0;

    const auto compare = [](const ShareTable& table, const std::vector<double>& oracle) {
        double worst = 0.0;
        double outside = 1.0;
        for (std::size_t j = 0; j < oracle.size(); ++j) {
            worst = std::max(worst, std::abs(table.joint[j] - oracle[j]));
            outside -= oracle[j];
        }
        return std::max(worst, std::abs(table.outside - outside));
    };

    for (int i = 0; i < kCollapseInstances; ++i) {
        const auto in = fixtures::random_instance(rng, shape);
        const auto& tree = in.hierarchy;
        const auto t0 = compute_shares(tree, in.delta, validate_params(0.0, 0.0)).shares;
        plain = std::max(plain, compare(t0, fixtures::plain_logit(in.delta)));
    }
    for (int i = 0; i < kCollapseInstances; ++i) {
        const auto in = fixtures::random_instance(rng, shape);
        const auto& tree = in.hierarchy;
        const double s = sigma(rng);
        std::vector<std::size_t> nest(in.delta.size());
        for (std::size_t j = 0; j < nest.size(); ++j) nest[j] = tree.location(j).group;
        const auto t = compute_shares(tree, in.delta, validate_params(s, s)).shares;
        by_group = std::max(by_group, compare(t, fixtures::one_level_nested(in.delta, nest, tree.group_count(), s)));
    }
    for (int i = 0; i < kCollapseInstances; ++i) {
        const auto in = fixtures::random_instance(rng, shape);
        const auto& tree = in.hierarchy;
        const double s = sigma(rng);
        std::vector<std::size_t> nest(in.delta.size());
        for (std::size_t j = 0; j < nest.size(); ++j) nest[j] = tree.location(j).subgroup;
        const auto t = compute_shares(tree, in.delta, validate_params(s, 0.0)).shares;
        by_subgroup =
            std::max(by_subgroup, compare(t, fixtures::one_level_nested(in.delta, nest, tree.subgroup_count(), s)));
    }
    const double worst = std::max({plain, by_group, by_subgroup});
    return {worst <= kCollapseTol, fmt("plain %.2e, nests=groups %.2e, nests=subgroups %.2e (tol %.0e)", plain,
                                       by_group, by_subgroup, kCollapseTol)};
}

Outcome jacobian_vs_fd()
{
    fixtures::InstanceShape shape;
    shape.delta_low = -kJacobianDeltaBound;
    shape.delta_high = kJacobianDeltaBound;
    const auto family = instances(404, kJacobianInstances, shape);

    const auto start = Clock::now();
    double rel = 0.0, column = 0.0, symmetry = 0.0;
    for (const auto& in : family) {
        const auto jac = full_jacobian(in.hierarchy, in.delta, in.params);
        const auto fd = fd_jacobian(in.hierarchy, in.delta, in.params, kFdStep);
        rel = std::max(rel, max_relative_error(jac, fd));
        const std::size_t n = jac.size;
        for (std::size_t k = 0; k < n; ++k) {
            double sum = jac.outside_row[k];
            for (std::size_t j = 0; j < n; ++j) {
                sum += jac(j, k);
                symmetry = std::max(symmetry, std::abs(jac(j, k) - jac(k, j)));
            }
            column = std::max(column, std::abs(sum));
        }
    }
    const double elapsed = seconds_since(start);
    return {rel <= kFdTol && column <= kColumnSumTol && symmetry <= kSymmetryTol && elapsed < kJacobianSeconds,
            fmt("max rel err %.2e (tol %.0e, |delta| <= %.0f), column sum %.1e, asymmetry %.1e, %.3f s", rel, kFdTol,
                kJacobianDeltaBound, column, symmetry, elapsed)};
}

Outcome gradient_identity()
{
    const auto family = instances(505, kGradientInstances);
    const double h = 1e-6;
    double worst = 0.0;
    for (auto in : family) {
        const auto table = compute_shares(in.hierarchy, in.delta, in.params).shares;
        for (std::size_t j = 0; j < in.delta.size(); ++j) {
            const double keep = in.delta[j];
            in.delta[j] = keep + h;
            const double up = compute_inclusive_values(in.hierarchy, in.delta, in.params).top;
            in.delta[j] = keep - h;
            const double down = compute_inclusive_values(in.hierarchy, in.delta, in.params).top;
            in.delta[j] = keep;
            worst = std::max(worst, std::abs((up - down) / (2 * h) - table.joint[j]));
        }
    }
    return {worst <= kGradientTol, fmt("max |dI/d delta - s| = %.2e (tol %.0e)", worst, kGradientTol)};
}

Outcome monte_carlo()
{
    const auto family = instances(606, kMonteCarloInstances);
    const std::uint64_t sizes[] = {10'000, 100'000, 1'000'000};

    const auto start = Clock::now();
    double worst_ratio = 0.0;
    std::vector<double> log_n, log_err;
    for (std::size_t s = 0; s < 3; ++s) {
        double squares = 0.0;
        std::size_t terms = 0;
        for (std::size_t i = 0; i < family.size(); ++i) {
            const auto& in = family[i];
            SimConfig config;
            config.draws = sizes[s];
            config.seed = 6060 + 100 * s + i;
            const auto emp = empirical_shares(simulate_choices(in.hierarchy, in.delta, in.params, config));
            const auto exact = compute_shares(in.hierarchy, in.delta, in.params).shares;
            const auto check = [&](double f, double p) {
                // Standardized errors have unit variance times 1/N; rare
                // products are left out of the rate estimate because their
                // counts are far from normal at the smallest N.
                const double var = p * (1 - p);
                if (var >= kRateMinVariance) {
                    squares += (f - p) * (f - p) / var;
                    ++terms;
                }
                if (sizes[s] != 1'000'000) return;
                const double bound = kMonteCarloSigmas * std::sqrt(p * (1 - p) / static_cast<double>(sizes[s]));
                worst_ratio = std::max(worst_ratio, bound > 0 ? std::abs(f - p) / bound : (f == p ? 0.0 : INFINITY));
            };
            for (std::size_t j = 0; j < in.delta.size(); ++j) check(emp.frequency[j], exact.joint[j]);
            check(emp.outside_frequency, exact.outside);
        }
        log_n.push_back(std::log(static_cast<double>(sizes[s])));
        log_err.push_back(0.5 * std::log(squares / terms));
    }
    const double elapsed = seconds_since(start);

    const double mx = (log_n[0] + log_n[1] + log_n[2]) / 3;
    const double my = (log_err[0] + log_err[1] + log_err[2]) / 3;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t s = 0; s < 3; ++s) {
        sxy += (log_n[s] - mx) * (log_err[s] - my);
        sxx += (log_n[s] - mx) * (log_n[s] - mx);
    }
    const double slope = sxy / sxx;
    const bool pass = worst_ratio <= 1.0 && std::abs(slope - kSlopeTarget) <= kSlopeTol && elapsed < kMonteCarloSeconds;
    return {pass, fmt("max |f - s| / (%.0f se) = %.3f at N = 1e6, rms standardized error slope %.3f (target %.1f +/- %.2f), %.2f s",
                      kMonteCarloSigmas, worst_ratio, slope, kSlopeTarget, kSlopeTol, elapsed)};
}

Outcome exact_fit()
{
    SynthConfig config;  // 2 x 2 x 2, beta (1, -2), sigma (0.5, 0.25), no xi
    config.seed = 707;
    const auto market = generate_market(config);
    const auto table = compute_shares(market.hierarchy, market.delta, market.params).shares;
    const auto est = estimate_linear(regression_rows(market.hierarchy, table), market.covariates);
    double worst = std::max(std::abs(est.sigma1_hat - config.sigma1), std::abs(est.sigma2_hat - config.sigma2));
    for (std::size_t k = 0; k < config.beta.size(); ++k) {
        worst = std::max(worst, std::abs(est.beta_hat[k] - config.beta[k]));
    }
    return {worst <= kEstimateTol && est.residual_norm <= kResidualTol,
            fmt("max parameter error %.2e (tol %.0e), residual %.2e (tol %.0e)", worst, kEstimateTol,
                est.residual_norm, kResidualTol)};
}

Outcome newton_agreement()
{
    const auto family = instances(808, kNewtonInstances);
    double worst = 0.0;
    int most = 0;
    for (const auto& in : family) {
        const auto table = compute_shares(in.hierarchy, in.delta, in.params).shares;
        const auto closed = berry_invert(in.hierarchy, table, in.params);
        const auto newton = numeric_invert(in.hierarchy, table, in.params, kNewtonTol, kNewtonMaxIter);
        most = std::max(most, newton.iterations);
        for (std::size_t j = 0; j < in.delta.size(); ++j) {
            worst = std::max(worst, std::abs(newton.delta[j] - closed[j]));
        }
    }
    return {worst <= kNewtonAgreeTol && most <= kNewtonMaxIter,
            fmt("max |newton - closed| = %.2e (tol %.0e), max iterations %d (limit %d)", worst, kNewtonAgreeTol, most,
                kNewtonMaxIter)};
}

Outcome overflow()
{
    std::mt19937_64 rng(909);
    std::bernoulli_distribution coin(0.5);
    fixtures::InstanceShape shape;
    bool finite = true;
    double worst = 0.0;
    for (int i = 0; i < 52; ++i) {
        auto in = fixtures::random_instance(rng, shape);
        for (auto& d : in.delta) d = i == 0 ? 700.0 : i == 1 ? -700.0 : (coin(rng) ? 700.0 : -700.0);
        const auto table = compute_shares(in.hierarchy, in.delta, in.params).shares;
        const auto jac = jacobian_from_table(in.hierarchy, table, in.params);
        finite = finite && std::isfinite(table.outside);
        for (double v : table.joint) finite = finite && std::isfinite(v);
        for (double v : jac.matrix) finite = finite && std::isfinite(v);
        for (double v : jac.outside_row) finite = finite && std::isfinite(v);
        const auto back = berry_invert(in.hierarchy, table, in.params);
        for (std::size_t j = 0; j < in.delta.size(); ++j) worst = std::max(worst, std::abs(back[j] - in.delta[j]));
    }
    return {finite && worst <= kOverflowTol,
            fmt("shares and Jacobian %s, max round-trip error %.2e (tol %.0e)", finite ? "finite" : "NOT finite",
                worst, kOverflowTol)};
}

} // namespace

int main()
{
    const auto family = instances(101, kInstances);
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"1 normalization", [&] { return normalization(family); }},
        {"2 closed-form round trip", [&] { return berry_round_trip(family); }},
        {"3 collapse to simpler models", collapses},
        {"4 jacobian vs finite differences", jacobian_vs_fd},
        {"5 gradient of inclusive value", gradient_identity},
        {"6 monte carlo consistency", monte_carlo},
        {"7 exact-fit estimation", exact_fit},
        {"8 newton vs closed form", newton_agreement},
        {"9 extreme utilities", overflow},
    };

    int failures = 0;
    for (const auto& [name, run] : criteria) {
        Outcome outcome;
        try {
            outcome = run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("threw: ") + e.what()};
        }
        std::printf("%s  %-34s %s\n", outcome.pass ? "PASS" : "FAIL", name, outcome.detail.c_str());
        std::fflush(stdout);
        failures += outcome.pass ? 0 : 1;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
