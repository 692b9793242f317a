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

#include "nestlogit/nestlogit.h"

#include <cstring>
#include <exception>
#include <new>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "core/error.hpp"
#include "core/hierarchy.hpp"
#include "core/inversion.hpp"
#include "core/jacobian.hpp"
#include "core/montecarlo.hpp"
#include "core/shares.hpp"
#include "core/synth.hpp"

struct nl_hierarchy {
    nestlogit::ChoiceHierarchy tree;
};

struct nl_share_table {
    nestlogit::ShareTable shares;
    std::optional<nestlogit::InclusiveValues> inclusive;
};

struct nl_synth_market {
    nl_hierarchy hierarchy;
    nestlogit::SyntheticMarket market;
};

namespace {

thread_local std::string last_error;

nl_status to_status(nestlogit::ErrorCode code)
{
    using nestlogit::ErrorCode;
    switch (code) {
    case ErrorCode::InvalidArgument: return NL_ERR_INVALID_ARGUMENT;
    case ErrorCode::EmptyInput: return NL_ERR_EMPTY_INPUT;
    case ErrorCode::DuplicateProduct: return NL_ERR_DUPLICATE_PRODUCT;
    case ErrorCode::OutOfDomain: return NL_ERR_OUT_OF_DOMAIN;
    case ErrorCode::EmptyChoiceSet: return NL_ERR_EMPTY_CHOICE_SET;
    case ErrorCode::DegenerateShare: return NL_ERR_DEGENERATE_SHARE;
    case ErrorCode::NoConvergence: return NL_ERR_NO_CONVERGENCE;
    case ErrorCode::UnknownId: return NL_ERR_UNKNOWN_ID;
    case ErrorCode::BadDimensions: return NL_ERR_BAD_DIMENSIONS;
    case ErrorCode::SingularDesign: return NL_ERR_SINGULAR_DESIGN;
    }
    return NL_ERR_INTERNAL;
}

nl_status fail(nl_status status, std::string message)
{
    last_error = std::move(message);
    return status;
}

// Runs `body` with the exception-to-status translation of the C boundary.
template <class F>
nl_status guarded(F&& body) noexcept
{
    try {
        last_error.clear();
        body();
        return NL_OK;
    } catch (const nestlogit::Error& e) {
        return fail(to_status(e.code()), e.what());
    } catch (const std::bad_alloc&) {
        return fail(NL_ERR_INTERNAL, "out of memory");
    } catch (const std::exception& e) {
        return fail(NL_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(NL_ERR_INTERNAL, "unknown exception");
    }
}

void require(bool condition, const char* what)
{
    if (!condition) {
        throw nestlogit::Error(nestlogit::ErrorCode::InvalidArgument, what);
    }
}

nestlogit::NestingParams params_of(const nl_params* params)
{
    require(params != nullptr, "params is null");
    return nestlogit::validate_params(params->sigma1, params->sigma2);
}

std::span<const double> delta_of(const nl_hierarchy* hierarchy, const double* delta, size_t n)
{
    require(hierarchy != nullptr, "hierarchy is null");
    require(delta != nullptr || n == 0, "delta is null");
    std::span<const double> values(delta, n);
    nestlogit::require_aligned(hierarchy->tree, values);
    nestlogit::UtilityVector check(std::vector<double>(values.begin(), values.end()));
    return values;
}

void copy_out(const std::vector<double>& from, double* out, size_t len)
{
    require(out != nullptr || len == 0, "output buffer is null");
    if (from.size() != len) {
        throw nestlogit::Error(nestlogit::ErrorCode::BadDimensions,
                               "output buffer holds " + std::to_string(len) + " entries, need "
                                   + std::to_string(from.size()));
    }
    std::copy(from.begin(), from.end(), out);
}

const std::vector<double>* field_of(const nl_share_table* table, nl_share_field field)
{
    const auto& s = table->shares;
    switch (field) {
    case NL_JOINT: return &s.joint;
    case NL_COND_PRODUCT: return &s.cond_product;
    case NL_COND_SUBGROUP: return &s.cond_subgroup;
    case NL_GROUP: return &s.group;
    case NL_LOG_JOINT: return &s.log_joint;
    case NL_LOG_COND_PRODUCT: return &s.log_cond_product;
    case NL_LOG_COND_SUBGROUP: return &s.log_cond_subgroup;
    case NL_LOG_GROUP: return &s.log_group;
    case NL_IV_SUBGROUP: return table->inclusive ? &table->inclusive->subgroup : nullptr;
    case NL_IV_GROUP: return table->inclusive ? &table->inclusive->group : nullptr;
    }
    return nullptr;
}

void write_jacobian(const nestlogit::ShareJacobian& jac, double* matrix_out, double* outside_row)
{
    copy_out(jac.matrix, matrix_out, jac.size * jac.size);
    copy_out(jac.outside_row, outside_row, jac.size);
}

} // namespace

extern "C" {

const char* nl_status_name(nl_status status)
{
    switch (status) {
    case NL_OK: return "NL_OK";
    case NL_ERR_INVALID_ARGUMENT: return "NL_ERR_INVALID_ARGUMENT";
    case NL_ERR_EMPTY_INPUT: return "NL_ERR_EMPTY_INPUT";
    case NL_ERR_DUPLICATE_PRODUCT: return "NL_ERR_DUPLICATE_PRODUCT";
    case NL_ERR_OUT_OF_DOMAIN: return "NL_ERR_OUT_OF_DOMAIN";
    case NL_ERR_EMPTY_CHOICE_SET: return "NL_ERR_EMPTY_CHOICE_SET";
    case NL_ERR_DEGENERATE_SHARE: return "NL_ERR_DEGENERATE_SHARE";
    case NL_ERR_NO_CONVERGENCE: return "NL_ERR_NO_CONVERGENCE";
    case NL_ERR_UNKNOWN_ID: return "NL_ERR_UNKNOWN_ID";
    case NL_ERR_BAD_DIMENSIONS: return "NL_ERR_BAD_DIMENSIONS";
    case NL_ERR_SINGULAR_DESIGN: return "NL_ERR_SINGULAR_DESIGN";
    case NL_ERR_INTERNAL: return "NL_ERR_INTERNAL";
    }
    return "NL_ERR_UNKNOWN";
}

const char* nl_last_error(void) { return last_error.c_str(); }

const char* nl_version(void) { return "1.0.0"; }

nl_status nl_params_validate(double sigma1, double sigma2, nl_params* out)
{
    return guarded([&] {
        require(out != nullptr, "out is null");
        const auto p = nestlogit::validate_params(sigma1, sigma2);
        *out = nl_params{p.sigma1, p.sigma2, p.ordering_ok ? 1 : 0};
    });
}

nl_status nl_hierarchy_create(const char* market_id, const nl_row* rows, size_t n_rows, nl_hierarchy** out)
{
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = nullptr;
        require(rows != nullptr || n_rows == 0, "rows is null");
        std::vector<nestlogit::HierarchyRow> converted;
        converted.reserve(n_rows);
        for (size_t i = 0; i < n_rows; ++i) {
            require(rows[i].group_id && rows[i].subgroup_id && rows[i].product_id, "row with a null id");
            converted.push_back({rows[i].group_id, rows[i].subgroup_id, rows[i].product_id});
        }
        auto tree = nestlogit::ChoiceHierarchy::build(market_id ? market_id : "", converted);
        *out = new nl_hierarchy{std::move(tree)};
    });
}

void nl_hierarchy_free(nl_hierarchy* hierarchy) { delete hierarchy; }

const char* nl_hierarchy_market_id(const nl_hierarchy* hierarchy)
{
    return hierarchy ? hierarchy->tree.market_id().c_str() : "";
}

size_t nl_hierarchy_product_count(const nl_hierarchy* hierarchy)
{
    return hierarchy ? hierarchy->tree.product_count() : 0;
}

size_t nl_hierarchy_subgroup_count(const nl_hierarchy* hierarchy)
{
    return hierarchy ? hierarchy->tree.subgroup_count() : 0;
}

size_t nl_hierarchy_group_count(const nl_hierarchy* hierarchy)
{
    return hierarchy ? hierarchy->tree.group_count() : 0;
}

nl_status nl_hierarchy_product(const nl_hierarchy* hierarchy, size_t index, nl_product_info* out)
{
    return guarded([&] {
        require(hierarchy != nullptr && out != nullptr, "null argument");
        const auto& tree = hierarchy->tree;
        const auto& loc = tree.location(index);
        *out = nl_product_info{
            tree.product_ids()[index].c_str(),
            tree.groups()[loc.group].id.c_str(),
            tree.subgroups()[loc.subgroup].id.c_str(),
            loc.group,
            loc.subgroup,
            loc.position,
        };
    });
}

nl_status nl_hierarchy_find_product(const nl_hierarchy* hierarchy, const char* product_id, size_t* index)
{
    return guarded([&] {
        require(hierarchy != nullptr && product_id != nullptr && index != nullptr, "null argument");
        const auto found = hierarchy->tree.find_product(product_id);
        if (!found) {
            throw nestlogit::Error(nestlogit::ErrorCode::UnknownId,
                                   std::string("unknown product '") + product_id + "'");
        }
        *index = *found;
    });
}

nl_status nl_hierarchy_subgroup(const nl_hierarchy* hierarchy, size_t index, const char** subgroup_id, size_t* group)
{
    return guarded([&] {
        require(hierarchy != nullptr, "hierarchy is null");
        if (index >= hierarchy->tree.subgroup_count()) {
            throw nestlogit::Error(nestlogit::ErrorCode::UnknownId, "unknown subgroup index");
        }
        const auto& node = hierarchy->tree.subgroups()[index];
        if (subgroup_id) *subgroup_id = node.id.c_str();
        if (group) *group = node.group;
    });
}

nl_status nl_hierarchy_group(const nl_hierarchy* hierarchy, size_t index, const char** group_id)
{
    return guarded([&] {
        require(hierarchy != nullptr && group_id != nullptr, "null argument");
        if (index >= hierarchy->tree.group_count()) {
            throw nestlogit::Error(nestlogit::ErrorCode::UnknownId, "unknown group index");
        }
        *group_id = hierarchy->tree.groups()[index].id.c_str();
    });
}

nl_status nl_shares_compute(const nl_hierarchy* hierarchy, const double* delta, size_t n, const nl_params* params,
                            nl_share_table** out)
{
    return guarded([&] {
        require(out != nullptr, "out is null");
        *out = nullptr;
        const auto values = delta_of(hierarchy, delta, n);
        auto market = nestlogit::compute_shares(hierarchy->tree, values, params_of(params));
        *out = new nl_share_table{std::move(market.shares), std::move(market.inclusive)};
    });
}

nl_status nl_shares_observed(const nl_hierarchy* hierarchy, const double* joint, size_t n, double outside,
                             nl_share_table** out)
{
    return guarded([&] {
        require(out != nullptr && hierarchy != nullptr, "null argument");
        require(joint != nullptr || n == 0, "joint is null");
        *out = nullptr;
        auto table = nestlogit::observed_share_table(hierarchy->tree, {joint, n}, outside);
        *out = new nl_share_table{std::move(table), std::nullopt};
    });
}

void nl_share_table_free(nl_share_table* table) { delete table; }

size_t nl_share_table_size(const nl_share_table* table, nl_share_field field)
{
    if (!table) return 0;
    const auto* values = field_of(table, field);
    return values ? values->size() : 0;
}

nl_status nl_share_table_get(const nl_share_table* table, nl_share_field field, double* out, size_t len)
{
    return guarded([&] {
        require(table != nullptr, "table is null");
        const auto* values = field_of(table, field);
        require(values != nullptr, "field not available for this table");
        copy_out(*values, out, len);
    });
}

nl_status nl_share_table_scalar(const nl_share_table* table, nl_share_scalar which, double* out)
{
    return guarded([&] {
        require(table != nullptr && out != nullptr, "null argument");
        switch (which) {
        case NL_OUTSIDE: *out = table->shares.outside; return;
        case NL_LOG_OUTSIDE: *out = table->shares.log_outside; return;
        case NL_IV_TOP:
            require(table->inclusive.has_value(), "inclusive values not available for this table");
            *out = table->inclusive->top;
            return;
        }
        require(false, "unknown scalar");
    });
}

nl_status nl_subgroup_inclusive_value(const double* deltas, size_t n, double sigma1, double* out)
{
    return guarded([&] {
        require(out != nullptr && (deltas != nullptr || n == 0), "null argument");
        const auto p = nestlogit::validate_params(sigma1, 0.0);
        *out = nestlogit::subgroup_inclusive_value({deltas, n}, p.sigma1);
    });
}

nl_status nl_group_inclusive_value(const double* subgroup_ivs, size_t n, double sigma2, double* out)
{
    return guarded([&] {
        require(out != nullptr && (subgroup_ivs != nullptr || n == 0), "null argument");
        const auto p = nestlogit::validate_params(0.0, sigma2);
        *out = nestlogit::group_inclusive_value({subgroup_ivs, n}, p.sigma2);
    });
}

nl_status nl_top_inclusive_value(const double* group_ivs, size_t n, int include_outside, double* out)
{
    return guarded([&] {
        require(out != nullptr && (group_ivs != nullptr || n == 0), "null argument");
        *out = nestlogit::top_inclusive_value({group_ivs, n}, include_outside != 0);
    });
}

nl_status nl_berry_invert(const nl_hierarchy* hierarchy, const nl_share_table* table, const nl_params* params,
                          double* delta_out, size_t n)
{
    return guarded([&] {
        require(hierarchy != nullptr && table != nullptr, "null argument");
        const auto delta = nestlogit::berry_invert(hierarchy->tree, table->shares, params_of(params));
        copy_out({delta.values().begin(), delta.values().end()}, delta_out, n);
    });
}

nl_status nl_regression_rows(const nl_hierarchy* hierarchy, const nl_share_table* table, double* y, double* x1,
                             double* x2, size_t n)
{
    return guarded([&] {
        require(hierarchy != nullptr && table != nullptr, "null argument");
        const auto rows = nestlogit::regression_rows(hierarchy->tree, table->shares);
        std::vector<double> ys, x1s, x2s;
        for (const auto& row : rows) {
            ys.push_back(row.y);
            x1s.push_back(row.x1);
            x2s.push_back(row.x2);
        }
        copy_out(ys, y, n);
        copy_out(x1s, x1, n);
        copy_out(x2s, x2, n);
    });
}

nl_status nl_numeric_invert(const nl_hierarchy* hierarchy, const nl_share_table* target, const nl_params* params,
                            double tol, int max_iter, double* delta_out, size_t n, nl_newton_report* report)
{
    return guarded([&] {
        require(hierarchy != nullptr && target != nullptr, "null argument");
        require(max_iter >= 0, "max_iter must be nonnegative");
        if (report) *report = nl_newton_report{max_iter, 0.0};
        const auto result = nestlogit::numeric_invert(hierarchy->tree, target->shares, params_of(params), tol,
                                                      max_iter);
        copy_out({result.delta.values().begin(), result.delta.values().end()}, delta_out, n);
        if (report) *report = nl_newton_report{result.iterations, result.residual};
    });
}

nl_status nl_d_cond_product(const nl_hierarchy* hierarchy, const nl_share_table* table, const nl_params* params,
                            size_t j, size_t k, double* out)
{
    return guarded([&] {
        require(hierarchy != nullptr && table != nullptr && out != nullptr, "null argument");
        *out = nestlogit::d_cond_product(hierarchy->tree, table->shares, j, k, params_of(params));
    });
}

nl_status nl_d_cond_subgroup(const nl_hierarchy* hierarchy, const nl_share_table* table, const nl_params* params,
                             size_t subgroup, size_t k, double* out)
{
    return guarded([&] {
        require(hierarchy != nullptr && table != nullptr && out != nullptr, "null argument");
        *out = nestlogit::d_cond_subgroup(hierarchy->tree, table->shares, subgroup, k, params_of(params));
    });
}

nl_status nl_d_group(const nl_hierarchy* hierarchy, const nl_share_table* table, size_t group, size_t k, double* out)
{
    return guarded([&] {
        require(hierarchy != nullptr && table != nullptr && out != nullptr, "null argument");
        *out = group == NL_OUTSIDE_GROUP ? nestlogit::d_outside(hierarchy->tree, table->shares, k)
                                         : nestlogit::d_group(hierarchy->tree, table->shares, group, k);
    });
}

nl_status nl_jacobian(const nl_hierarchy* hierarchy, const double* delta, size_t n, const nl_params* params,
                      double* matrix_out, double* outside_row)
{
    return guarded([&] {
        const auto values = delta_of(hierarchy, delta, n);
        write_jacobian(nestlogit::full_jacobian(hierarchy->tree, values, params_of(params)), matrix_out,
                       outside_row);
    });
}

nl_status nl_jacobian_fd(const nl_hierarchy* hierarchy, const double* delta, size_t n, const nl_params* params,
                         double step, double* matrix_out, double* outside_row)
{
    return guarded([&] {
        const auto values = delta_of(hierarchy, delta, n);
        write_jacobian(nestlogit::fd_jacobian(hierarchy->tree, values, params_of(params), step), matrix_out,
                       outside_row);
    });
}

nl_status nl_jacobian_max_relative_error(const double* matrix_a, const double* outside_a, const double* matrix_b,
                                         const double* outside_b, size_t n, double* out)
{
    return guarded([&] {
        require(out != nullptr, "out is null");
        require(n == 0 || (matrix_a && outside_a && matrix_b && outside_b), "null argument");
        auto wrap = [n](const double* m, const double* o) {
            nestlogit::ShareJacobian jac;
            jac.size = n;
            jac.matrix.assign(m, m + n * n);
            jac.outside_row.assign(o, o + n);
            return jac;
        };
        *out = nestlogit::max_relative_error(wrap(matrix_a, outside_a), wrap(matrix_b, outside_b));
    });
}

nl_status nl_simulate(const nl_hierarchy* hierarchy, const double* delta, size_t n, const nl_params* params,
                      const nl_sim_config* config, uint64_t* counts_out, uint64_t* outside_count)
{
    return guarded([&] {
        require(config != nullptr && outside_count != nullptr, "null argument");
        require(counts_out != nullptr || n == 0, "counts_out is null");
        const auto values = delta_of(hierarchy, delta, n);
        nestlogit::SimConfig cfg;
        cfg.draws = config->draws;
        cfg.seed = config->seed;
        if (config->chunk_size != 0) cfg.chunk_size = config->chunk_size;
        cfg.threads = config->threads;
        const auto counts = nestlogit::simulate_choices(hierarchy->tree, values, params_of(params), cfg);
        std::copy(counts.product.begin(), counts.product.end(), counts_out);
        *outside_count = counts.outside;
    });
}

nl_status nl_sample_gumbel(uint64_t seed, double* out, size_t n)
{
    return guarded([&] {
        require(out != nullptr || n == 0, "out is null");
        auto rng = nestlogit::substream_engine(seed, 0);
        const auto draws = nestlogit::sample_gumbel(rng, n);
        std::copy(draws.begin(), draws.end(), out);
    });
}

nl_status nl_empirical_shares(const uint64_t* counts, size_t n, uint64_t outside_count, uint64_t total,
                              double* frequency, double* std_error, double* outside_frequency,
                              double* outside_std_error)
{
    return guarded([&] {
        require(counts != nullptr || n == 0, "counts is null");
        nestlogit::ChoiceCounts cc{{counts, counts + n}, outside_count, total};
        uint64_t sum = outside_count;
        for (size_t i = 0; i < n; ++i) sum += counts[i];
        require(sum == total, "counts do not sum to total");
        const auto shares = nestlogit::empirical_shares(cc);
        copy_out(shares.frequency, frequency, n);
        copy_out(shares.std_error, std_error, n);
        if (outside_frequency) *outside_frequency = shares.outside_frequency;
        if (outside_std_error) *outside_std_error = shares.outside_std_error;
    });
}

nl_status nl_synth_generate(const nl_synth_config* config, nl_synth_market** out)
{
    return guarded([&] {
        require(config != nullptr && out != nullptr, "null argument");
        *out = nullptr;
        require(config->beta != nullptr || config->beta_len == 0, "beta is null");
        nestlogit::SynthConfig cfg;
        cfg.n_groups = config->n_groups;
        cfg.n_subgroups_per_group = config->n_subgroups_per_group;
        cfg.n_products_per_subgroup = config->n_products_per_subgroup;
        cfg.beta.assign(config->beta, config->beta + config->beta_len);
        cfg.x_low = config->x_low;
        cfg.x_high = config->x_high;
        cfg.xi_scale = config->xi_scale;
        cfg.sigma1 = config->sigma1;
        cfg.sigma2 = config->sigma2;
        cfg.seed = config->seed;
        auto market = nestlogit::generate_market(cfg);
        auto tree = market.hierarchy;
        *out = new nl_synth_market{nl_hierarchy{std::move(tree)}, std::move(market)};
    });
}

void nl_synth_market_free(nl_synth_market* market) { delete market; }

const nl_hierarchy* nl_synth_market_hierarchy(const nl_synth_market* market)
{
    return market ? &market->hierarchy : nullptr;
}

nl_status nl_synth_market_delta(const nl_synth_market* market, double* out, size_t n)
{
    return guarded([&] {
        require(market != nullptr, "market is null");
        const auto values = market->market.delta.values();
        copy_out({values.begin(), values.end()}, out, n);
    });
}

nl_status nl_synth_market_covariates(const nl_synth_market* market, double* out, size_t len)
{
    return guarded([&] {
        require(market != nullptr, "market is null");
        copy_out(market->market.covariates.values, out, len);
    });
}

nl_status nl_estimate_linear(const double* y, const double* x1, const double* x2, size_t n_rows,
                             const double* covariates, size_t k, double* beta_hat, nl_estimate* out)
{
    return guarded([&] {
        require(out != nullptr, "out is null");
        require(n_rows == 0 || (y && x1 && x2), "null regression data");
        require(n_rows * k == 0 || covariates != nullptr, "covariates is null");
        std::vector<nestlogit::RegressionRow> rows;
        rows.reserve(n_rows);
        for (size_t i = 0; i < n_rows; ++i) {
            rows.push_back({i, y[i], x1[i], x2[i]});
        }
        nestlogit::Covariates x{n_rows, k, std::vector<double>(covariates, covariates + n_rows * k)};
        const auto result = nestlogit::estimate_linear(rows, x);
        copy_out(result.beta_hat, beta_hat, k);
        *out = nl_estimate{result.sigma1_hat, result.sigma2_hat, result.residual_norm};
    });
}

} // extern "C"
