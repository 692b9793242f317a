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

#include "commands.hpp"

#include <cmath>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "market_io.hpp"

namespace nlcli {

namespace {

using json = nlohmann::ordered_json;

// Runs f for one market and tags any failure with the market id.
template <class F>
void per_market(const Market& market, F&& f)
{
    try {
        f();
    } catch (const CliError& e) {
        const std::string tag = "market '" + market.id + "'";
        const std::string what = e.what();
        if (what.rfind(tag, 0) == 0) throw;
        throw CliError(e.exit_code(), tag + ": " + what);
    }
}

std::vector<double> table_field(const nl_share_table* table, nl_share_field field)
{
    std::vector<double> out(nl_share_table_size(table, field));
    check(nl_share_table_get(table, field, out.data(), out.size()));
    return out;
}

double table_scalar(const nl_share_table* table, nl_share_scalar which)
{
    double out = 0.0;
    check(nl_share_table_scalar(table, which, &out));
    return out;
}

nl_product_info product_info(const nl_hierarchy* h, std::size_t j)
{
    nl_product_info info{};
    check(nl_hierarchy_product(h, j, &info));
    return info;
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string quoted = "\"";
    for (char c : text) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + '"';
}

void csv_row(std::ostringstream& out, std::initializer_list<std::string> fields)
{
    bool first = true;
    for (const auto& f : fields) {
        if (!first) out << ',';
        out << csv_field(f);
        first = false;
    }
    out << '\n';
}

ShareTablePtr compute(const nl_hierarchy* h, const std::vector<double>& delta, const nl_params& params)
{
    nl_share_table* table = nullptr;
    check(nl_shares_compute(h, delta.data(), delta.size(), &params, &table));
    return ShareTablePtr(table);
}

} // namespace

int run_shares(const SharesOptions& options)
{
    const auto params = read_params(options.params);
    const auto markets = read_markets(options.input, ValueMode::Delta);

    std::ostringstream csv;
    json doc = {{"markets", json::array()}};
    if (options.format == Format::Csv) {
        csv_row(csv, {"market_id", "group_id", "subgroup_id", "product_id", "value", "delta", "cond_product_share",
                      "cond_subgroup_share", "group_share", "subgroup_inclusive_value", "group_inclusive_value",
                      "inclusive_value"});
    }

    for (const auto& market : markets) {
        per_market(market, [&] {
            const auto h = market.hierarchy();
            const auto delta = market.values();
            const auto table = compute(h.get(), delta, params);
            const auto joint = table_field(table.get(), NL_JOINT);
            const auto cond_product = table_field(table.get(), NL_COND_PRODUCT);
            const auto cond_subgroup = table_field(table.get(), NL_COND_SUBGROUP);
            const auto group = table_field(table.get(), NL_GROUP);
            const auto iv_subgroup = table_field(table.get(), NL_IV_SUBGROUP);
            const auto iv_group = table_field(table.get(), NL_IV_GROUP);
            const double outside = table_scalar(table.get(), NL_OUTSIDE);
            const double top = table_scalar(table.get(), NL_IV_TOP);

            json products = json::array();
            for (std::size_t j = 0; j < delta.size(); ++j) {
                const auto info = product_info(h.get(), j);
                if (options.format == Format::Csv) {
                    csv_row(csv, {market.id, info.group_id, info.subgroup_id, info.product_id, format_real(joint[j]),
                                  format_real(delta[j]), format_real(cond_product[j]),
                                  format_real(cond_subgroup[info.subgroup]), format_real(group[info.group]),
                                  format_real(iv_subgroup[info.subgroup]), format_real(iv_group[info.group]),
                                  format_real(top)});
                } else {
                    products.push_back({{"group_id", info.group_id},
                                        {"subgroup_id", info.subgroup_id},
                                        {"product_id", info.product_id},
                                        {"share", joint[j]},
                                        {"delta", delta[j]},
                                        {"cond_product_share", cond_product[j]},
                                        {"cond_subgroup_share", cond_subgroup[info.subgroup]},
                                        {"group_share", group[info.group]},
                                        {"subgroup_inclusive_value", iv_subgroup[info.subgroup]},
                                        {"group_inclusive_value", iv_group[info.group]}});
                }
            }
            if (options.format == Format::Csv) {
                csv_row(csv, {market.id, "", "", kOutsideId, format_real(outside), "", "", "", format_real(outside), "",
                              "", format_real(top)});
            } else {
                doc["markets"].push_back({{"market_id", market.id},
                                          {"outside_share", outside},
                                          {"inclusive_value", top},
                                          {"products", std::move(products)}});
            }
        });
    }
    write_output(options.output, options.format == Format::Csv ? csv.str() : doc.dump(2) + "\n");
    return kOk;
}

int run_invert(const InvertOptions& options)
{
    if (options.method != "closed" && options.method != "newton") {
        throw CliError(kParse, "unknown method '" + options.method + "'");
    }
    if (!(options.tol > 0.0)) throw CliError(kDomain, "tolerance must be positive");
    const auto params = read_params(options.params);
    const auto markets = read_markets(options.input, ValueMode::Share);

    std::ostringstream csv;
    csv_row(csv, {"market_id", "group_id", "subgroup_id", "product_id", "value"});
    for (const auto& market : markets) {
        per_market(market, [&] {
            const auto h = market.hierarchy();
            const auto joint = market.values();
            nl_share_table* raw = nullptr;
            check(nl_shares_observed(h.get(), joint.data(), joint.size(), *market.outside, &raw));
            const ShareTablePtr table(raw);

            std::vector<double> delta(joint.size());
            if (options.method == "closed") {
                check(nl_berry_invert(h.get(), table.get(), &params, delta.data(), delta.size()));
            } else {
                nl_newton_report report{};
                const auto status = nl_numeric_invert(h.get(), table.get(), &params, options.tol, options.max_iter,
                                                      delta.data(), delta.size(), &report);
                check(status);
                std::cerr << "market '" << market.id << "': newton converged in " << report.iterations
                          << " iterations, residual " << report.residual << '\n';
            }
            for (std::size_t j = 0; j < delta.size(); ++j) {
                const auto info = product_info(h.get(), j);
                csv_row(csv, {market.id, info.group_id, info.subgroup_id, info.product_id, format_real(delta[j])});
            }
        });
    }
    write_output(options.output, csv.str());
    return kOk;
}

int run_jacobian(const JacobianOptions& options)
{
    if (!(options.fd_step > 0.0)) throw CliError(kDomain, "finite-difference step must be positive");
    const auto params = read_params(options.params);
    const auto markets = read_markets(options.input, ValueMode::Delta);

    int exit_code = kOk;
    std::ostringstream csv;
    csv_row(csv, {"market_id", "row_product_id", "col_product_id", "value"});
    for (const auto& market : markets) {
        per_market(market, [&] {
            const auto h = market.hierarchy();
            const auto delta = market.values();
            const std::size_t n = delta.size();
            std::vector<double> matrix(n * n), outside(n);
            check(nl_jacobian(h.get(), delta.data(), n, &params, matrix.data(), outside.data()));

            std::vector<std::string> ids;
            for (std::size_t j = 0; j < n; ++j) ids.emplace_back(product_info(h.get(), j).product_id);
            for (std::size_t j = 0; j < n; ++j) {
                for (std::size_t k = 0; k < n; ++k) csv_row(csv, {market.id, ids[j], ids[k], format_real(matrix[j * n + k])});
            }
            for (std::size_t k = 0; k < n; ++k) csv_row(csv, {market.id, kOutsideId, ids[k], format_real(outside[k])});

            if (options.check_fd) {
                std::vector<double> fd_matrix(n * n), fd_outside(n);
                check(nl_jacobian_fd(h.get(), delta.data(), n, &params, options.fd_step, fd_matrix.data(),
                                     fd_outside.data()));
                double err = 0.0;
                check(nl_jacobian_max_relative_error(matrix.data(), outside.data(), fd_matrix.data(),
                                                     fd_outside.data(), n, &err));
                std::cerr << "market '" << market.id << "': max relative error vs finite differences " << err << '\n';
                if (!(err <= 1e-5)) exit_code = kNumeric;
            }
        });
    }
    write_output(options.output, csv.str());
    if (exit_code != kOk) std::cerr << "finite-difference check failed\n";
    return exit_code;
}

int run_simulate(const SimulateOptions& options)
{
    if (options.draws == 0) throw CliError(kDomain, "--draws must be at least 1");
    const auto params = read_params(options.params);
    const auto markets = read_markets(options.input, ValueMode::Delta);

    double worst = 0.0;
    std::ostringstream csv;
    csv_row(csv, {"market_id", "group_id", "subgroup_id", "product_id", "count", "frequency", "share", "std_error", "z"});
    for (std::size_t m = 0; m < markets.size(); ++m) {
        const auto& market = markets[m];
        per_market(market, [&] {
            const auto h = market.hierarchy();
            const auto delta = market.values();
            const std::size_t n = delta.size();
            const auto table = compute(h.get(), delta, params);
            const auto share = table_field(table.get(), NL_JOINT);
            const double outside_share = table_scalar(table.get(), NL_OUTSIDE);

            // Markets get distinct streams so their errors are independent.
            const nl_sim_config config{options.draws, options.seed + m, 0, options.threads};
            std::vector<std::uint64_t> counts(n);
            std::uint64_t outside_count = 0;
            check(nl_simulate(h.get(), delta.data(), n, &params, &config, counts.data(), &outside_count));
            std::vector<double> freq(n), se(n);
            double outside_freq = 0.0, outside_se = 0.0;
            check(nl_empirical_shares(counts.data(), n, outside_count, options.draws, freq.data(), se.data(),
                                      &outside_freq, &outside_se));

            const auto z_score = [&](double f, double s) {
                const double sd = std::sqrt(s * (1.0 - s) / static_cast<double>(options.draws));
                if (sd > 0.0) return (f - s) / sd;
                return f == s ? 0.0 : INFINITY;
            };
            for (std::size_t j = 0; j < n; ++j) {
                const auto info = product_info(h.get(), j);
                const double z = z_score(freq[j], share[j]);
                worst = std::max(worst, std::abs(z));
                csv_row(csv, {market.id, info.group_id, info.subgroup_id, info.product_id, std::to_string(counts[j]),
                              format_real(freq[j]), format_real(share[j]), format_real(se[j]), format_real(z)});
            }
            const double z0 = z_score(outside_freq, outside_share);
            worst = std::max(worst, std::abs(z0));
            csv_row(csv, {market.id, "", "", kOutsideId, std::to_string(outside_count), format_real(outside_freq),
                          format_real(outside_share), format_real(outside_se), format_real(z0)});
        });
    }
    write_output(options.output, csv.str());
    std::cerr << "largest |z| " << worst << '\n';
    if (worst > 5.0) {
        std::cerr << "simulated frequencies disagree with analytic shares\n";
        return kNumeric;
    }
    return kOk;
}

namespace {

struct SynthRequest {
    nl_synth_config config{};
    std::vector<double> beta;
};

SynthRequest read_synth_config(const std::string& path)
{
    json doc;
    try {
        doc = json::parse(read_text(path));
    } catch (const json::exception& e) {
        throw CliError(kParse, path + ": " + e.what());
    }
    if (!doc.is_object()) throw CliError(kDomain, path + ": expected a JSON object");

    SynthRequest request;
    request.beta = {1.0, -2.0};
    request.config = {2, 2, 2, nullptr, 0, 0.0, 1.0, 0.0, 0.5, 0.25, 0};
    const auto bad = [&](const std::string& key, const char* what) {
        throw CliError(kDomain, path + ": '" + key + "' " + what);
    };
    const auto count = [&](const std::string& key, auto& out) {
        const auto& v = doc[key];
        if (!v.is_number_unsigned()) bad(key, "must be a nonnegative integer");
        out = v.template get<std::remove_reference_t<decltype(out)>>();
    };
    const auto real = [&](const std::string& key, double& out) {
        const auto& v = doc[key];
        if (!v.is_number()) bad(key, "must be a number");
        out = v.get<double>();
    };
    for (const auto& [key, value] : doc.items()) {
        if (key == "n_groups") count(key, request.config.n_groups);
        else if (key == "n_subgroups_per_group") count(key, request.config.n_subgroups_per_group);
        else if (key == "n_products_per_subgroup") count(key, request.config.n_products_per_subgroup);
        else if (key == "seed") count(key, request.config.seed);
        else if (key == "x_low") real(key, request.config.x_low);
        else if (key == "x_high") real(key, request.config.x_high);
        else if (key == "xi_scale") real(key, request.config.xi_scale);
        else if (key == "sigma1") real(key, request.config.sigma1);
        else if (key == "sigma2") real(key, request.config.sigma2);
        else if (key == "beta") {
            if (!value.is_array()) bad(key, "must be an array of numbers");
            request.beta.clear();
            for (const auto& b : value) {
                if (!b.is_number()) bad(key, "must be an array of numbers");
                request.beta.push_back(b.get<double>());
            }
        } else {
            bad(key, "is not a configuration key");
        }
    }
    request.config.beta = request.beta.data();
    request.config.beta_len = request.beta.size();
    return request;
}

} // namespace

int run_estimate(const EstimateOptions& options)
{
    const auto request = read_synth_config(options.config);

    nl_synth_market* raw = nullptr;
    const auto generated = nl_synth_generate(&request.config, &raw);
    if (generated != NL_OK) {
        // Every generator failure is a configuration problem.
        throw CliError(kDomain, std::string("bad configuration: ") + nl_last_error());
    }
    const SynthMarketPtr market(raw);
    const nl_hierarchy* h = nl_synth_market_hierarchy(market.get());
    const std::size_t n = nl_hierarchy_product_count(h);
    const std::size_t k = request.beta.size();

    std::vector<double> delta(n), covariates(n * k);
    check(nl_synth_market_delta(market.get(), delta.data(), n));
    check(nl_synth_market_covariates(market.get(), covariates.data(), covariates.size()));

    nl_params params{};
    check(nl_params_validate(request.config.sigma1, request.config.sigma2, &params));
    const auto table = compute(h, delta, params);
    std::vector<double> y(n), x1(n), x2(n);
    check(nl_regression_rows(h, table.get(), y.data(), x1.data(), x2.data(), n));

    std::vector<double> beta_hat(k);
    nl_estimate est{};
    check(nl_estimate_linear(y.data(), x1.data(), x2.data(), n, covariates.data(), k, beta_hat.data(), &est));

    const json doc = {{"products", n},
                      {"beta_hat", beta_hat},
                      {"sigma1_hat", est.sigma1_hat},
                      {"sigma2_hat", est.sigma2_hat},
                      {"residual_norm", est.residual_norm}};
    write_output(options.output, doc.dump(2) + "\n");
    return kOk;
}

} // namespace nlcli
