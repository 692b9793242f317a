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

#include <iostream>
#include <map>

#include <CLI11.hpp>

#include <nestlogit/nestlogit.h>

#include "commands.hpp"
#include "market_io.hpp"

int main(int argc, char** argv)
{
    using namespace nlcli;

    CLI::App app{"Two-level nested logit: shares, inversion, Jacobians, simulation and estimation"};
    app.set_version_flag("--version", std::string(nl_version()));
    app.require_subcommand(1);

    SharesOptions shares;
    auto* shares_cmd = app.add_subcommand("shares", "Choice shares and inclusive values from mean utilities");
    shares_cmd->add_option("--input", shares.input, "Market CSV with utilities in 'value'")->required();
    shares_cmd->add_option("--params", shares.params, "JSON file with sigma1 and sigma2")->required();
    shares_cmd->add_option("--output", shares.output, "Output file (default: standard output)");
    shares_cmd->add_option("--format", shares.format, "Output format")
        ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"csv", Format::Csv}, {"json", Format::Json}}));

    InvertOptions invert;
    auto* invert_cmd = app.add_subcommand("invert", "Mean utilities from observed shares");
    invert_cmd->add_option("--input", invert.input, "Market CSV with shares and an _outside row")->required();
    invert_cmd->add_option("--params", invert.params, "JSON file with sigma1 and sigma2")->required();
    invert_cmd->add_option("--output", invert.output, "Output file (default: standard output)");
    invert_cmd->add_option("--method", invert.method, "closed or newton")->check(CLI::IsMember({"closed", "newton"}));
    invert_cmd->add_option("--tol", invert.tol, "Newton tolerance on log shares")->capture_default_str();
    invert_cmd->add_option("--max-iter", invert.max_iter, "Newton iteration limit")->capture_default_str();

    JacobianOptions jacobian;
    auto* jacobian_cmd = app.add_subcommand("jacobian", "Share derivatives with respect to mean utilities");
    jacobian_cmd->add_option("--input", jacobian.input, "Market CSV with utilities in 'value'")->required();
    jacobian_cmd->add_option("--params", jacobian.params, "JSON file with sigma1 and sigma2")->required();
    jacobian_cmd->add_option("--output", jacobian.output, "Output file (default: standard output)");
    jacobian_cmd->add_flag("--check-fd", jacobian.check_fd, "Compare against central differences");
    jacobian_cmd->add_option("--fd-step", jacobian.fd_step, "Finite-difference step")->capture_default_str();

    SimulateOptions simulate;
    auto* simulate_cmd = app.add_subcommand("simulate", "Monte Carlo check of shares by sequential choice");
    simulate_cmd->add_option("--input", simulate.input, "Market CSV with utilities in 'value'")->required();
    simulate_cmd->add_option("--params", simulate.params, "JSON file with sigma1 and sigma2")->required();
    simulate_cmd->add_option("--output", simulate.output, "Output file (default: standard output)");
    simulate_cmd->add_option("--draws", simulate.draws, "Simulated consumers per market")->capture_default_str();
    simulate_cmd->add_option("--seed", simulate.seed, "Random seed")->capture_default_str();
    simulate_cmd->add_option("--threads", simulate.threads, "Worker threads (0: all cores)")->capture_default_str();

    EstimateOptions estimate;
    auto* estimate_cmd = app.add_subcommand("estimate", "Recover parameters from a synthetic market");
    estimate_cmd->add_option("--config", estimate.config, "JSON synthetic-market configuration")->required();
    estimate_cmd->add_option("--output", estimate.output, "Output file (default: standard output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParse;
    }

    try {
        if (*shares_cmd) return run_shares(shares);
        if (*invert_cmd) return run_invert(invert);
        if (*jacobian_cmd) return run_jacobian(jacobian);
        if (*simulate_cmd) return run_simulate(simulate);
        if (*estimate_cmd) return run_estimate(estimate);
    } catch (const CliError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kParse;
}
