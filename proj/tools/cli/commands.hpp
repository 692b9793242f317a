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

#include <cstdint>
#include <string>

namespace nlcli {

enum class Format { Csv, Json };

struct SharesOptions {
    std::string input;
    std::string params;
    std::string output;
    Format format = Format::Csv;
};

struct InvertOptions {
    std::string input;
    std::string params;
    std::string output;
    std::string method = "closed";
    double tol = 1e-10;
    int max_iter = 100;
};

struct JacobianOptions {
    std::string input;
    std::string params;
    std::string output;
    bool check_fd = false;
    double fd_step = 1e-6;
};

struct SimulateOptions {
    std::string input;
    std::string params;
    std::string output;
    std::uint64_t draws = 1'000'000;
    std::uint64_t seed = 0;
    unsigned threads = 0;
};

struct EstimateOptions {
    std::string config;
    std::string output;
};

// Each returns the process exit code or throws CliError.
int run_shares(const SharesOptions& options);
int run_invert(const InvertOptions& options);
int run_jacobian(const JacobianOptions& options);
int run_simulate(const SimulateOptions& options);
int run_estimate(const EstimateOptions& options);

} // namespace nlcli
