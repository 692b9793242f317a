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

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace nestlogit {

// log(sum_i exp(x_i / scale)), shifted by the maximum so that no exponent is
// positive. Returns -inf for an empty input.
inline double log_sum_exp(std::span<const double> x, double scale = 1.0)
{
    if (x.empty()) {
        return -std::numeric_limits<double>::infinity();
    }
    const double top = *std::max_element(x.begin(), x.end());
    double sum = 0.0;
    for (double v : x) {
        sum += std::exp((v - top) / scale);
    }
    return top / scale + std::log(sum);
}

// log softmax of x / scale. Differences are taken before scaling so that
// large utilities do not cost precision in the shares.
inline std::vector<double> log_softmax(std::span<const double> x, double scale = 1.0)
{
    std::vector<double> out(x.size());
    if (x.empty()) {
        return out;
    }
    const double top = *std::max_element(x.begin(), x.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = (x[i] - top) / scale;
        sum += std::exp(out[i]);
    }
    const double log_sum = std::log(sum);
    for (double& v : out) {
        v -= log_sum;
    }
    return out;
}

} // namespace nestlogit
