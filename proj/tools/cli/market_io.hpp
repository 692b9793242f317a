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

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nestlogit/nestlogit.h>

#include "capi.hpp"

namespace nlcli {

inline constexpr const char* kOutsideId = "_outside";

enum class ValueMode { Delta, Share };

struct MarketRow {
    std::string group_id;
    std::string subgroup_id;
    std::string product_id;
    double value = 0.0;
};

struct Market {
    std::string id;
    std::vector<MarketRow> rows;
    std::optional<double> outside;

    std::vector<double> values() const;
    HierarchyPtr hierarchy() const;
};

// Markets in order of first appearance. Structural problems raise
// CliError(kParse); value-domain problems raise CliError(kDomain).
std::vector<Market> parse_markets(std::istream& in, ValueMode mode, const std::string& source);
std::vector<Market> read_markets(const std::string& path, ValueMode mode);

nl_params read_params(const std::string& path);

std::string read_text(const std::string& path);

// Shortest text is not required; 17 significant digits round-trip doubles.
std::string format_real(double value);

// Writes to the file, or to standard output when the path is empty.
void write_output(const std::string& path, const std::string& text);

} // namespace nlcli
