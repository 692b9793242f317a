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

#include "market_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

namespace nlcli {

namespace {

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw CliError(kParse, "unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

std::optional<double> parse_real(std::string_view text)
{
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc() || end != text.data() + text.size()) return std::nullopt;
    return value;
}

void check_domain(const Market& market, ValueMode mode)
{
    const auto fail = [&](const std::string& what) {
        throw CliError(kDomain, "market '" + market.id + "': " + what);
    };
    if (mode == ValueMode::Delta) {
        for (const auto& row : market.rows) {
            if (!std::isfinite(row.value)) fail("utility of '" + row.product_id + "' is not finite");
        }
        return;
    }
    if (!market.outside) throw CliError(kParse, "market '" + market.id + "': missing _outside row");
    double total = *market.outside;
    if (!(*market.outside > 0.0 && *market.outside < 1.0)) fail("outside share must lie in (0, 1)");
    for (const auto& row : market.rows) {
        if (!(row.value > 0.0 && row.value < 1.0)) fail("share of '" + row.product_id + "' must lie in (0, 1)");
        total += row.value;
    }
    if (std::abs(total - 1.0) > 1e-6) fail("shares sum to " + format_real(total) + ", not 1");
}

} // namespace

std::vector<double> Market::values() const
{
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.value);
    return out;
}

HierarchyPtr Market::hierarchy() const
{
    std::vector<nl_row> raw;
    raw.reserve(rows.size());
    for (const auto& row : rows) raw.push_back({row.group_id.c_str(), row.subgroup_id.c_str(), row.product_id.c_str()});
    nl_hierarchy* h = nullptr;
    check(nl_hierarchy_create(id.c_str(), raw.data(), raw.size(), &h));
    return HierarchyPtr(h);
}

std::vector<Market> parse_markets(std::istream& in, ValueMode mode, const std::string& source)
{
    const auto fail = [&](std::size_t line, const std::string& what) {
        throw CliError(kParse, source + ":" + std::to_string(line) + ": " + what);
    };

    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw CliError(kParse, source + ": empty file");
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto header = split_csv(line);
    const char* required[] = {"market_id", "group_id", "subgroup_id", "product_id", "value"};
    std::size_t column[5];
    for (int c = 0; c < 5; ++c) {
        std::size_t found = header.size();
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == required[c]) found = i;
        }
        if (found == header.size()) fail(1, std::string("missing column '") + required[c] + "'");
        column[c] = found;
    }

    std::vector<Market> markets;
    std::unordered_map<std::string, std::size_t> index;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        try {
            fields = split_csv(line);
        } catch (const CliError& e) {
            fail(line_no, e.what());
        }
        if (fields.size() != header.size()) {
            fail(line_no, "expected " + std::to_string(header.size()) + " fields, found " + std::to_string(fields.size()));
        }
        const auto value = parse_real(fields[column[4]]);
        if (!value) fail(line_no, "value '" + fields[column[4]] + "' is not a number");

        const std::string& market_id = fields[column[0]];
        auto [it, inserted] = index.try_emplace(market_id, markets.size());
        if (inserted) markets.push_back(Market{market_id, {}, std::nullopt});
        Market& market = markets[it->second];

        if (fields[column[3]] == kOutsideId) {
            if (mode == ValueMode::Delta) continue;
            if (market.outside) fail(line_no, "second _outside row for market '" + market_id + "'");
            market.outside = *value;
            continue;
        }
        market.rows.push_back({fields[column[1]], fields[column[2]], fields[column[3]], *value});
    }
    if (markets.empty()) throw CliError(kParse, source + ": no data rows");
    for (const auto& market : markets) {
        if (market.rows.empty()) throw CliError(kParse, "market '" + market.id + "' has no products");
        check_domain(market, mode);
    }
    return markets;
}

std::vector<Market> read_markets(const std::string& path, ValueMode mode)
{
    std::ifstream in(path);
    if (!in) throw CliError(kParse, "cannot open '" + path + "'");
    return parse_markets(in, mode, path);
}

std::string read_text(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw CliError(kParse, "cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

nl_params read_params(const std::string& path)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(read_text(path));
    } catch (const nlohmann::json::exception& e) {
        throw CliError(kParse, path + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("sigma1") || !doc.contains("sigma2") || !doc["sigma1"].is_number()
        || !doc["sigma2"].is_number()) {
        throw CliError(kParse, path + ": expected {\"sigma1\": number, \"sigma2\": number}");
    }
    nl_params params{};
    check(nl_params_validate(doc["sigma1"].get<double>(), doc["sigma2"].get<double>(), &params));
    if (!params.ordering_ok) {
        std::cerr << "warning: sigma2 > sigma1; the model is not consistent with random utility\n";
    }
    return params;
}

std::string format_real(double value)
{
    char buffer[32];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

void write_output(const std::string& path, const std::string& text)
{
    if (path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CliError(kParse, "cannot write '" + path + "'");
    out << text;
    if (!out) throw CliError(kParse, "failed writing '" + path + "'");
}

} // namespace nlcli
