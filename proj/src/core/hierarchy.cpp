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

#include "core/hierarchy.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace nestlogit {

const char* to_string(ErrorCode code) noexcept
{
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::DuplicateProduct: return "DuplicateProduct";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::EmptyChoiceSet: return "EmptyChoiceSet";
    case ErrorCode::DegenerateShare: return "DegenerateShare";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::UnknownId: return "UnknownId";
    case ErrorCode::BadDimensions: return "BadDimensions";
    case ErrorCode::SingularDesign: return "SingularDesign";
    }
    return "Unknown";
}

ChoiceHierarchy ChoiceHierarchy::build(std::string market_id, std::span<const HierarchyRow> rows)
{
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyInput, "market '" + market_id + "' has no products");
    }

    ChoiceHierarchy tree;
    tree.market_id_ = std::move(market_id);

    std::unordered_map<std::string, std::size_t> group_lookup;
    std::map<std::pair<std::size_t, std::string>, std::size_t> subgroup_lookup;

    for (const auto& row : rows) {
        if (row.product_id.empty()) {
            throw Error(ErrorCode::InvalidArgument, "empty product id in market '" + tree.market_id_ + "'");
        }
        if (tree.product_lookup_.contains(row.product_id)) {
            throw Error(ErrorCode::DuplicateProduct,
                        "product '" + row.product_id + "' appears twice in market '" + tree.market_id_ + "'");
        }

        auto [git, new_group] = group_lookup.try_emplace(row.group_id, tree.groups_.size());
        if (new_group) {
            tree.groups_.push_back(GroupNode{row.group_id, {}});
        }
        const std::size_t g = git->second;

        auto [sit, new_subgroup] = subgroup_lookup.try_emplace({g, row.subgroup_id}, tree.subgroups_.size());
        if (new_subgroup) {
            tree.subgroups_.push_back(SubgroupNode{row.subgroup_id, g, {}});
            tree.groups_[g].subgroups.push_back(sit->second);
        }
        const std::size_t h = sit->second;

        const std::size_t j = tree.product_ids_.size();
        tree.locations_.push_back(ProductLocation{g, h, tree.subgroups_[h].products.size()});
        tree.subgroups_[h].products.push_back(j);
        tree.product_ids_.push_back(row.product_id);
        tree.product_lookup_.emplace(row.product_id, j);
    }
    return tree;
}

const ProductLocation& ChoiceHierarchy::location(std::size_t product) const
{
    if (product >= locations_.size()) {
        throw Error(ErrorCode::UnknownId, "product index " + std::to_string(product) + " out of range");
    }
    return locations_[product];
}

std::optional<std::size_t> ChoiceHierarchy::find_product(std::string_view product_id) const
{
    auto it = product_lookup_.find(std::string(product_id));
    if (it == product_lookup_.end()) {
        return std::nullopt;
    }
    return it->second;
}

NestingParams validate_params(double sigma1, double sigma2)
{
    auto in_domain = [](double s) { return s >= 0.0 && s < 1.0; };  // false for NaN
    if (!in_domain(sigma1) || !in_domain(sigma2)) {
        throw Error(ErrorCode::OutOfDomain,
                    "nesting parameters must lie in [0, 1): sigma1=" + std::to_string(sigma1)
                        + " sigma2=" + std::to_string(sigma2));
    }
    return NestingParams{sigma1, sigma2, sigma2 <= sigma1};
}

UtilityVector::UtilityVector(std::vector<double> values)
    : values_(std::move(values))
{
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw Error(ErrorCode::OutOfDomain, "mean utility " + std::to_string(i) + " is not finite");
        }
    }
}

void require_aligned(const ChoiceHierarchy& hierarchy, std::span<const double> delta)
{
    if (delta.size() != hierarchy.product_count()) {
        throw Error(ErrorCode::BadDimensions,
                    "expected " + std::to_string(hierarchy.product_count()) + " values, got "
                        + std::to_string(delta.size()));
    }
}

} // namespace nestlogit
