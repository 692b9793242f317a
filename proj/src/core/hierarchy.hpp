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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "core/error.hpp"

namespace nestlogit {

// One input record: product `product_id` sits in subgroup `subgroup_id` of
// group `group_id`.
struct HierarchyRow {
    std::string group_id;
    std::string subgroup_id;
    std::string product_id;
};

struct ProductLocation {
    std::size_t group = 0;     // index into groups()
    std::size_t subgroup = 0;  // flat index into subgroups()
    std::size_t position = 0;  // position inside the subgroup

    bool operator==(const ProductLocation&) const = default;
};

struct SubgroupNode {
    std::string id;
    std::size_t group = 0;
    std::vector<std::size_t> products;  // flat product indices

    bool operator==(const SubgroupNode&) const = default;
};

struct GroupNode {
    std::string id;
    std::vector<std::size_t> subgroups;  // flat subgroup indices

    bool operator==(const GroupNode&) const = default;
};

// Two-level choice tree: market -> groups -> subgroups -> products.
//
// Products are numbered in first-appearance (input row) order and every
// per-product vector in the library (utilities, shares, Jacobian rows) uses
// that numbering. Groups and subgroups are numbered the same way. The
// outside option is implicit and never stored.
//
// Immutable after construction.
class ChoiceHierarchy {
public:
    static ChoiceHierarchy build(std::string market_id, std::span<const HierarchyRow> rows);

    const std::string& market_id() const noexcept { return market_id_; }

    std::size_t product_count() const noexcept { return product_ids_.size(); }
    std::size_t subgroup_count() const noexcept { return subgroups_.size(); }
    std::size_t group_count() const noexcept { return groups_.size(); }

    const std::vector<GroupNode>& groups() const noexcept { return groups_; }
    const std::vector<SubgroupNode>& subgroups() const noexcept { return subgroups_; }
    const std::vector<std::string>& product_ids() const noexcept { return product_ids_; }

    const ProductLocation& location(std::size_t product) const;
    std::optional<std::size_t> find_product(std::string_view product_id) const;

    bool operator==(const ChoiceHierarchy&) const = default;

private:
    ChoiceHierarchy() = default;

    std::string market_id_;
    std::vector<GroupNode> groups_;
    std::vector<SubgroupNode> subgroups_;
    std::vector<std::string> product_ids_;
    std::vector<ProductLocation> locations_;
    std::unordered_map<std::string, std::size_t> product_lookup_;
};

struct NestingParams {
    double sigma1 = 0.0;
    double sigma2 = 0.0;
    // True iff sigma2 <= sigma1. The simultaneous (nested) reading of the
    // model needs this ordering; the sequential reading does not.
    bool ordering_ok = true;
};

// Both parameters must lie in [0, 1); a parameter of 1 zeroes the scale
// 1 - sigma that divides every exponent.
NestingParams validate_params(double sigma1, double sigma2);

// Mean utilities, one per inside product in hierarchy order.
class UtilityVector {
public:
    UtilityVector() = default;
    explicit UtilityVector(std::vector<double> values);

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

// Throws BadDimensions unless `delta` has one entry per product.
void require_aligned(const ChoiceHierarchy& hierarchy, std::span<const double> delta);

} // namespace nestlogit
