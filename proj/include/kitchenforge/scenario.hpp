#pragma once

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <variant>
#include <vector>

namespace kitchenforge {

/// Model time. All schedule arithmetic is integral minutes from time 0.
using Minutes = std::int64_t;

/// One way of cooking a food type: amount per execution, the cooking zones and
/// pot it runs on, and the per-execution energy, time, cost and deficiency.
struct Recipe {
    std::string food;
    std::string variant;
    /// Label ("<food> <variant>") of the recipe that must have completed first.
    std::optional<std::string> predecessor;
    double amount_g = 0.0;
    std::vector<std::string> zones;
    std::string pot;
    double energy_kj = 0.0;
    Minutes duration_min = 0;
    double cost_eur = 0.0;
    double deficiency = 0.0;

    [[nodiscard]] std::string label() const { return food + " " + variant; }

    bool operator==(Recipe const&) const = default;
};

/// A cooking zone paired with the only pot type it accepts.
struct Resource {
    std::string zone;
    std::string pot;

    [[nodiscard]] std::string display_name() const { return zone + " " + pot; }

    bool operator==(Resource const&) const = default;
};

/// Zones sharing physical heating elements; no two members may carry
/// overlapping tasks.
struct ExclusionGroup {
    std::vector<std::string> members;

    [[nodiscard]] bool contains(std::string const& zone) const {
        return std::find(members.begin(), members.end(), zone) != members.end();
    }

    bool operator==(ExclusionGroup const&) const = default;
};

/// Required grams per food type.
using Order = std::map<std::string, double>;

/// A zone or pot reported as unusable. Naming a pot disables every resource
/// that uses it.
struct ResourceUnavailable {
    std::string target;
    bool operator==(ResourceUnavailable const&) const = default;
};

/// Measured cooking time of a recipe on one zone/pot pair. The effective
/// duration is `end - start`.
struct DurationOverride {
    std::string recipe;
    std::string zone;
    std::string pot;
    Minutes start = 0;
    Minutes end = 0;

    [[nodiscard]] Minutes duration() const { return end - start; }
    bool operator==(DurationOverride const&) const = default;
};

struct QualityUpdate {
    std::string recipe;
    double deficiency = 0.0;
    bool operator==(QualityUpdate const&) const = default;
};

using ObservableEffect = std::variant<ResourceUnavailable, DurationOverride, QualityUpdate>;

struct Scenario {
    std::vector<Recipe> recipes;
    std::vector<Resource> resources;
    std::vector<ExclusionGroup> exclusion_groups;
    Order order;
    Minutes setup_duration = 10;
    std::vector<ObservableEffect> overrides;
    std::uint64_t rng_seed = 42;

    [[nodiscard]] std::optional<std::size_t> find_recipe(std::string const& label) const {
        for (std::size_t i = 0; i < recipes.size(); ++i) {
            if (recipes[i].label() == label) return i;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::optional<std::size_t> find_resource(std::string const& zone) const {
        for (std::size_t i = 0; i < resources.size(); ++i) {
            if (resources[i].zone == zone) return i;
        }
        return std::nullopt;
    }

    /// Food types in catalog order of first appearance.
    [[nodiscard]] std::vector<std::string> food_types() const {
        std::vector<std::string> foods;
        for (auto const& r : recipes) {
            if (std::find(foods.begin(), foods.end(), r.food) == foods.end()) foods.push_back(r.food);
        }
        return foods;
    }

    [[nodiscard]] bool excludes(std::string const& a, std::string const& b) const {
        if (a == b) return false;
        return std::any_of(exclusion_groups.begin(), exclusion_groups.end(),
                           [&](ExclusionGroup const& g) { return g.contains(a) && g.contains(b); });
    }

    bool operator==(Scenario const&) const = default;
};

/// One potential execution of a recipe, named "<food> <variant> <index>".
struct InstanceSlot {
    std::size_t recipe = 0;
    int index = 0;
    std::string name;

    bool operator==(InstanceSlot const&) const = default;
};

namespace detail {

inline std::size_t ceil_div(double required, double per_execution) {
    if (required <= 0.0) return 0;
    // integral gram amounts must not round up on representation noise
    return static_cast<std::size_t>(std::ceil(required / per_execution - 1e-9));
}

} // namespace detail

/// Checks every cross-reference and numeric invariant; throws ValidationError
/// naming the offending entity.
inline void validate(Scenario const& s) {
    std::set<std::string> labels;
    for (auto const& r : s.recipes) {
        if (r.food.empty()) throw ValidationError("recipe with empty food type");
        if (r.variant.empty()) throw ValidationError("recipe '" + r.food + "' has no variant");
        if (!labels.insert(r.label()).second)
            throw ValidationError("duplicate recipe '" + r.label() + "'");
        if (!(r.amount_g > 0.0)) throw ValidationError("recipe '" + r.label() + "': amount must be > 0");
        if (r.duration_min <= 0) throw ValidationError("recipe '" + r.label() + "': duration must be > 0");
        if (r.energy_kj < 0.0 || r.cost_eur < 0.0 || r.deficiency < 0.0)
            throw ValidationError("recipe '" + r.label() + "': negative energy, cost or deficiency");
        if (r.pot.empty()) throw ValidationError("recipe '" + r.label() + "' has no pot");
    }
    std::set<std::string> zones;
    for (auto const& res : s.resources) {
        if (res.zone.empty() || res.pot.empty()) throw ValidationError("resource with empty zone or pot");
        if (!zones.insert(res.zone).second) throw ValidationError("duplicate zone '" + res.zone + "'");
    }
    for (auto const& r : s.recipes) {
        if (r.predecessor && !labels.count(*r.predecessor))
            throw ValidationError("recipe '" + r.label() + "': unknown predecessor '" + *r.predecessor + "'");
        for (auto const& z : r.zones) {
            auto idx = s.find_resource(z);
            if (!idx) throw ValidationError("recipe '" + r.label() + "': unknown zone '" + z + "'");
            if (s.resources[*idx].pot != r.pot)
                throw ValidationError("recipe '" + r.label() + "': zone '" + z + "' takes " +
                                      s.resources[*idx].pot + ", recipe needs " + r.pot);
        }
    }
    for (auto const& g : s.exclusion_groups) {
        if (g.members.size() < 2) throw ValidationError("exclusion group needs at least two zones");
        for (auto const& m : g.members) {
            if (!zones.count(m)) throw ValidationError("exclusion group: unknown zone '" + m + "'");
        }
    }
    for (auto const& [food, grams] : s.order) {
        if (food.empty()) throw ValidationError("order line with empty food type");
        if (grams < 0.0) throw ValidationError("order for '" + food + "' is negative");
    }
    if (s.setup_duration < 0) throw ValidationError("setup duration must be >= 0");
}

/// Number of slots per recipe, in catalog order. Ordered foods get
/// ceil(order / amount); an unordered recipe that precedes slotted recipes gets
/// one slot per successor slot.
inline std::vector<std::size_t> slot_counts(Scenario const& s) {
    std::vector<std::size_t> counts(s.recipes.size(), 0);
    std::vector<bool> ordered(s.recipes.size(), false);
    for (std::size_t i = 0; i < s.recipes.size(); ++i) {
        auto it = s.order.find(s.recipes[i].food);
        if (it != s.order.end() && it->second > 0.0) {
            ordered[i] = true;
            counts[i] = detail::ceil_div(it->second, s.recipes[i].amount_g);
        }
    }
    // Predecessor chains are resolved by repeated passes; depth is bounded by
    // the catalog size, which also cuts off cyclic references.
    for (std::size_t pass = 0; pass < s.recipes.size(); ++pass) {
        std::vector<std::size_t> demand(s.recipes.size(), 0);
        for (std::size_t i = 0; i < s.recipes.size(); ++i) {
            auto const& pred = s.recipes[i].predecessor;
            if (!pred || counts[i] == 0) continue;
            if (auto p = s.find_recipe(*pred)) demand[*p] += counts[i];
        }
        bool changed = false;
        for (std::size_t i = 0; i < s.recipes.size(); ++i) {
            if (ordered[i] || demand[i] == counts[i]) continue;
            counts[i] = demand[i];
            changed = true;
        }
        if (!changed) break;
    }
    return counts;
}

inline std::vector<InstanceSlot> expand_instances(Scenario const& s) {
    auto counts = slot_counts(s);
    std::vector<InstanceSlot> slots;
    for (std::size_t r = 0; r < s.recipes.size(); ++r) {
        for (std::size_t k = 0; k < counts[r]; ++k) {
            slots.push_back({r, static_cast<int>(k), s.recipes[r].label() + " " + std::to_string(k)});
        }
    }
    return slots;
}

struct HobLayout {
    std::vector<Resource> resources;
    std::vector<ExclusionGroup> exclusion_groups;
};

/// A four-ring hob exposed as seven zones `<label>(1..7)`: rings 1-4 take
/// Pot(1); 5 joins rings 1+2 and 6 joins rings 3+4 for Pot(2); 7 joins rings
/// 1-3 for Pot(3). Zones that share a ring are mutually exclusive, expressed
/// as the cliques {1,5,7} {2,5,7} {3,6,7} {4,6}.
inline HobLayout build_standard_hob(std::string const& label) {
    auto zone = [&](int i) { return label + "(" + std::to_string(i) + ")"; };
    HobLayout hob;
    for (int i = 1; i <= 4; ++i) hob.resources.push_back({zone(i), "Pot(1)"});
    hob.resources.push_back({zone(5), "Pot(2)"});
    hob.resources.push_back({zone(6), "Pot(2)"});
    hob.resources.push_back({zone(7), "Pot(3)"});
    hob.exclusion_groups = {
        {{zone(1), zone(5), zone(7)}},
        {{zone(2), zone(5), zone(7)}},
        {{zone(3), zone(6), zone(7)}},
        {{zone(4), zone(6)}},
    };
    return hob;
}

} // namespace kitchenforge
