#pragma once

#include "scenario.hpp"

#include <array>
#include <string>
#include <vector>

namespace kitchenforge::catalog {

enum class ZoneSet { Small, Double, Triple };

struct RecipeRow {
    char const* food;
    char const* variant;
    char const* predecessor; // nullptr when none
    double amount_g;
    ZoneSet zones;
    double energy_kj;
    Minutes duration_min;
    double cost_eur;
    double deficiency;
};

// clang-format off
inline constexpr std::array<RecipeRow, 33> kReferenceRecipes{{
    {"Boiled water", "A", nullptr,          1000, ZoneSet::Small,   350,  15, 0.03,   5},
    {"Boiled water", "B", nullptr,          2000, ZoneSet::Double, 1400,  10, 0.12,   8},
    {"Boiled water", "C", nullptr,          3000, ZoneSet::Triple, 3150,   5, 0.27,  11},
    {"Pasta",        "A", "Boiled water A",  100, ZoneSet::Small,   840,  30, 0.021,  2},
    {"Pasta",        "B", "Boiled water A",  100, ZoneSet::Small,   770,  25, 0.018,  9},
    {"Pasta",        "C", "Boiled water B",  200, ZoneSet::Double, 1120,  20, 0.021, 14},
    {"Pasta",        "D", "Boiled water B",  200, ZoneSet::Double, 1190,  15, 0.018, 19},
    {"Pasta",        "E", "Boiled water C",  300, ZoneSet::Triple, 1520,  10, 0.021, 22},
    {"Pasta",        "F", "Boiled water C",  300, ZoneSet::Triple, 1590,   5, 0.018, 25},
    {"Rice",         "A", "Boiled water A",  200, ZoneSet::Small,  1260,  50, 0.045,  7},
    {"Rice",         "B", "Boiled water A",  200, ZoneSet::Small,  1400,  45, 0.039, 15},
    {"Rice",         "C", "Boiled water B",  400, ZoneSet::Double, 1610,  40, 0.045, 19},
    {"Rice",         "D", "Boiled water B",  400, ZoneSet::Double, 1750,  35, 0.039, 22},
    {"Rice",         "E", "Boiled water C",  600, ZoneSet::Triple, 1960,  15, 0.045, 28},
    {"Rice",         "F", "Boiled water C",  600, ZoneSet::Triple, 2100,  13, 0.039, 33},
    {"Beef",         "A", "Boiled water A",  250, ZoneSet::Small,  4550, 120, 0.27,   5},
    {"Beef",         "B", "Boiled water A",  250, ZoneSet::Small,  6650, 110, 0.18,   9},
    {"Beef",         "C", "Boiled water B",  500, ZoneSet::Double, 6900,  90, 0.27,  12},
    {"Beef",         "D", "Boiled water B",  500, ZoneSet::Double, 7000,  85, 0.18,  16},
    {"Beef",         "E", "Boiled water C",  750, ZoneSet::Triple, 7350,  60, 0.27,  21},
    {"Beef",         "F", "Boiled water C",  750, ZoneSet::Triple, 7550,  55, 0.18,  27},
    {"Potatoes",     "A", "Boiled water A",  200, ZoneSet::Small,  1750,  42, 0.066,  3},
    {"Potatoes",     "B", "Boiled water A",  200, ZoneSet::Small,  1890,  40, 0.06,  11},
    {"Potatoes",     "C", "Boiled water B",  400, ZoneSet::Double, 2100,  32, 0.066, 19},
    {"Potatoes",     "D", "Boiled water B",  400, ZoneSet::Double, 2240,  30, 0.06,  23},
    {"Potatoes",     "E", "Boiled water C",  600, ZoneSet::Triple, 2450,  22, 0.066, 26},
    {"Potatoes",     "F", "Boiled water C",  600, ZoneSet::Triple, 2590,  20, 0.06,  31},
    {"Mushrooms",    "A", nullptr,           200, ZoneSet::Small,   700,  38, 0.072, 11},
    {"Mushrooms",    "B", nullptr,           200, ZoneSet::Small,   840,  36, 0.06,  16},
    {"Mushrooms",    "C", nullptr,           300, ZoneSet::Double,  910,  25, 0.09,  19},
    {"Mushrooms",    "D", nullptr,           300, ZoneSet::Double, 1050,  23, 0.078, 20},
    {"Mushrooms",    "E", nullptr,           400, ZoneSet::Triple, 1120,  12, 0.108, 26},
    {"Mushrooms",    "F", nullptr,           400, ZoneSet::Triple, 1260,  10, 0.096, 29},
}};
// clang-format on

/// The reference order for one hob; `scale` multiplies every line.
inline Order reference_order(double scale = 1.0) {
    return {
        {"Boiled water", 5000 * scale}, {"Pasta", 1000 * scale},    {"Rice", 1500 * scale},
        {"Beef", 1000 * scale},         {"Potatoes", 1000 * scale}, {"Mushrooms", 500 * scale},
    };
}

/// The reference recipe catalog cooked on one standard hob per label. Each
/// recipe may use the matching zones of every hob.
inline Scenario reference_kitchen(std::vector<std::string> const& hob_labels, Order order) {
    Scenario s;
    for (auto const& label : hob_labels) {
        auto hob = build_standard_hob(label);
        s.resources.insert(s.resources.end(), hob.resources.begin(), hob.resources.end());
        s.exclusion_groups.insert(s.exclusion_groups.end(), hob.exclusion_groups.begin(),
                                  hob.exclusion_groups.end());
    }
    for (auto const& row : kReferenceRecipes) {
        Recipe r;
        r.food = row.food;
        r.variant = row.variant;
        if (row.predecessor) r.predecessor = row.predecessor;
        r.amount_g = row.amount_g;
        std::vector<int> rings;
        switch (row.zones) {
        case ZoneSet::Small: rings = {1, 2, 3, 4}; r.pot = "Pot(1)"; break;
        case ZoneSet::Double: rings = {5, 6}; r.pot = "Pot(2)"; break;
        case ZoneSet::Triple: rings = {7}; r.pot = "Pot(3)"; break;
        }
        for (auto const& label : hob_labels) {
            for (int ring : rings) r.zones.push_back(label + "(" + std::to_string(ring) + ")");
        }
        r.energy_kj = row.energy_kj;
        r.duration_min = row.duration_min;
        r.cost_eur = row.cost_eur;
        r.deficiency = row.deficiency;
        s.recipes.push_back(std::move(r));
    }
    s.order = std::move(order);
    return s;
}

/// One hob named "Hob", reference order.
inline Scenario single_hob_scenario() { return reference_kitchen({"Hob"}, reference_order()); }

/// Four hobs "Hob1".."Hob4", order scaled by four.
inline Scenario four_hob_scenario() {
    return reference_kitchen({"Hob1", "Hob2", "Hob3", "Hob4"}, reference_order(4.0));
}

} // namespace kitchenforge::catalog
