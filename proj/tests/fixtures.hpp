#pragma once

#include <kitchenforge/kitchenforge.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace kf_test {

using namespace kitchenforge;

// Metric records exactly as printed by the metrics exporter.
inline constexpr std::array<char const*, 2> kControlledLiterals{
    "ControlledMetricType[name=Boiled water A 0,\n"
    "allocation,valueType=ValueType.Nominal[name=\n"
    "Boiled water A 0 allocation type ,values={Hob(1)\n"
    "Pot(1), Hob(2) Pot(1), Hob(3) Pot(1), Hob(4) Pot(1),\n"
    "No allocation},typ=NOMINAL]",

    "ControlledMetricType[name= Boiled water B 0\n"
    "allocation,valueType=ValueType.Nominal[name=\n"
    "Boiled water B 0 allocation type ,values={Hob(5)\n"
    "Pot(2), Hob(6) Pot(2), No Allocation},typ=NOMINAL],\n"
    "units=n/a]",
};

inline constexpr std::array<char const*, 3> kObservableLiterals{
    "ObservableMetricType[name= Hob(6) availability,\n"
    "valueType=ValueType.Integer[min=0,max=0,typ=INT],\n"
    "units=n/a,sampleRate=SampleRate.EventDriven[]],",

    "ObservableMetricType[name=Boiled water A Hob(1)\n"
    "Pot(1) start, valueType=ValueType.Integer[min=0,\n"
    "max=0,typ=INT]",

    "ObservableMetricType[name=Boiled water A Hob(1)\n"
    "Pot(1) end, valueType=ValueType.Integer[min=40,\n"
    "max=40,typ=INT]",
};

inline std::string strip_ws(std::string_view s) {
    std::string out;
    for (char c : s) {
        if (!std::isspace(static_cast<unsigned char>(c))) out.push_back(c);
    }
    return out;
}

inline Recipe make_recipe(std::string food, std::string variant, std::vector<std::string> zones, double amount,
                          Minutes duration, double energy, double deficiency,
                          std::optional<std::string> predecessor = std::nullopt, std::string pot = "P") {
    Recipe r;
    r.food = std::move(food);
    r.variant = std::move(variant);
    r.predecessor = std::move(predecessor);
    r.amount_g = amount;
    r.zones = std::move(zones);
    r.pot = std::move(pot);
    r.energy_kj = energy;
    r.duration_min = duration;
    r.cost_eur = 0.01 * energy;
    r.deficiency = deficiency;
    return r;
}

/// A scenario with at most three slots on at most three single-pot zones.
/// Shapes cycle through independent foods, a predecessor pair, and
/// alternative recipes for one food; numbers are drawn from `rng`.
inline Scenario random_tiny_scenario(std::mt19937_64& rng, int shape) {
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    Scenario s;
    int zones = pick(1, 3);
    for (int z = 1; z <= zones; ++z) s.resources.push_back({"Z" + std::to_string(z), "P"});
    if (zones >= 2 && pick(0, 1)) s.exclusion_groups.push_back({{"Z1", "Z2"}});
    auto some_zones = [&] {
        std::vector<std::string> out;
        for (int z = 1; z <= zones; ++z) {
            if (pick(0, 1)) out.push_back("Z" + std::to_string(z));
        }
        if (out.empty()) out.push_back("Z" + std::to_string(pick(1, zones)));
        return out;
    };
    auto energy = [&] { return static_cast<double>(pick(1, 9) * 100); };
    auto defect = [&] { return static_cast<double>(pick(0, 20)); };
    s.setup_duration = pick(0, 1) ? 10 : 0;

    switch (shape % 3) {
    case 0: // two or three independent foods, one slot each
    {
        int const foods = pick(2, 3);
        for (int f = 0; f < foods; ++f) {
            std::string food = "F" + std::to_string(f);
            s.recipes.push_back(make_recipe(food, "A", some_zones(), 100, pick(5, 40), energy(), defect()));
            s.order[food] = 100;
        }
        break;
    }
    case 1: // a predecessor recipe feeding one successor, maybe a side dish
    {
        s.recipes.push_back(make_recipe("Water", "A", some_zones(), 1000, pick(5, 20), energy(), defect()));
        s.recipes.push_back(
            make_recipe("Pasta", "A", some_zones(), 100, pick(10, 40), energy(), defect(), "Water A"));
        s.order["Pasta"] = 100;
        if (pick(0, 1)) {
            s.recipes.push_back(make_recipe("Tea", "A", some_zones(), 100, pick(5, 40), energy(), defect()));
            s.order["Tea"] = 100;
        }
        break;
    }
    default: // one food with two alternative recipes and a second food
        s.recipes.push_back(make_recipe("Soup", "A", some_zones(), 100, pick(5, 40), energy(), defect()));
        s.recipes.push_back(make_recipe("Soup", "B", some_zones(), 100, pick(5, 40), energy(), defect()));
        s.recipes.push_back(make_recipe("Tea", "A", some_zones(), 100, pick(5, 40), energy(), defect()));
        s.order["Soup"] = 100;
        s.order["Tea"] = pick(0, 1) ? 100 : 0;
        break;
    }
    return s;
}

using Point = std::tuple<double, double, double, bool>;

inline std::set<Point> point_set(std::vector<ObjectiveVector> const& v) {
    std::set<Point> out;
    for (auto const& o : v) out.insert({o.makespan, o.energy, o.deficiency, o.feasible()});
    return out;
}

inline std::set<Point> point_set(ParetoArchive const& a) {
    std::vector<ObjectiveVector> v;
    for (auto const& e : a.entries()) v.push_back(e.objectives);
    return point_set(v);
}

/// Resource index of a zone, by name.
inline std::size_t zone_index(Instance const& inst, std::string const& zone) {
    return *inst.scenario().find_resource(zone);
}

/// Chromosome allocating the given slots (by name) to zones with descending
/// priority in list order; every other slot stays unallocated.
inline Chromosome chromosome_for(Instance const& inst,
                                 std::vector<std::pair<std::string, std::string>> const& placements) {
    Chromosome c = all_unallocated(inst);
    auto prio = static_cast<std::uint32_t>(inst.slot_count());
    for (auto const& [slot_name, zone] : placements) {
        auto slot = *inst.find_slot(slot_name);
        auto const& domain = inst.domain(slot);
        auto it = std::find(domain.begin(), domain.end(), zone_index(inst, zone));
        c.genes[slot].allocation = static_cast<std::uint32_t>(it - domain.begin());
        c.genes[slot].priority = --prio;
    }
    return c;
}

/// Independent audit of a decoded schedule: every problem found, as text.
/// Checks lane overlaps, exclusion overlaps between conflicting zones,
/// predecessor ordering, task durations, and that each allocated slot's main
/// task ran exactly once on its allocated resource.
inline std::vector<std::string> audit_schedule(Schedule const& schedule, Chromosome const& c, Instance const& inst) {
    std::vector<std::string> problems;
    auto const& s = inst.scenario();
    std::size_t const R = s.resources.size();
    std::vector<char> exclusive(R * R, 0);
    for (std::size_t a = 0; a < R; ++a) {
        for (std::size_t b = 0; b < R; ++b) exclusive[a * R + b] = s.excludes(s.resources[a].zone, s.resources[b].zone);
    }
    std::vector<Task> all;
    for (std::size_t r = 0; r < schedule.lanes.size(); ++r) {
        for (auto const& t : schedule.lanes[r]) {
            if (t.resource != r) problems.push_back("task filed under the wrong resource");
            if (t.end <= t.start) problems.push_back("empty or negative task");
            all.push_back(t);
        }
    }
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            auto const& a = all[i];
            auto const& b = all[j];
            bool overlap = a.start < b.end && b.start < a.end;
            if (!overlap) continue;
            auto const& za = s.resources[a.resource].zone;
            auto const& zb = s.resources[b.resource].zone;
            if (a.resource == b.resource) problems.push_back("overlap on " + za);
            else if (exclusive[a.resource * R + b.resource]) problems.push_back("exclusion overlap " + za + " / " + zb);
        }
    }
    std::vector<int> mains(inst.slot_count(), 0);
    for (auto const& t : all) {
        auto recipe = inst.slots()[t.slot].recipe;
        Minutes main_len = inst.main_duration(recipe, t.resource);
        if (t.kind == TaskKind::Main) {
            ++mains[t.slot];
            if (t.end - t.start != main_len) problems.push_back("main duration of " + inst.slots()[t.slot].name);
            if (!is_allocated(inst, c, t.slot) || allocated_resource(inst, c, t.slot) != t.resource)
                problems.push_back("main on a resource it was not allocated to");
            if (auto p = inst.predecessor(recipe)) {
                bool ok = false;
                for (auto const& u : all) {
                    if (u.kind == TaskKind::Main && inst.slots()[u.slot].recipe == *p && u.end <= t.start) ok = true;
                }
                if (!ok) problems.push_back("predecessor not finished before " + inst.slots()[t.slot].name);
            }
        } else if (t.kind == TaskKind::Subtask) {
            if (t.end - t.start != std::max<Minutes>(1, main_len / 10)) problems.push_back("subtask duration");
        } else if (t.end - t.start != inst.setup_duration()) {
            problems.push_back("setup duration");
        }
    }
    if (schedule.status == ScheduleStatus::Succeeded) {
        for (std::size_t sl = 0; sl < inst.slot_count(); ++sl) {
            int expected = is_allocated(inst, c, sl) ? 1 : 0;
            if (mains[sl] != expected) problems.push_back("slot " + inst.slots()[sl].name + " ran " +
                                                          std::to_string(mains[sl]) + " times");
        }
    }
    return problems;
}

/// Totals re-accumulated from the schedule's tasks in lane order.
inline ObjectiveVector reaccumulate(Schedule const& schedule, Instance const& inst) {
    ObjectiveVector v;
    std::map<std::string, double> produced;
    for (auto const& lane : schedule.lanes) {
        for (auto const& t : lane) {
            v.makespan = std::max(v.makespan, static_cast<double>(t.end));
            if (t.kind != TaskKind::Main) continue;
            auto const& r = inst.recipe_of(t.slot);
            v.energy += r.energy_kj;
            v.deficiency += inst.deficiency(inst.slots()[t.slot].recipe);
            v.cost += r.cost_eur;
            produced[r.food] += r.amount_g;
        }
    }
    for (auto const& [food, grams] : inst.scenario().order) v.coverage_shortfall += std::max(0.0, grams - produced[food]);
    v.schedulable = schedule.status == ScheduleStatus::Succeeded;
    return v;
}

inline bool close_rel(double a, double b, double rel = 1e-9) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

} // namespace kf_test
