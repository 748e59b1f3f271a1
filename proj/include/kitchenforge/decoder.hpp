#pragma once

// Kitchen digital twin: turns a chromosome into a timed schedule by
// priority-driven list scheduling and scores the result.

#include "instance.hpp"
#include "objectives.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <vector>

namespace kitchenforge {

/// Allocation index into the slot's domain (domain size means "No
/// allocation") and a priority; higher priority is scheduled first.
struct Gene {
    std::uint32_t allocation = 0;
    std::uint32_t priority = 0;
    bool operator==(Gene const&) const = default;
};

struct Chromosome {
    std::vector<Gene> genes;
    bool operator==(Chromosome const&) const = default;
};

inline bool is_allocated(Instance const& inst, Chromosome const& c, std::size_t slot) {
    return c.genes[slot].allocation < inst.domain(slot).size();
}

inline std::size_t allocated_resource(Instance const& inst, Chromosome const& c, std::size_t slot) {
    return inst.domain(slot)[c.genes[slot].allocation];
}

/// True when `c` has one gene per slot with allocations inside their domains
/// and priorities in [0, slot count).
inline bool valid_for(Instance const& inst, Chromosome const& c) {
    if (c.genes.size() != inst.slot_count()) return false;
    for (std::size_t s = 0; s < c.genes.size(); ++s) {
        if (c.genes[s].allocation >= inst.domain_size(s)) return false;
        if (c.genes[s].priority >= inst.slot_count()) return false;
    }
    return true;
}

inline Chromosome all_unallocated(Instance const& inst) {
    Chromosome c;
    c.genes.resize(inst.slot_count());
    for (std::size_t s = 0; s < inst.slot_count(); ++s) {
        c.genes[s] = {static_cast<std::uint32_t>(inst.no_allocation(s)), 0};
    }
    return c;
}

enum class TaskKind { Main, Subtask, Setup };

struct Task {
    TaskKind kind = TaskKind::Main;
    std::size_t slot = 0;     // for Setup: the slot whose Main follows
    std::size_t resource = 0;
    Minutes start = 0;
    Minutes end = 0;
    std::size_t setup_from = 0; // recipe index, Setup only
    std::size_t setup_to = 0;   // recipe index, Setup only

    bool operator==(Task const&) const = default;
};

enum class ScheduleStatus { Succeeded, Infeasible };

struct Schedule {
    /// Tasks per resource, sorted by start, pairwise disjoint.
    std::vector<std::vector<Task>> lanes;
    ScheduleStatus status = ScheduleStatus::Succeeded;
    std::string reason;

    [[nodiscard]] bool empty() const {
        return std::all_of(lanes.begin(), lanes.end(), [](auto const& l) { return l.empty(); });
    }

    bool operator==(Schedule const&) const = default;
};

/// Pre-cooking subtask length: 10% of the main task, rounded down, at least 1.
constexpr Minutes subtask_duration(Minutes main_duration) {
    return std::max<Minutes>(1, main_duration / 10);
}

namespace detail {

// Earliest t >= from such that [t, t + length) avoids every interval on the
// conflicting resources. Lanes are sorted by start and disjoint.
inline Minutes earliest_slot(std::vector<std::vector<Task>> const& lanes, std::vector<std::size_t> const& conflicts,
                             Minutes from, Minutes length) {
    Minutes t = from;
    bool moved = true;
    while (moved) {
        moved = false;
        for (auto q : conflicts) {
            auto const& lane = lanes[q];
            auto it = std::upper_bound(lane.begin(), lane.end(), t,
                                       [](Minutes value, Task const& task) { return value < task.end; });
            if (it != lane.end() && it->start < t + length) {
                t = it->end;
                moved = true;
            }
        }
    }
    return t;
}

} // namespace detail

/// Repeatedly takes the highest-priority allocated slot whose predecessor
/// recipe already has a scheduled main task (ties: lower slot index) and
/// appends to its resource: a setup when the previous main there cooked a
/// different recipe, the pre-cooking subtask when the recipe has a
/// predecessor, then the main task no earlier than the first predecessor
/// completion. Every task also waits for conflicting resources to be idle.
inline Schedule decode(Chromosome const& chromosome, Instance const& inst) {
    std::size_t const L = inst.slot_count();
    std::size_t const R = inst.resource_count();
    std::size_t const N = inst.scenario().recipes.size();

    Schedule out;
    out.lanes.assign(R, {});
    std::vector<Minutes> free_at(R, 0);
    std::vector<std::optional<std::size_t>> last_recipe(R);
    std::vector<std::optional<Minutes>> first_done(N);
    std::vector<std::vector<std::size_t>> waiting(N);

    auto cmp = [&](std::size_t a, std::size_t b) {
        auto pa = chromosome.genes[a].priority;
        auto pb = chromosome.genes[b].priority;
        if (pa != pb) return pa < pb;
        return a > b;
    };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);

    std::size_t pending = 0;
    for (std::size_t s = 0; s < L; ++s) {
        if (!is_allocated(inst, chromosome, s)) continue;
        auto recipe = inst.slots()[s].recipe;
        if (auto p = inst.predecessor(recipe)) {
            waiting[*p].push_back(s);
            ++pending;
        } else {
            ready.push(s);
        }
    }

    auto place = [&](std::size_t res, Minutes from, Minutes length, Task task) {
        Minutes start = detail::earliest_slot(out.lanes, inst.conflicts(res), std::max(from, free_at[res]), length);
        task.resource = res;
        task.start = start;
        task.end = start + length;
        out.lanes[res].push_back(task);
        free_at[res] = task.end;
        return task.end;
    };

    while (!ready.empty()) {
        std::size_t s = ready.top();
        ready.pop();
        std::size_t recipe = inst.slots()[s].recipe;
        std::size_t res = allocated_resource(inst, chromosome, s);
        Minutes duration = inst.main_duration(recipe, res);

        if (last_recipe[res] && *last_recipe[res] != recipe && inst.setup_duration() > 0) {
            Task setup{TaskKind::Setup, s, res, 0, 0, *last_recipe[res], recipe};
            place(res, 0, inst.setup_duration(), setup);
        }
        Minutes release = 0;
        if (auto p = inst.predecessor(recipe)) {
            place(res, 0, subtask_duration(duration), Task{TaskKind::Subtask, s});
            release = *first_done[*p];
        }
        Minutes end = place(res, release, duration, Task{TaskKind::Main, s});
        last_recipe[res] = recipe;

        bool first = !first_done[recipe];
        if (first || end < *first_done[recipe]) first_done[recipe] = end;
        if (first) {
            for (auto w : waiting[recipe]) ready.push(w);
            pending -= waiting[recipe].size();
            waiting[recipe].clear();
        }
    }

    if (pending > 0) {
        out.status = ScheduleStatus::Infeasible;
        out.reason = "circular-predecessor";
    }
    return out;
}

/// Sums per executed main task, accumulated in slot order so equal
/// multisets of executions give bit-identical totals.
inline ObjectiveVector evaluate(Schedule const& schedule, Instance const& inst) {
    std::vector<bool> executed(inst.slot_count(), false);
    ObjectiveVector v;
    Minutes makespan = 0;
    for (auto const& lane : schedule.lanes) {
        for (auto const& t : lane) {
            makespan = std::max(makespan, t.end);
            if (t.kind == TaskKind::Main) executed[t.slot] = true;
        }
    }
    v.makespan = static_cast<double>(makespan);
    std::vector<double> produced(inst.ordered_foods().size(), 0.0);
    for (std::size_t s = 0; s < inst.slot_count(); ++s) {
        if (!executed[s]) continue;
        auto recipe = inst.slots()[s].recipe;
        auto const& r = inst.recipe(recipe);
        v.energy += r.energy_kj;
        v.deficiency += inst.deficiency(recipe);
        v.cost += r.cost_eur;
        if (auto f = inst.food_of(recipe)) produced[*f] += r.amount_g;
    }
    for (std::size_t f = 0; f < produced.size(); ++f) {
        v.coverage_shortfall += std::max(0.0, inst.required_grams()[f] - produced[f]);
    }
    v.schedulable = schedule.status == ScheduleStatus::Succeeded;
    return v;
}

inline ObjectiveVector evaluate(Schedule const& schedule, Chromosome const&, Instance const& inst) {
    return evaluate(schedule, inst);
}

/// decode followed by evaluate.
inline ObjectiveVector assess(Chromosome const& c, Instance const& inst) { return evaluate(decode(c, inst), inst); }

/// Makes a chromosome cover the order:
///  1. drops allocations of recipes that can never run,
///  2. while a food is short, allocates a uniformly chosen unallocated slot of
///     a runnable recipe for that food to a uniformly chosen resource,
///  3. gives every allocated successor at least one allocated predecessor.
/// A chromosome that already satisfies all three is returned unchanged.
template <typename Rng>
Chromosome repair(Chromosome c, Instance const& inst, Rng& rng) {
    std::size_t const L = inst.slot_count();
    auto allocate = [&](std::size_t slot) {
        std::uniform_int_distribution<std::size_t> pick(0, inst.domain(slot).size() - 1);
        c.genes[slot].allocation = static_cast<std::uint32_t>(pick(rng));
    };

    for (std::size_t s = 0; s < L; ++s) {
        if (is_allocated(inst, c, s) && !inst.runnable(inst.slots()[s].recipe))
            c.genes[s].allocation = static_cast<std::uint32_t>(inst.no_allocation(s));
    }

    auto const& required = inst.required_grams();
    std::vector<double> produced(required.size(), 0.0);
    for (std::size_t s = 0; s < L; ++s) {
        if (!is_allocated(inst, c, s)) continue;
        auto recipe = inst.slots()[s].recipe;
        if (auto f = inst.food_of(recipe)) produced[*f] += inst.recipe(recipe).amount_g;
    }
    std::vector<std::size_t> candidates;
    while (true) {
        candidates.clear();
        for (std::size_t s = 0; s < L; ++s) {
            if (is_allocated(inst, c, s)) continue;
            auto recipe = inst.slots()[s].recipe;
            auto f = inst.food_of(recipe);
            if (f && produced[*f] < required[*f] && inst.runnable(recipe)) candidates.push_back(s);
        }
        if (candidates.empty()) break;
        std::uniform_int_distribution<std::size_t> pick(0, candidates.size() - 1);
        auto s = candidates[pick(rng)];
        allocate(s);
        auto recipe = inst.slots()[s].recipe;
        produced[*inst.food_of(recipe)] += inst.recipe(recipe).amount_g;
    }

    for (bool changed = true; changed;) {
        changed = false;
        for (std::size_t s = 0; s < L; ++s) {
            if (!is_allocated(inst, c, s)) continue;
            auto pred = inst.predecessor(inst.slots()[s].recipe);
            if (!pred) continue;
            auto const& pred_slots = inst.slots_of_recipe(*pred);
            if (std::any_of(pred_slots.begin(), pred_slots.end(),
                            [&](std::size_t p) { return is_allocated(inst, c, p); }))
                continue;
            std::uniform_int_distribution<std::size_t> pick(0, pred_slots.size() - 1);
            allocate(pred_slots[pick(rng)]);
            changed = true;
        }
    }
    return c;
}

} // namespace kitchenforge
