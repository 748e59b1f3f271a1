#pragma once

#include "error.hpp"
#include "scenario.hpp"

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace kitchenforge {

/// Checks that an effect references entities of `s`; throws ValidationError.
inline void check_effect(Scenario const& s, ObservableEffect const& effect) {
    std::visit(
        [&](auto const& e) {
            using T = std::decay_t<decltype(e)>;
            if constexpr (std::is_same_v<T, ResourceUnavailable>) {
                bool known = std::any_of(s.resources.begin(), s.resources.end(), [&](Resource const& r) {
                    return r.zone == e.target || r.pot == e.target;
                });
                if (!known) throw ValidationError("unavailable: unknown zone or pot '" + e.target + "'");
            } else if constexpr (std::is_same_v<T, DurationOverride>) {
                if (!s.find_recipe(e.recipe))
                    throw ValidationError("duration override: unknown recipe '" + e.recipe + "'");
                auto r = s.find_resource(e.zone);
                if (!r || s.resources[*r].pot != e.pot)
                    throw ValidationError("duration override: unknown resource '" + e.zone + " " + e.pot + "'");
                if (e.end <= e.start) throw ValidationError("duration override must end after it starts");
            } else {
                if (!s.find_recipe(e.recipe))
                    throw ValidationError("quality update: unknown recipe '" + e.recipe + "'");
                if (e.deficiency < 0.0) throw ValidationError("quality update: negative deficiency");
            }
        },
        effect);
}

/// Returns a copy of `s` with `effect` appended to its overrides.
inline Scenario apply_effect(Scenario s, ObservableEffect const& effect) {
    check_effect(s, effect);
    s.overrides.push_back(effect);
    return s;
}

/// A scenario compiled for decoding: instance slots, per-slot allocation
/// domains, conflict adjacency and effective durations with every override
/// folded in. Immutable after construction and safe to share across threads.
class Instance {
public:
    explicit Instance(Scenario scenario) : scenario_(std::move(scenario)) {
        validate(scenario_);
        for (auto const& e : scenario_.overrides) check_effect(scenario_, e);
        compile();
    }

    [[nodiscard]] Scenario const& scenario() const noexcept { return scenario_; }
    [[nodiscard]] std::vector<InstanceSlot> const& slots() const noexcept { return slots_; }
    [[nodiscard]] std::size_t slot_count() const noexcept { return slots_.size(); }
    [[nodiscard]] std::size_t resource_count() const noexcept { return scenario_.resources.size(); }
    [[nodiscard]] Minutes setup_duration() const noexcept { return scenario_.setup_duration; }

    [[nodiscard]] Recipe const& recipe_of(std::size_t slot) const { return scenario_.recipes[slots_[slot].recipe]; }
    [[nodiscard]] Recipe const& recipe(std::size_t r) const { return scenario_.recipes[r]; }
    [[nodiscard]] Resource const& resource(std::size_t r) const { return scenario_.resources[r]; }

    /// Resources slot `s` may run on, in recipe zone order. The allocation
    /// index `domain(s).size()` means "No allocation".
    [[nodiscard]] std::vector<std::size_t> const& domain(std::size_t slot) const { return domains_[slot]; }
    [[nodiscard]] std::size_t domain_size(std::size_t slot) const { return domains_[slot].size() + 1; }
    [[nodiscard]] std::size_t no_allocation(std::size_t slot) const { return domains_[slot].size(); }

    [[nodiscard]] bool available(std::size_t resource) const { return available_[resource]; }

    /// Resources that may not overlap in time with `resource` (never itself).
    [[nodiscard]] std::vector<std::size_t> const& conflicts(std::size_t resource) const {
        return conflicts_[resource];
    }

    [[nodiscard]] std::optional<std::size_t> predecessor(std::size_t recipe) const { return predecessor_[recipe]; }
    [[nodiscard]] std::vector<std::size_t> const& slots_of_recipe(std::size_t recipe) const {
        return recipe_slots_[recipe];
    }

    /// A recipe is runnable when it has an allocatable zone and its whole
    /// predecessor chain is runnable and has slots.
    [[nodiscard]] bool runnable(std::size_t recipe) const { return runnable_[recipe]; }

    [[nodiscard]] Minutes main_duration(std::size_t recipe, std::size_t resource) const {
        if (auto it = duration_override_.find({recipe, resource}); it != duration_override_.end()) return it->second;
        return scenario_.recipes[recipe].duration_min;
    }
    [[nodiscard]] double deficiency(std::size_t recipe) const { return deficiency_[recipe]; }

    /// Food types with a positive order, sorted by name; index is the food id.
    [[nodiscard]] std::vector<std::string> const& ordered_foods() const noexcept { return foods_; }
    [[nodiscard]] std::vector<double> const& required_grams() const noexcept { return required_; }
    /// Food id of a recipe, or nullopt when its food is not ordered.
    [[nodiscard]] std::optional<std::size_t> food_of(std::size_t recipe) const { return food_of_[recipe]; }

    /// Ordered foods that no allocatable recipe can produce.
    [[nodiscard]] std::vector<std::string> uncoverable_foods() const {
        std::vector<std::string> out;
        for (std::size_t f = 0; f < foods_.size(); ++f) {
            double capacity = 0.0;
            for (std::size_t r = 0; r < scenario_.recipes.size(); ++r) {
                if (food_of_[r] == f && runnable_[r])
                    capacity += static_cast<double>(recipe_slots_[r].size()) * scenario_.recipes[r].amount_g;
            }
            if (capacity < required_[f]) out.push_back(foods_[f]);
        }
        return out;
    }

    [[nodiscard]] std::optional<std::size_t> find_slot(std::string const& name) const {
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (slots_[i].name == name) return i;
        }
        return std::nullopt;
    }

    [[nodiscard]] std::optional<std::size_t> find_resource_by_display(std::string const& name) const {
        for (std::size_t i = 0; i < scenario_.resources.size(); ++i) {
            if (scenario_.resources[i].display_name() == name) return i;
        }
        return std::nullopt;
    }

private:
    void compile() {
        auto const& s = scenario_;
        std::size_t const R = s.resources.size();
        std::size_t const N = s.recipes.size();

        available_.assign(R, true);
        deficiency_.resize(N);
        for (std::size_t r = 0; r < N; ++r) deficiency_[r] = s.recipes[r].deficiency;
        for (auto const& effect : s.overrides) {
            if (auto const* u = std::get_if<ResourceUnavailable>(&effect)) {
                for (std::size_t i = 0; i < R; ++i) {
                    if (s.resources[i].zone == u->target || s.resources[i].pot == u->target) available_[i] = false;
                }
            } else if (auto const* d = std::get_if<DurationOverride>(&effect)) {
                duration_override_[{*s.find_recipe(d->recipe), *s.find_resource(d->zone)}] = d->duration();
            } else if (auto const* q = std::get_if<QualityUpdate>(&effect)) {
                deficiency_[*s.find_recipe(q->recipe)] = q->deficiency;
            }
        }

        conflicts_.assign(R, {});
        for (std::size_t a = 0; a < R; ++a) {
            for (std::size_t b = 0; b < R; ++b) {
                if (s.excludes(s.resources[a].zone, s.resources[b].zone)) conflicts_[a].push_back(b);
            }
        }

        predecessor_.assign(N, std::nullopt);
        for (std::size_t r = 0; r < N; ++r) {
            if (s.recipes[r].predecessor) predecessor_[r] = s.find_recipe(*s.recipes[r].predecessor);
        }

        slots_ = expand_instances(s);
        recipe_slots_.assign(N, {});
        domains_.resize(slots_.size());
        std::vector<std::vector<std::size_t>> recipe_domain(N);
        for (std::size_t r = 0; r < N; ++r) {
            for (auto const& z : s.recipes[r].zones) {
                auto idx = *s.find_resource(z);
                if (available_[idx]) recipe_domain[r].push_back(idx);
            }
        }
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            recipe_slots_[slots_[i].recipe].push_back(i);
            domains_[i] = recipe_domain[slots_[i].recipe];
        }

        runnable_.assign(N, false);
        for (std::size_t r = 0; r < N; ++r) {
            std::size_t cur = r;
            bool ok = true;
            for (std::size_t depth = 0; depth <= N; ++depth) {
                if (recipe_domain[cur].empty() || recipe_slots_[cur].empty()) {
                    ok = false;
                    break;
                }
                if (!predecessor_[cur]) break;
                cur = *predecessor_[cur];
                if (depth == N) ok = false; // cyclic chain
            }
            runnable_[r] = ok;
        }

        for (auto const& [food, grams] : s.order) {
            if (grams > 0.0) {
                foods_.push_back(food);
                required_.push_back(grams);
            }
        }
        food_of_.assign(N, std::nullopt);
        for (std::size_t r = 0; r < N; ++r) {
            auto it = std::find(foods_.begin(), foods_.end(), s.recipes[r].food);
            if (it != foods_.end()) food_of_[r] = static_cast<std::size_t>(it - foods_.begin());
        }
    }

    Scenario scenario_;
    std::vector<InstanceSlot> slots_;
    std::vector<std::vector<std::size_t>> domains_;
    std::vector<bool> available_;
    std::vector<std::vector<std::size_t>> conflicts_;
    std::vector<std::optional<std::size_t>> predecessor_;
    std::vector<std::vector<std::size_t>> recipe_slots_;
    std::vector<bool> runnable_;
    std::map<std::pair<std::size_t, std::size_t>, Minutes> duration_override_;
    std::vector<double> deficiency_;
    std::vector<std::string> foods_;
    std::vector<double> required_;
    std::vector<std::optional<std::size_t>> food_of_;
};

} // namespace kitchenforge
