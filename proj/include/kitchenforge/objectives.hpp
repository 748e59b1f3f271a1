#pragma once

#include <array>
#include <cmath>

namespace kitchenforge {

/// Makespan, energy and deficiency are optimized; cost is only reported.
struct ObjectiveVector {
    double makespan = 0.0;   // minutes
    double energy = 0.0;     // kJ
    double deficiency = 0.0; // dimensionless
    double cost = 0.0;       // euro
    double coverage_shortfall = 0.0; // grams still missing from the order
    bool schedulable = true;         // false when some allocated slot could not be placed

    [[nodiscard]] bool feasible() const noexcept { return schedulable && coverage_shortfall <= 0.0; }

    /// Ranking key among infeasible vectors; unschedulable is worse than any shortfall.
    [[nodiscard]] double violation() const noexcept {
        return coverage_shortfall + (schedulable ? 0.0 : 1e12);
    }

    [[nodiscard]] std::array<double, 3> optimized() const noexcept { return {makespan, energy, deficiency}; }

    bool operator==(ObjectiveVector const&) const = default;
};

inline bool pareto_dominates(std::array<double, 3> const& a, std::array<double, 3> const& b) noexcept {
    bool strictly = false;
    for (std::size_t i = 0; i < 3; ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strictly = true;
    }
    return strictly;
}

/// Feasible beats infeasible; among infeasible the smaller violation wins;
/// otherwise plain Pareto dominance on the three optimized objectives.
inline bool dominates(ObjectiveVector const& a, ObjectiveVector const& b) noexcept {
    if (a.feasible() != b.feasible()) return a.feasible();
    if (!a.feasible() && a.violation() != b.violation()) return a.violation() < b.violation();
    return pareto_dominates(a.optimized(), b.optimized());
}

/// True when the two vectors are interchangeable for selection purposes.
inline bool same_rank_point(ObjectiveVector const& a, ObjectiveVector const& b) noexcept {
    return a.feasible() == b.feasible() && (a.feasible() || a.violation() == b.violation()) &&
           a.optimized() == b.optimized();
}

} // namespace kitchenforge
