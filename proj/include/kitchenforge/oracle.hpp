#pragma once

// Exhaustive Pareto enumeration for toy instances. Every allocation vector is
// combined with every ordering of its allocated slots; each combination goes
// through the same decoder the optimizer uses.

#include "archive.hpp"
#include "decoder.hpp"
#include "error.hpp"
#include "instance.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <vector>

namespace kitchenforge {

struct EnumerationBudget {
    unsigned long long max_combinations = 1'000'000;
};

/// Σ over allocation vectors of (allocated slots)!.
inline long double count_combinations(Instance const& inst) {
    // coeff[k] = number of allocation vectors with exactly k allocated slots
    std::vector<long double> coeff{1.0L};
    for (std::size_t s = 0; s < inst.slot_count(); ++s) {
        auto d = static_cast<long double>(inst.domain(s).size());
        std::vector<long double> next(coeff.size() + 1, 0.0L);
        for (std::size_t k = 0; k < coeff.size(); ++k) {
            next[k] += coeff[k];
            next[k + 1] += coeff[k] * d;
        }
        coeff = std::move(next);
    }
    long double total = 0.0L;
    long double factorial = 1.0L;
    for (std::size_t k = 0; k < coeff.size(); ++k) {
        if (k > 0) factorial *= static_cast<long double>(k);
        total += coeff[k] * factorial;
    }
    return total;
}

/// The non-dominated objective vectors (constrained domination) over all
/// combinations, ordered by makespan, energy, deficiency. Throws
/// BudgetExceeded before doing any work when the instance is too large.
inline std::vector<ObjectiveVector> enumerate_pareto(Instance const& inst, EnumerationBudget budget = {}) {
    if (budget.max_combinations == 0) throw std::invalid_argument("enumeration budget must be > 0");
    auto combos = count_combinations(inst);
    if (combos > static_cast<long double>(budget.max_combinations)) {
        auto const saturated = static_cast<long double>(std::numeric_limits<unsigned long long>::max());
        throw BudgetExceeded(combos >= saturated ? std::numeric_limits<unsigned long long>::max()
                                                 : static_cast<unsigned long long>(combos));
    }

    std::size_t const L = inst.slot_count();
    ParetoArchive front;
    Chromosome c;
    c.genes.assign(L, Gene{0, 0});
    std::vector<std::size_t> allocated;
    while (true) {
        allocated.clear();
        for (std::size_t s = 0; s < L; ++s) {
            if (is_allocated(inst, c, s)) allocated.push_back(s);
        }
        // allocated is sorted, i.e. the first permutation
        do {
            for (std::size_t s = 0; s < L; ++s) c.genes[s].priority = 0;
            for (std::size_t j = 0; j < allocated.size(); ++j)
                c.genes[allocated[j]].priority = static_cast<std::uint32_t>(L - 1 - j);
            front.insert(c, assess(c, inst));
        } while (std::next_permutation(allocated.begin(), allocated.end()));

        // next allocation vector, mixed radix over domain sizes
        std::size_t s = 0;
        for (; s < L; ++s) {
            if (++c.genes[s].allocation < inst.domain_size(s)) break;
            c.genes[s].allocation = 0;
        }
        if (s == L) break;
    }

    std::vector<ObjectiveVector> out;
    for (auto const& e : front.sorted()) out.push_back(e.objectives);
    return out;
}

} // namespace kitchenforge
