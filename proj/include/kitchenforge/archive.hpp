#pragma once

#include "decoder.hpp"
#include "objectives.hpp"

#include <algorithm>
#include <tuple>
#include <vector>

namespace kitchenforge {

struct ArchiveEntry {
    Chromosome chromosome;
    ObjectiveVector objectives;
};

/// Mutually non-dominated solutions under constrained domination. Only the
/// first solution seen for a given objective point is kept.
class ParetoArchive {
public:
    /// Returns true when the candidate entered the archive.
    bool insert(Chromosome const& chromosome, ObjectiveVector const& objectives) {
        for (auto const& e : entries_) {
            if (dominates(e.objectives, objectives) || same_rank_point(e.objectives, objectives)) return false;
        }
        std::erase_if(entries_, [&](ArchiveEntry const& e) { return dominates(objectives, e.objectives); });
        entries_.push_back({chromosome, objectives});
        return true;
    }

    [[nodiscard]] std::vector<ArchiveEntry> const& entries() const noexcept { return entries_; }
    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] bool empty() const noexcept { return entries_.empty(); }

    /// Entries ordered by makespan, then energy, then deficiency.
    [[nodiscard]] std::vector<ArchiveEntry> sorted() const {
        auto out = entries_;
        std::stable_sort(out.begin(), out.end(), [](ArchiveEntry const& a, ArchiveEntry const& b) {
            auto const& x = a.objectives;
            auto const& y = b.objectives;
            return std::tie(x.makespan, x.energy, x.deficiency) < std::tie(y.makespan, y.energy, y.deficiency);
        });
        return out;
    }

private:
    std::vector<ArchiveEntry> entries_;
};

} // namespace kitchenforge
