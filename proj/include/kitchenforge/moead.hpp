#pragma once

// MOEA/D over allocation/priority chromosomes with Tchebycheff
// decomposition of (makespan, energy, deficiency).
//
// Generations are synchronous: every subproblem breeds one child from the
// population as it stood at the start of the generation, children are
// evaluated (optionally on several threads), the ideal point absorbs all of
// them, and then neighbor replacement and archive insertion run serially in
// subproblem order. Each child draws from its own RNG stream seeded by
// (seed, generation, subproblem), so results do not depend on worker count.

#include "archive.hpp"
#include "decoder.hpp"
#include "instance.hpp"
#include "objectives.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <stdexcept>
#include <thread>
#include <vector>

namespace kitchenforge {

using Point3 = std::array<double, 3>;

struct WeightVector {
    Point3 components{};
};

/// Simplex lattice with granularity H: all (i, j, H-i-j)/H. C(H+2, 2) vectors.
inline std::vector<WeightVector> simplex_lattice(int granularity) {
    if (granularity < 1) throw std::invalid_argument("lattice granularity must be >= 1");
    std::vector<WeightVector> out;
    double const h = granularity;
    for (int i = 0; i <= granularity; ++i) {
        for (int j = 0; j <= granularity - i; ++j) {
            out.push_back({{i / h, j / h, (granularity - i - j) / h}});
        }
    }
    return out;
}

/// The `t` nearest weights (Euclidean) of every weight, itself included.
/// Distance ties go to the lower index.
inline std::vector<std::vector<std::size_t>> weight_neighborhoods(std::vector<WeightVector> const& weights,
                                                                  std::size_t t) {
    std::vector<std::vector<std::size_t>> out(weights.size());
    std::vector<std::pair<double, std::size_t>> dist(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
        for (std::size_t j = 0; j < weights.size(); ++j) {
            double d = 0.0;
            for (std::size_t k = 0; k < 3; ++k) {
                double diff = weights[i].components[k] - weights[j].components[k];
                d += diff * diff;
            }
            dist[j] = {d, j};
        }
        std::sort(dist.begin(), dist.end());
        for (std::size_t k = 0; k < t; ++k) out[i].push_back(dist[k].second);
    }
    return out;
}

/// Per-objective [lo, hi] used for normalization.
struct ObjectiveBounds {
    Point3 lo{};
    Point3 hi{};
};

/// lo comes from the empty schedule (all zero); hi from executing every slot
/// one after another on its slowest resource with setup and subtask.
inline ObjectiveBounds objective_bounds(Instance const& inst) {
    ObjectiveBounds b;
    for (std::size_t s = 0; s < inst.slot_count(); ++s) {
        auto const& domain = inst.domain(s);
        if (domain.empty()) continue;
        auto recipe = inst.slots()[s].recipe;
        Minutes longest = 0;
        for (auto r : domain) longest = std::max(longest, inst.main_duration(recipe, r));
        Minutes serial = longest + inst.setup_duration();
        if (inst.predecessor(recipe)) serial += subtask_duration(longest);
        b.hi[0] += static_cast<double>(serial);
        b.hi[1] += inst.recipe(recipe).energy_kj;
        b.hi[2] += inst.deficiency(recipe);
    }
    return b;
}

inline Point3 normalize_objectives(ObjectiveVector const& v, ObjectiveBounds const& b) {
    Point3 raw = v.optimized();
    Point3 out{};
    for (std::size_t i = 0; i < 3; ++i) {
        double span = b.hi[i] - b.lo[i];
        out[i] = span > 0.0 ? std::clamp((raw[i] - b.lo[i]) / span, 0.0, 1.0) : 0.0;
    }
    return out;
}

/// max_i w_i |f_i - z_i|, with zero weights raised to 1e-6.
inline double tchebycheff(Point3 const& normalized, WeightVector const& weight, Point3 const& ideal) {
    double g = 0.0;
    for (std::size_t i = 0; i < 3; ++i) {
        double w = weight.components[i] == 0.0 ? 1e-6 : weight.components[i];
        g = std::max(g, w * std::abs(normalized[i] - ideal[i]));
    }
    return g;
}

/// Uniform crossover over whole gene pairs: each slot comes from `a` on heads.
template <typename Rng>
Chromosome crossover(Chromosome const& a, Chromosome const& b, Rng& rng) {
    if (a.genes.size() != b.genes.size()) throw std::invalid_argument("crossover: chromosome length mismatch");
    Chromosome child = a;
    std::bernoulli_distribution heads(0.5);
    for (std::size_t i = 0; i < a.genes.size(); ++i) {
        if (!heads(rng)) child.genes[i] = b.genes[i];
    }
    return child;
}

/// Each gene pair mutates with probability `rate`; a mutation resamples either
/// the allocation (over the full domain, "No allocation" included) or the
/// priority, with equal odds.
template <typename Rng>
Chromosome mutate(Chromosome c, double rate, Instance const& inst, Rng& rng) {
    if (rate < 0.0 || rate > 1.0) throw std::invalid_argument("mutation rate must be in [0, 1]");
    std::bernoulli_distribution hit(rate);
    std::bernoulli_distribution which(0.5);
    auto const L = c.genes.size();
    for (std::size_t s = 0; s < L; ++s) {
        if (!hit(rng)) continue;
        if (which(rng)) {
            std::uniform_int_distribution<std::uint32_t> alloc(0, static_cast<std::uint32_t>(inst.domain_size(s) - 1));
            c.genes[s].allocation = alloc(rng);
        } else {
            std::uniform_int_distribution<std::uint32_t> prio(0, static_cast<std::uint32_t>(L - 1));
            c.genes[s].priority = prio(rng);
        }
    }
    return c;
}

/// Uniformly random chromosome. Each individual draws its own allocation
/// density so the initial population spans sparse to dense selections.
template <typename Rng>
Chromosome random_chromosome(Instance const& inst, Rng& rng) {
    auto const L = inst.slot_count();
    Chromosome c;
    c.genes.resize(L);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double density = unit(rng);
    for (std::size_t s = 0; s < L; ++s) {
        auto const& domain = inst.domain(s);
        std::uint32_t alloc = static_cast<std::uint32_t>(inst.no_allocation(s));
        if (!domain.empty() && unit(rng) < density) {
            std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(domain.size() - 1));
            alloc = pick(rng);
        }
        std::uniform_int_distribution<std::uint32_t> prio(0, static_cast<std::uint32_t>(L - 1));
        c.genes[s] = {alloc, prio(rng)};
    }
    return c;
}

struct MoeadParams {
    int granularity = 12;   // H
    std::size_t neighbors = 10; // T
    int generations = 200;
    std::optional<double> mutation_rate; // default 1 / slot count
    std::uint64_t seed = 42;
    unsigned workers = 1;
    int max_replacements = 2;
};

struct RunStats {
    std::size_t evaluations = 0;
    double wall_seconds = 0.0;
    int generations = 0;
    std::size_t population = 0;
};

struct RunResult {
    ParetoArchive archive;
    RunStats stats;
    ObjectiveBounds bounds;
    Point3 ideal{};
};

/// State handed to an observer after each generation. `before`/`after` hold
/// the incumbents' objectives around the replacement phase, which compared
/// candidates against `ideal`.
struct GenerationSnapshot {
    int generation = 0;
    Point3 ideal{};
    std::vector<WeightVector> const* weights = nullptr;
    ObjectiveBounds const* bounds = nullptr;
    std::vector<ObjectiveVector> before;
    std::vector<ObjectiveVector> after;
};

using GenerationObserver = std::function<void(GenerationSnapshot const&)>;

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// one independent stream per (seed, generation, subproblem); seed_seq was the hot spot on tiny instances
inline std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t generation, std::uint64_t subproblem) {
    return std::mt19937_64(splitmix64(splitmix64(splitmix64(seed) ^ generation) ^ subproblem));
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

inline bool improves(ObjectiveVector const& child, Point3 const& child_norm, ObjectiveVector const& incumbent,
                     Point3 const& incumbent_norm, WeightVector const& w, Point3 const& ideal) {
    if (child.feasible() != incumbent.feasible()) return child.feasible();
    if (!child.feasible() && child.violation() != incumbent.violation())
        return child.violation() < incumbent.violation();
    return tchebycheff(child_norm, w, ideal) < tchebycheff(incumbent_norm, w, ideal);
}

} // namespace detail

inline void validate(MoeadParams const& p) {
    if (p.granularity < 1) throw std::invalid_argument("H must be >= 1");
    auto population = static_cast<std::size_t>((p.granularity + 1) * (p.granularity + 2) / 2);
    if (p.neighbors < 1 || p.neighbors > population)
        throw std::invalid_argument("T must be in [1, " + std::to_string(population) + "]");
    if (p.generations < 0) throw std::invalid_argument("generations must be >= 0");
    if (p.mutation_rate && (*p.mutation_rate < 0.0 || *p.mutation_rate > 1.0))
        throw std::invalid_argument("mutation rate must be in [0, 1]");
    if (p.max_replacements < 1) throw std::invalid_argument("replacement cap must be >= 1");
}

inline RunResult run_moead(Instance const& inst, MoeadParams const& params, GenerationObserver const& observer = {}) {
    validate(params);
    auto const t0 = std::chrono::steady_clock::now();
    auto const weights = simplex_lattice(params.granularity);
    auto const hood = weight_neighborhoods(weights, params.neighbors);
    std::size_t const P = weights.size();
    std::size_t const L = inst.slot_count();
    double const rate = params.mutation_rate.value_or(L > 0 ? 1.0 / static_cast<double>(L) : 0.0);

    RunResult result;
    result.bounds = objective_bounds(inst);
    result.stats.population = P;
    auto const& bounds = result.bounds;

    std::vector<Chromosome> pop(P);
    std::vector<ObjectiveVector> obj(P);
    std::vector<Point3> norm(P);
    detail::parallel_for(P, params.workers, [&](std::size_t i) {
        auto rng = detail::stream_rng(params.seed, 0, i);
        pop[i] = repair(random_chromosome(inst, rng), inst, rng);
        obj[i] = assess(pop[i], inst);
        norm[i] = normalize_objectives(obj[i], bounds);
    });
    result.stats.evaluations += P;

    Point3 ideal{1.0, 1.0, 1.0};
    for (std::size_t i = 0; i < P; ++i) {
        for (std::size_t k = 0; k < 3; ++k) ideal[k] = std::min(ideal[k], norm[i][k]);
        result.archive.insert(pop[i], obj[i]);
    }

    std::vector<Chromosome> child(P);
    std::vector<ObjectiveVector> child_obj(P);
    std::vector<Point3> child_norm(P);
    std::vector<std::vector<std::size_t>> order(P);

    for (int gen = 1; gen <= params.generations; ++gen) {
        detail::parallel_for(P, params.workers, [&](std::size_t i) {
            auto rng = detail::stream_rng(params.seed, static_cast<std::uint64_t>(gen), i);
            auto const& nb = hood[i];
            std::uniform_int_distribution<std::size_t> pick(0, nb.size() - 1);
            std::size_t a = nb[pick(rng)];
            std::size_t b = nb[pick(rng)];
            if (nb.size() > 1) {
                while (b == a) b = nb[pick(rng)];
            }
            auto c = crossover(pop[a], pop[b], rng);
            c = mutate(std::move(c), rate, inst, rng);
            child[i] = repair(std::move(c), inst, rng);
            child_obj[i] = assess(child[i], inst);
            child_norm[i] = normalize_objectives(child_obj[i], bounds);
            order[i] = nb;
            std::shuffle(order[i].begin(), order[i].end(), rng);
        });
        result.stats.evaluations += P;

        for (std::size_t i = 0; i < P; ++i) {
            for (std::size_t k = 0; k < 3; ++k) ideal[k] = std::min(ideal[k], child_norm[i][k]);
        }

        GenerationSnapshot snap;
        if (observer) snap.before = obj;

        for (std::size_t i = 0; i < P; ++i) {
            int replaced = 0;
            for (auto j : order[i]) {
                if (!detail::improves(child_obj[i], child_norm[i], obj[j], norm[j], weights[j], ideal)) continue;
                pop[j] = child[i];
                obj[j] = child_obj[i];
                norm[j] = child_norm[i];
                if (++replaced >= params.max_replacements) break;
            }
            result.archive.insert(child[i], child_obj[i]);
        }
        result.stats.generations = gen;

        if (observer) {
            snap.generation = gen;
            snap.ideal = ideal;
            snap.weights = &weights;
            snap.bounds = &bounds;
            snap.after = obj;
            observer(snap);
        }
    }

    result.ideal = ideal;
    result.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

/// Archive member closest (Euclidean, normalized) to the archive's own ideal
/// point, preferring feasible members. Index into `archive.sorted()`.
inline std::optional<std::size_t> knee_point(std::vector<ArchiveEntry> const& entries, ObjectiveBounds const& bounds) {
    if (entries.empty()) return std::nullopt;
    bool any_feasible = std::any_of(entries.begin(), entries.end(),
                                    [](ArchiveEntry const& e) { return e.objectives.feasible(); });
    Point3 ideal{1.0, 1.0, 1.0};
    for (auto const& e : entries) {
        if (any_feasible && !e.objectives.feasible()) continue;
        auto n = normalize_objectives(e.objectives, bounds);
        for (std::size_t k = 0; k < 3; ++k) ideal[k] = std::min(ideal[k], n[k]);
    }
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (any_feasible && !entries[i].objectives.feasible()) continue;
        auto n = normalize_objectives(entries[i].objectives, bounds);
        double d = 0.0;
        for (std::size_t k = 0; k < 3; ++k) d += (n[k] - ideal[k]) * (n[k] - ideal[k]);
        if (!best || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

} // namespace kitchenforge
