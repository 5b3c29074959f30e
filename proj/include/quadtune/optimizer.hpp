#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "quadtune/rng.hpp"

namespace quadtune::opt {

/// Box bounds, one (min, max) pair per dimension.
struct SearchSpace {
    std::vector<std::pair<double, double>> bounds;

    std::size_t dimensions() const { return bounds.size(); }
    double width(std::size_t d) const { return bounds[d].second - bounds[d].first; }

    double clamp(std::size_t d, double v) const {
        return std::min(std::max(v, bounds[d].first), bounds[d].second);
    }

    void validate() const {
        if (bounds.empty()) throw std::invalid_argument("search space is empty");
        for (const auto& [lo, hi] : bounds)
            if (!(lo < hi)) throw std::invalid_argument("search space requires min < max");
    }
};

struct Candidate {
    std::vector<double> position;
    double cost = std::numeric_limits<double>::infinity();
    // PSO only.
    std::vector<double> velocity;
    std::vector<double> pbest_position;
    double pbest_cost = std::numeric_limits<double>::infinity();
};

struct BboConfig {
    std::size_t population = 50;
    std::size_t iterations = 30;
    std::size_t elites = 2;
    double mutation_prob = 0.3;
    // Gaussian sigma as a fraction of the population's current spread in
    // each dimension, so mutation refines as the population contracts.
    double mutation_scale = 0.3;

    void validate() const {
        if (population < 2) throw std::invalid_argument("bbo: population must be >= 2");
        if (elites >= population) throw std::invalid_argument("bbo: elites must be < population");
        if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0))
            throw std::invalid_argument("bbo: mutation_prob must lie in [0, 1]");
        if (!(mutation_scale >= 0.0)) throw std::invalid_argument("bbo: mutation_scale must be >= 0");
    }
};

struct PsoConfig {
    std::size_t population = 50;
    std::size_t iterations = 30;
    double inertia = 0.5;
    double inertia_damping = 0.99;
    double cognitive = 2.0;
    double social = 2.0;
    double velocity_clamp = 0.2;  // fraction of dimension width

    void validate() const {
        if (population < 2) throw std::invalid_argument("pso: population must be >= 2");
        if (!(inertia > 0.0 && inertia <= 1.0))
            throw std::invalid_argument("pso: inertia must lie in (0, 1]");
        if (!(inertia_damping > 0.0 && inertia_damping <= 1.0))
            throw std::invalid_argument("pso: inertia_damping must lie in (0, 1]");
        if (!(velocity_clamp > 0.0)) throw std::invalid_argument("pso: velocity_clamp must be > 0");
    }
};

struct OptimizationTrace {
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;
    // Entry 0 describes the initial population; one entry per iteration after.
    std::vector<double> best_cost;
    std::vector<double> mean_cost;
    std::vector<std::vector<double>> best_position;
};

struct OptResult {
    std::vector<double> best_position;
    double best_cost = std::numeric_limits<double>::infinity();
    OptimizationTrace trace;
};

using ObjectiveFn = std::function<double(const std::vector<double>&)>;

enum class Algorithm { bbo, pso };

inline Algorithm parse_algorithm(const std::string& name) {
    if (name == "bbo") return Algorithm::bbo;
    if (name == "pso") return Algorithm::pso;
    throw std::invalid_argument("unknown algorithm: " + name);
}

/// Rank-linear emigration/immigration rates. Rank 1 is the best
/// candidate: E = (p_s + 1 - rank) / (p_s + 1), I = 1 - E.
inline std::pair<double, double> bbo_rates(std::size_t rank, std::size_t population) {
    if (rank < 1 || rank > population)
        throw std::out_of_range("bbo_rates: rank must lie in [1, population]");
    const double emigration =
        static_cast<double>(population + 1 - rank) / static_cast<double>(population + 1);
    return {emigration, 1.0 - emigration};
}

namespace detail {

inline double safe_eval(const ObjectiveFn& objective, const std::vector<double>& x,
                        double penalty = 4e6) {
    try {
        const double v = objective(x);
        return std::isfinite(v) ? v : penalty;
    } catch (...) {
        return penalty;
    }
}

inline void sort_by_cost(std::vector<Candidate>& pop) {
    std::stable_sort(pop.begin(), pop.end(),
                     [](const Candidate& a, const Candidate& b) { return a.cost < b.cost; });
}

inline double mean_cost(const std::vector<Candidate>& pop) {
    double sum = 0.0;
    for (const auto& c : pop) sum += c.cost;
    return sum / static_cast<double>(pop.size());
}

/// Roulette pick over emigration rates; returns a candidate index.
inline std::size_t roulette_emigrant(std::size_t population, double draw) {
    double total = 0.0;
    for (std::size_t r = 1; r <= population; ++r) total += bbo_rates(r, population).first;
    double target = draw * total;
    for (std::size_t r = 1; r <= population; ++r) {
        target -= bbo_rates(r, population).first;
        if (target <= 0.0) return r - 1;
    }
    return population - 1;
}

}  // namespace detail

/// One BBO generation. `population` must be sorted ascending by cost.
/// Elites pass through untouched; every other candidate immigrates
/// features per dimension with probability I(rank), sourcing them from a
/// roulette pick proportional to E, and is re-evaluated. Mutation then
/// proposes a Gaussian perturbation sized by the population's current
/// per-dimension spread and keeps it only when it improves the
/// candidate; copy migration alone cannot refine features beyond the
/// resolution of the initial sample.
inline std::vector<Candidate> bbo_step(const std::vector<Candidate>& population,
                                       const BboConfig& cfg, const SearchSpace& space,
                                       Rng& rng, const ObjectiveFn& objective) {
    const std::size_t n = population.size();
    const std::size_t dims = space.dimensions();

    std::vector<double> spread(dims, 0.0);
    for (std::size_t d = 0; d < dims; ++d) {
        double lo = population.front().position[d], hi = lo;
        for (const auto& cand : population) {
            lo = std::min(lo, cand.position[d]);
            hi = std::max(hi, cand.position[d]);
        }
        spread[d] = hi - lo;
    }

    std::vector<Candidate> next = population;
    for (std::size_t i = cfg.elites; i < n; ++i) {
        auto& cand = next[i];
        const double immigration = bbo_rates(i + 1, n).second;
        for (std::size_t d = 0; d < dims; ++d) {
            if (rng.uniform() < immigration) {
                const std::size_t src = detail::roulette_emigrant(n, rng.uniform());
                cand.position[d] = population[src].position[d];
            }
        }
        cand.cost = detail::safe_eval(objective, cand.position);

        std::vector<double> trial = cand.position;
        bool mutated = false;
        for (std::size_t d = 0; d < dims; ++d) {
            if (rng.uniform() < cfg.mutation_prob) {
                trial[d] = space.clamp(
                    d, trial[d] + rng.gaussian() * cfg.mutation_scale * spread[d]);
                mutated = true;
            }
        }
        if (mutated) {
            const double trial_cost = detail::safe_eval(objective, trial);
            if (trial_cost < cand.cost) {
                cand.position = std::move(trial);
                cand.cost = trial_cost;
            }
        }
    }
    detail::sort_by_cost(next);
    return next;
}

/// One PSO generation with the canonical velocity update at the given
/// effective inertia. pbest/gbest move only on strict improvement.
inline void pso_step(std::vector<Candidate>& swarm, Candidate& gbest, const PsoConfig& cfg,
                     double effective_inertia, const SearchSpace& space, Rng& rng,
                     const ObjectiveFn& objective) {
    const std::size_t dims = space.dimensions();
    for (auto& particle : swarm) {
        for (std::size_t d = 0; d < dims; ++d) {
            const double r1 = rng.uniform();
            const double r2 = rng.uniform();
            double v = effective_inertia * particle.velocity[d] +
                       cfg.cognitive * r1 * (particle.pbest_position[d] - particle.position[d]) +
                       cfg.social * r2 * (gbest.position[d] - particle.position[d]);
            const double vmax = cfg.velocity_clamp * space.width(d);
            v = std::min(std::max(v, -vmax), vmax);
            particle.velocity[d] = v;
            particle.position[d] = space.clamp(d, particle.position[d] + v);
        }
        particle.cost = detail::safe_eval(objective, particle.position);
        if (particle.cost < particle.pbest_cost) {
            particle.pbest_cost = particle.cost;
            particle.pbest_position = particle.position;
        }
        if (particle.pbest_cost < gbest.cost) {
            gbest.cost = particle.pbest_cost;
            gbest.position = particle.pbest_position;
        }
    }
}

namespace detail {

inline std::vector<Candidate> init_population(std::size_t n, const SearchSpace& space,
                                              Rng& rng, const ObjectiveFn& objective) {
    std::vector<Candidate> pop(n);
    for (auto& cand : pop) {
        cand.position.resize(space.dimensions());
        for (std::size_t d = 0; d < space.dimensions(); ++d)
            cand.position[d] = rng.uniform(space.bounds[d].first, space.bounds[d].second);
        cand.cost = safe_eval(objective, cand.position);
    }
    return pop;
}

inline void record(OptimizationTrace& trace, const std::vector<Candidate>& pop,
                   const std::vector<double>& best_pos, double best_cost) {
    trace.best_cost.push_back(best_cost);
    trace.mean_cost.push_back(mean_cost(pop));
    trace.best_position.push_back(best_pos);
}

}  // namespace detail

inline OptResult optimize_bbo(const SearchSpace& space, const ObjectiveFn& objective,
                              const BboConfig& cfg, std::uint64_t seed) {
    space.validate();
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);

    auto pop = detail::init_population(cfg.population, space, rng, objective);
    detail::sort_by_cost(pop);

    OptResult res;
    res.trace.seed = seed;
    res.best_position = pop.front().position;
    res.best_cost = pop.front().cost;
    detail::record(res.trace, pop, res.best_position, res.best_cost);

    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        pop = bbo_step(pop, cfg, space, rng, objective);
        if (pop.front().cost < res.best_cost) {
            res.best_cost = pop.front().cost;
            res.best_position = pop.front().position;
        }
        detail::record(res.trace, pop, res.best_position, res.best_cost);
    }
    res.trace.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

inline OptResult optimize_pso(const SearchSpace& space, const ObjectiveFn& objective,
                              const PsoConfig& cfg, std::uint64_t seed) {
    space.validate();
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();
    Rng rng(seed);

    auto swarm = detail::init_population(cfg.population, space, rng, objective);
    Candidate gbest;
    for (auto& particle : swarm) {
        particle.velocity.assign(space.dimensions(), 0.0);
        particle.pbest_position = particle.position;
        particle.pbest_cost = particle.cost;
        if (particle.cost < gbest.cost) {
            gbest.cost = particle.cost;
            gbest.position = particle.position;
        }
    }

    OptResult res;
    res.trace.seed = seed;
    detail::record(res.trace, swarm, gbest.position, gbest.cost);

    double inertia = cfg.inertia;
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        pso_step(swarm, gbest, cfg, inertia, space, rng, objective);
        inertia *= cfg.inertia_damping;
        detail::record(res.trace, swarm, gbest.position, gbest.cost);
    }
    res.best_position = gbest.position;
    res.best_cost = gbest.cost;
    res.trace.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace quadtune::opt
