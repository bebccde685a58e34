#pragma once

#include <algorithm>
#include <concepts>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ftg/expr.hpp"
#include "ftg/hilbert.hpp"

namespace ftg {

// Anything GP can score: a charged loss and the operators to build trees from.
template <class P>
concept gp_problem = requires(P const& p, expr_tree const& t, budget_meter& m) {
    { p.loss(t, m) } -> std::convertible_to<double>;
    { p.operators() } -> std::convertible_to<operator_set const&>;
};

enum class mutation_kind { uniform_subtree, probabilistic_subtree };

struct gp_config {
    std::size_t population = 1;
    std::size_t offspring = 1;
    mutation_kind mutation = mutation_kind::uniform_subtree;
    double mutation_rate = 1.0;
    double crossover_rate = 0.0;
    std::size_t tournament = 2;
    gen_params gen {};
    std::uint64_t budget = 100'000;
    std::vector<double> tolerances;
    double stop_tolerance = 0.0;

    static gp_config one_plus_one() { return {}; }
    static gp_config one_plus_lambda(std::size_t lambda = 500)
    {
        gp_config c;
        c.offspring = lambda;
        return c;
    }
    static gp_config canonical()
    {
        gp_config c;
        c.population = 500;
        c.offspring = 500;
        c.mutation = mutation_kind::probabilistic_subtree;
        c.mutation_rate = 0.1;
        c.crossover_rate = 0.9;
        c.tournament = 2;
        return c;
    }
};

struct individual {
    expr_tree tree;
    double loss = std::numeric_limits<double>::infinity();
    std::uint64_t fe_stamp = 0;
};

struct generation_stats {
    std::size_t generation = 0;
    std::uint64_t fe = 0;
    double best_loss = 0.0;
    // over finite losses only
    double mean_loss = 0.0;
    double mean_size = 0.0;
    std::size_t best_size = 0;
};

struct gp_observer {
    // Called for every freshly evaluated individual, before the best-so-far
    // is updated.
    std::function<void(individual const& candidate, individual const& best)> on_evaluated;
    std::function<void(generation_stats const&, individual const& best)> on_generation;
};

enum class gp_stop { budget, tolerance };

struct gp_result {
    individual best;
    gp_stop stop = gp_stop::budget;
    std::uint64_t traversals = 0;
    std::size_t generations = 0;
    std::vector<std::optional<std::uint64_t>> hits;
    std::vector<generation_stats> trace;
};

// Uniform sampling of `size` contestants with replacement; lowest loss wins,
// ties broken uniformly.
individual const& tournament_select(std::span<individual const> pop, std::size_t size, rng_type& rng);

// Uniformly chosen node replaced by a fresh composition.
expr_tree uniform_subtree_mutation(expr_tree const& tree, operator_set const& ops, gen_params const& gen, rng_type& rng);

namespace detail {

    template <gp_problem Problem>
    individual evaluate_individual(Problem const& problem, expr_tree tree, budget_meter& meter)
    {
        double loss = problem.loss(tree, meter);
        if (!(loss == loss)) {
            loss = std::numeric_limits<double>::infinity();
        }
        return { std::move(tree), loss, meter.traverses() };
    }

    class hit_tracker {
    public:
        hit_tracker(gp_config const& config, gp_result& result) : config_(config), result_(result)
        {
            result_.hits.assign(config.tolerances.size(), std::nullopt);
        }

        // true when the run should stop early
        bool update(double best_loss, std::uint64_t fe)
        {
            for (std::size_t t = 0; t < config_.tolerances.size(); ++t) {
                if (!result_.hits[t] && best_loss < config_.tolerances[t]) {
                    result_.hits[t] = fe;
                }
            }
            return config_.stop_tolerance > 0.0 && best_loss < config_.stop_tolerance;
        }

    private:
        gp_config const& config_;
        gp_result& result_;
    };

    generation_stats summarize(std::size_t generation, std::uint64_t fe, std::span<individual const> pop, individual const& best);
    generation_stats summarize(std::size_t generation, std::uint64_t fe, std::span<double const> losses,
        std::span<std::size_t const> sizes, individual const& best);

    template <class P>
    struct cache_of {
        using type = int;
    };
    template <class P>
        requires requires { typename P::cache_type; }
    struct cache_of<P> {
        using type = typename P::cache_type;
    };
    template <class P>
    using cache_of_t = typename cache_of<P>::type;

} // namespace detail

// Problems that can re-score a subtree mutant from cached parent values.
template <class P>
concept incremental_gp_problem = gp_problem<P>
    && requires(P const& p, expr_tree const& t, typename P::cache_type& c, std::size_t i, budget_meter& m) {
           { p.cache(t) } -> std::same_as<typename P::cache_type>;
           { p.mutant_loss(c, t, i, t, m) } -> std::convertible_to<double>;
           c.replace(t, i, t);
       };

// (1+λ)-GP; λ = 1 gives (1+1)-GP. The best of λ mutants replaces the
// parent when its loss is not worse.
template <gp_problem Problem>
gp_result run_one_plus_lambda(Problem const& problem, gp_config const& config, rng_type& rng, gp_observer const& observer = {})
{
    if (config.offspring < 1) {
        throw std::invalid_argument("(1+lambda)-GP needs lambda >= 1");
    }
    config.gen.validate();
    auto const& ops = problem.operators();

    gp_result result;
    detail::hit_tracker hits(config, result);
    budget_meter meter(config.budget);
    std::vector<double> losses;
    std::vector<std::size_t> sizes;
    losses.reserve(config.offspring);
    sizes.reserve(config.offspring);

    constexpr bool incremental = incremental_gp_problem<Problem>;
    // observers see every mutant as a tree, so they take the plain path
    bool const use_cache = incremental && !observer.on_evaluated;

    try {
        result.best = detail::evaluate_individual(problem, generate_composition(ops, config.gen, rng), meter);
        if (observer.on_evaluated) {
            observer.on_evaluated(result.best, result.best);
        }
        auto record = [&]() {
            auto stats = losses.empty() ? detail::summarize(result.generations, meter.traverses(), std::span(&result.best, 1), result.best)
                                        : detail::summarize(result.generations, meter.traverses(), losses, sizes, result.best);
            result.trace.push_back(stats);
            if (observer.on_generation) {
                observer.on_generation(stats, result.best);
            }
            return hits.update(result.best.loss, meter.traverses());
        };
        if (record()) {
            result.stop = gp_stop::tolerance;
        } else {
            std::optional<detail::cache_of_t<Problem>> cache;
            for (;;) {
                losses.clear();
                sizes.clear();
                auto const& parent = result.best.tree;
                if constexpr (incremental) {
                    if (use_cache && !cache) {
                        cache.emplace(problem.cache(parent));
                    }
                }
                std::size_t at = 0;
                std::uniform_int_distribution<std::size_t> pick(0, parent.size() - 1);
                std::size_t best_at = 0;
                expr_tree best_replacement;
                individual best_child;
                for (std::size_t i = 0; i < config.offspring; ++i) {
                    at = pick(rng);
                    auto replacement = generate_composition(ops, config.gen, rng);
                    individual child;
                    if constexpr (incremental) {
                        if (use_cache) {
                            child.loss = problem.mutant_loss(*cache, parent, at, replacement, meter);
                            if (!(child.loss == child.loss)) {
                                child.loss = std::numeric_limits<double>::infinity();
                            }
                            child.fe_stamp = meter.traverses();
                        }
                    }
                    if (!use_cache) {
                        child = detail::evaluate_individual(problem, splice_subtree(parent, at, replacement), meter);
                        if (observer.on_evaluated) {
                            observer.on_evaluated(child, result.best);
                        }
                    }
                    losses.push_back(child.loss);
                    sizes.push_back(parent.size() - parent[at].length + replacement.size());
                    if (i == 0 || child.loss < best_child.loss) {
                        best_at = at;
                        best_replacement = std::move(replacement);
                        best_child = std::move(child);
                    }
                }
                ++result.generations;
                if (best_child.loss <= result.best.loss) {
                    if (use_cache) {
                        if constexpr (incremental) {
                            cache->replace(parent, best_at, best_replacement);
                        }
                        best_child.tree = splice_subtree(parent, best_at, best_replacement);
                    }
                    result.best = std::move(best_child);
                }
                if (record()) {
                    result.stop = gp_stop::tolerance;
                    break;
                }
            }
        }
    } catch (budget_exhausted const&) {
        result.stop = gp_stop::budget;
    }
    result.traversals = meter.traverses();
    return result;
}

// Generational GP with tournament selection, subtree crossover and
// probabilistic subtree mutation; best-so-far is kept outside the population.
template <gp_problem Problem>
gp_result run_canonical(Problem const& problem, gp_config const& config, rng_type& rng, gp_observer const& observer = {})
{
    if (config.population < 1 || config.offspring < 1 || config.tournament < 1) {
        throw std::invalid_argument("canonical GP needs a non-empty population and tournament");
    }
    config.gen.validate();
    auto const& ops = problem.operators();

    gp_result result;
    detail::hit_tracker hits(config, result);
    budget_meter meter(config.budget);
    std::vector<individual> population;
    std::vector<individual> next;
    population.reserve(config.population);
    next.reserve(config.offspring);
    std::bernoulli_distribution crossover(config.crossover_rate);
    std::bernoulli_distribution mutate(config.mutation_rate);

    auto consider = [&](individual const& ind) {
        if (observer.on_evaluated) {
            observer.on_evaluated(ind, result.best);
        }
        if (ind.loss < result.best.loss) {
            result.best = ind;
        }
    };
    auto record = [&]() {
        auto stats = detail::summarize(result.generations, meter.traverses(), population, result.best);
        result.trace.push_back(stats);
        if (observer.on_generation) {
            observer.on_generation(stats, result.best);
        }
        return hits.update(result.best.loss, meter.traverses());
    };

    try {
        for (std::size_t i = 0; i < config.population; ++i) {
            population.push_back(detail::evaluate_individual(problem, generate_composition(ops, config.gen, rng), meter));
            if (i == 0) {
                result.best = population.front();
            }
            consider(population.back());
        }
        if (record()) {
            result.stop = gp_stop::tolerance;
        } else {
            for (;;) {
                next.clear();
                for (std::size_t i = 0; i < config.offspring; ++i) {
                    auto const& mother = tournament_select(population, config.tournament, rng);
                    expr_tree child = mother.tree;
                    if (crossover(rng)) {
                        auto const& father = tournament_select(population, config.tournament, rng);
                        child = subtree_crossover(mother.tree, father.tree, rng);
                    }
                    if (mutate(rng)) {
                        child = uniform_subtree_mutation(child, ops, config.gen, rng);
                    }
                    next.push_back(detail::evaluate_individual(problem, std::move(child), meter));
                    consider(next.back());
                }
                population.swap(next);
                ++result.generations;
                if (record()) {
                    result.stop = gp_stop::tolerance;
                    break;
                }
            }
        }
    } catch (budget_exhausted const&) {
        result.stop = gp_stop::budget;
    }
    result.traversals = meter.traverses();
    return result;
}

} // namespace ftg
