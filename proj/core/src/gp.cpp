#include "ftg/gp.hpp"

#include <cmath>

namespace ftg {

individual const& tournament_select(std::span<individual const> pop, std::size_t size, rng_type& rng)
{
    if (pop.empty()) {
        throw std::invalid_argument("tournament over an empty population");
    }
    if (size == 0) {
        throw std::invalid_argument("tournament size must be positive");
    }
    std::uniform_int_distribution<std::size_t> pick(0, pop.size() - 1);
    std::size_t winner = pick(rng);
    std::size_t ties = 1;
    for (std::size_t i = 1; i < size; ++i) {
        auto const c = pick(rng);
        if (pop[c].loss < pop[winner].loss) {
            winner = c;
            ties = 1;
        } else if (pop[c].loss == pop[winner].loss) {
            // reservoir sampling over equally good contestants
            ++ties;
            std::uniform_int_distribution<std::size_t> keep(0, ties - 1);
            if (keep(rng) == 0) {
                winner = c;
            }
        }
    }
    return pop[winner];
}

expr_tree uniform_subtree_mutation(expr_tree const& tree, operator_set const& ops, gen_params const& gen, rng_type& rng)
{
    std::uniform_int_distribution<std::size_t> pick(0, tree.size() - 1);
    auto const at = pick(rng);
    return splice_subtree(tree, at, generate_composition(ops, gen, rng));
}

namespace detail {

    generation_stats summarize(std::size_t generation, std::uint64_t fe, std::span<individual const> pop, individual const& best)
    {
        generation_stats s;
        s.generation = generation;
        s.fe = fe;
        s.best_loss = best.loss;
        s.best_size = best.tree.size();
        double loss_sum = 0.0;
        std::size_t finite = 0;
        double size_sum = 0.0;
        for (auto const& ind : pop) {
            if (std::isfinite(ind.loss)) {
                loss_sum += ind.loss;
                ++finite;
            }
            size_sum += static_cast<double>(ind.tree.size());
        }
        s.mean_loss = finite > 0 ? loss_sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
        s.mean_size = pop.empty() ? 0.0 : size_sum / static_cast<double>(pop.size());
        return s;
    }

    generation_stats summarize(std::size_t generation, std::uint64_t fe, std::span<double const> losses,
        std::span<std::size_t const> sizes, individual const& best)
    {
        generation_stats s;
        s.generation = generation;
        s.fe = fe;
        s.best_loss = best.loss;
        s.best_size = best.tree.size();
        double loss_sum = 0.0;
        std::size_t finite = 0;
        for (auto l : losses) {
            if (std::isfinite(l)) {
                loss_sum += l;
                ++finite;
            }
        }
        double size_sum = 0.0;
        for (auto z : sizes) {
            size_sum += static_cast<double>(z);
        }
        s.mean_loss = finite > 0 ? loss_sum / static_cast<double>(finite) : std::numeric_limits<double>::infinity();
        s.mean_size = sizes.empty() ? 0.0 : size_sum / static_cast<double>(sizes.size());
        return s;
    }

} // namespace detail

} // namespace ftg
