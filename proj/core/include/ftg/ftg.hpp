#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "ftg/expr.hpp"
#include "ftg/hilbert.hpp"
#include "ftg/projection.hpp"

namespace ftg {

// A problem FTG can project onto: a Hilbert space, the target element in
// it, and a way to lift a tree into that space.
template <class P>
concept ftg_problem = requires(P const& p, expr_tree const& t) {
    typename P::space_type;
    typename P::element_type;
    requires hilbert_space<typename P::space_type>;
    requires std::same_as<typename P::space_type::element_type, typename P::element_type>;
    { p.space() } -> std::convertible_to<typename P::space_type>;
    { p.target() } -> std::convertible_to<typename P::element_type const&>;
    { p.embed(t) } -> std::same_as<std::optional<typename P::element_type>>;
    { p.operators() } -> std::convertible_to<operator_set const&>;
};

struct ftg_config {
    double eps1 = 1e-4;
    double eps2 = 1e-3;
    gen_params gen {};
    std::uint64_t budget = 100'000;
    // Below this the loss counts as zero and the run has converged.
    double zero_loss = 1e-14;
    // First-hitting traversal counts are recorded for each of these.
    std::vector<double> tolerances;
    // 0 disables; otherwise stop once the loss drops below this value.
    double stop_tolerance = 0.0;
};

enum class ftg_stop { converged, budget, tolerance };

// One loss check: the loss of the projection on `basis_size` elements.
struct ftg_step {
    std::size_t basis_size = 0;
    std::uint64_t fe = 0;
    double loss = 0.0;
    double condition = 1.0;
};

struct ftg_result {
    expr_tree model;
    std::vector<expr_tree> basis;
    std::vector<double> alpha;
    ftg_stop stop = ftg_stop::budget;
    std::uint64_t traversals = 0;
    double final_loss = 0.0;
    std::vector<ftg_step> trace;
    std::vector<std::optional<std::uint64_t>> hits;
    std::uint64_t candidates = 0;
    std::uint64_t embed_rejections = 0;
    std::uint64_t independence_rejections = 0;
    std::uint64_t inverse_rejections = 0;
    double max_condition = 1.0;
};

// Candidate filter: true iff |<residual, v>| > eps2. Charges one traversal.
template <hilbert_space Space>
bool independence_test(Space const& space, typename Space::element_type const& residual,
    typename Space::element_type const& v, double eps2, budget_meter& meter)
{
    auto const ip = space.inner(residual, v);
    meter.charge();
    return std::isfinite(ip) && std::abs(ip) > eps2;
}

inline bool independence_test(eval_vector const& residual, eval_vector const& v, double eps2, budget_meter& meter)
{
    return independence_test(sample_space {}, residual, v, eps2, meter);
}

// Right-leaning sum (+ (* a1 v1) (+ (* a2 v2) ...)).
expr_tree assemble_model(std::span<expr_tree const> basis, std::span<double const> alpha);

template <ftg_problem Problem>
ftg_result run_ftg(Problem const& problem, ftg_config const& config, rng_type& rng)
{
    using element = typename Problem::element_type;

    config.gen.validate();
    auto const& ops = problem.operators();
    ops.validate();
    auto const space = problem.space();
    element const& target = problem.target();

    ftg_result result;
    result.hits.assign(config.tolerances.size(), std::nullopt);
    budget_meter meter(config.budget);
    gram_state state(space);
    std::optional<element> residual;

    auto const finish = [&](ftg_stop stop) {
        result.stop = stop;
        result.traversals = meter.traverses();
        result.alpha.assign(state.alpha().data(), state.alpha().data() + state.alpha().size());
        result.model = assemble_model(result.basis, result.alpha);
        if (!result.trace.empty() && result.trace.back().basis_size == state.size()) {
            result.final_loss = result.trace.back().loss;
        } else if (residual) {
            result.final_loss = space.inner(*residual, *residual);
        } else {
            // budget ran out before the first projection: the model is the zero function
            result.final_loss = space.inner(target, target);
        }
        return result;
    };

    try {
        // start from the projection onto the constant 1
        auto const one = make_constant(1.0);
        auto v1 = problem.embed(one);
        if (!v1) {
            throw std::logic_error("the constant 1 must embed into the problem space");
        }
        auto first = state.extend(std::move(*v1), target, meter);
        auto inv = invert_checked(first.gram, config.eps1);
        if (!inv.accepted) {
            throw std::logic_error("Gram matrix of the constant 1 is not invertible");
        }
        state.accept(std::move(first), std::move(inv));
        result.basis.push_back(one);
        result.max_condition = state.condition();
        residual = target - state.combination();

        for (;;) {
            auto const loss = space.inner(*residual, *residual);
            meter.charge();
            result.trace.push_back({ state.size(), meter.traverses(), loss, state.condition() });
            for (std::size_t t = 0; t < config.tolerances.size(); ++t) {
                if (!result.hits[t] && loss < config.tolerances[t]) {
                    result.hits[t] = meter.traverses();
                }
            }
            if (loss < config.zero_loss) {
                return finish(ftg_stop::converged);
            }
            if (config.stop_tolerance > 0.0 && loss < config.stop_tolerance) {
                return finish(ftg_stop::tolerance);
            }

            // draw until a candidate passes the eps2 filter and the eps1 inverse check
            for (;;) {
                auto tree = generate_composition(ops, config.gen, rng);
                ++result.candidates;
                auto v = problem.embed(tree);
                if (!v) {
                    meter.charge();
                    ++result.embed_rejections;
                    continue;
                }
                if (!independence_test(space, *residual, *v, config.eps2, meter)) {
                    ++result.independence_rejections;
                    continue;
                }
                auto ext = state.extend(std::move(*v), target, meter);
                auto checked = invert_checked(ext.gram, config.eps1);
                if (!checked.accepted) {
                    ++result.inverse_rejections;
                    continue;
                }
                state.accept(std::move(ext), std::move(checked));
                result.basis.push_back(std::move(tree));
                result.max_condition = std::max(result.max_condition, state.condition());
                break;
            }
            residual = target - state.combination();
        }
    } catch (budget_exhausted const&) {
        return finish(ftg_stop::budget);
    }
}

} // namespace ftg
