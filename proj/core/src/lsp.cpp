#include "ftg/lsp.hpp"

#include <cmath>
#include <limits>

namespace ftg {

namespace {

    std::optional<poly> lower(expr_tree const& tree, std::size_t max_degree, bool strict)
    {
        std::vector<poly> stack;
        auto const nodes = tree.nodes();
        for (auto i = nodes.size(); i-- > 0;) {
            auto const& n = nodes[i];
            switch (n.kind) {
            case node_kind::constant:
                stack.push_back(poly::constant(n.value));
                break;
            case node_kind::variable:
                if (n.var != 0) {
                    throw unsupported_operator("polynomial lowering is one-dimensional");
                }
                stack.push_back(poly::monomial(1));
                break;
            case node_kind::unary:
                throw unsupported_operator("unary operator '" + std::string(symbol(n.uop)) + "' has no polynomial form");
            case node_kind::binary: {
                poly lhs = std::move(stack.back());
                stack.pop_back();
                poly& rhs = stack.back();
                switch (n.bop) {
                case binary_op::add: rhs = lhs + rhs; break;
                case binary_op::sub: rhs = lhs - rhs; break;
                case binary_op::mul:
                    if (!strict && lhs.degree() + rhs.degree() > static_cast<long>(max_degree)) {
                        return std::nullopt;
                    }
                    rhs = lhs * rhs;
                    break;
                case binary_op::div:
                    throw unsupported_operator("division has no polynomial form");
                }
                if (!strict && (!rhs.valid() || rhs.degree() > static_cast<long>(max_degree))) {
                    return std::nullopt;
                }
                break;
            }
            }
        }
        return std::move(stack.back());
    }

} // namespace

poly tree_to_poly(expr_tree const& tree)
{
    return *lower(tree, 0, true);
}

std::optional<poly> tree_to_poly(expr_tree const& tree, std::size_t max_degree)
{
    auto p = lower(tree, max_degree, false);
    if (p && (!p->valid() || p->degree() > static_cast<long>(max_degree))) {
        return std::nullopt;
    }
    return p;
}

l2_space::l2_space(double a, double b, std::size_t max_degree)
    : a_(a)
    , b_(b)
    , moments_(power_moments(a, b, 2 * max_degree + 1))
{
}

double l2_space::inner(poly const& p, poly const& q) const
{
    if (p.coeffs().size() + q.coeffs().size() > moments_.size() + 1) {
        return l2_inner(p, q, a_, b_);
    }
    return l2_inner(p, q, moments_);
}

lsp_problem::lsp_problem(interval domain, poly target, std::size_t max_degree)
    : domain_(domain)
    , target_(std::move(target))
    , max_degree_(max_degree)
    , ops_(operator_set::lsp())
    , space_(domain.lo, domain.hi, std::max<std::size_t>(max_degree, static_cast<std::size_t>(std::max(0L, target_.degree()))))
{
    if (!target_.valid()) {
        throw std::invalid_argument("LSP target polynomial is not finite");
    }
}

lsp_problem lsp_problem::sum_of_powers(std::size_t degree, double a, double b)
{
    return { { a, b }, poly(std::vector<double>(degree + 1, 1.0)) };
}

std::optional<poly> lsp_problem::embed(expr_tree const& tree) const
{
    return tree_to_poly(tree, max_degree_);
}

double lsp_problem::loss(poly const& candidate) const
{
    if (!candidate.valid() || candidate.degree() > static_cast<long>(max_degree_)) {
        return std::numeric_limits<double>::infinity();
    }
    auto const diff = target_ - candidate;
    auto const l = space_.inner(diff, diff);
    // cancellation in the moment sum can push a high-degree result below zero
    return std::isfinite(l) && l >= 0.0 ? l : std::numeric_limits<double>::infinity();
}

double lsp_problem::loss(expr_tree const& tree) const
{
    auto const p = embed(tree);
    return p ? loss(*p) : std::numeric_limits<double>::infinity();
}

double lsp_problem::loss(expr_tree const& tree, budget_meter& meter) const
{
    meter.charge();
    return loss(tree);
}

namespace {

    std::size_t span_of(lsp_problem const& problem, expr_tree const& tree)
    {
        auto const p = problem.embed(tree);
        return p ? span_size(*p) : 0;
    }

    lsp_trace lsp_ftg(lsp_problem const& problem, ftg_config const& config, rng_type& rng)
    {
        auto const result = run_ftg(problem, config, rng);
        lsp_trace out;
        // assembled model size on k elements: Σ (|v_i| + 2) + (k - 1)
        std::size_t nodes = 0;
        for (std::size_t i = 0; i < result.trace.size(); ++i) {
            auto const& step = result.trace[i];
            nodes = 0;
            for (std::size_t j = 0; j < step.basis_size; ++j) {
                nodes += result.basis[j].size() + 2;
            }
            nodes += step.basis_size - 1;
            out.generations.push_back({ i, step.fe, step.loss, step.basis_size, nodes });
            if (i > 0 && step.loss < result.trace[i - 1].loss && step.basis_size > result.trace[i - 1].basis_size) {
                ++out.dual_improvements;
            }
        }
        return out;
    }

    lsp_trace lsp_gp(lsp_problem const& problem, gp_config const& config, bool canonical, rng_type& rng)
    {
        lsp_trace out;
        gp_observer observer;
        observer.on_evaluated = [&](individual const& candidate, individual const& best) {
            if (candidate.loss < best.loss && span_of(problem, candidate.tree) > span_of(problem, best.tree)) {
                ++out.dual_improvements;
            }
        };
        observer.on_generation = [&](generation_stats const& stats, individual const& best) {
            out.generations.push_back({ stats.generation, stats.fe, best.loss, span_of(problem, best.tree), best.tree.size() });
        };
        if (canonical) {
            run_canonical(problem, config, rng, observer);
        } else {
            run_one_plus_lambda(problem, config, rng, observer);
        }
        return out;
    }

} // namespace

lsp_trace run_lsp_experiment(lsp_algorithm algorithm, lsp_problem const& problem, lsp_config const& config, rng_type& rng)
{
    switch (algorithm) {
    case lsp_algorithm::ftg: return lsp_ftg(problem, config.ftg, rng);
    case lsp_algorithm::one_plus_lambda: return lsp_gp(problem, config.one_plus_lambda, false, rng);
    case lsp_algorithm::canonical: return lsp_gp(problem, config.canonical, true, rng);
    }
    throw std::invalid_argument("unknown LSP algorithm");
}

} // namespace ftg
