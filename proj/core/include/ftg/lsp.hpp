#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "ftg/expr.hpp"
#include "ftg/ftg.hpp"
#include "ftg/gp.hpp"
#include "ftg/hilbert.hpp"
#include "ftg/poly.hpp"

namespace ftg {

class unsupported_operator : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Candidates whose lowered polynomial exceeds this degree score +inf.
inline constexpr std::size_t lsp_degree_guard = 2000;

// Recursive lowering of a {+, -, *} tree over x0 and constants to normal form.
// Throws unsupported_operator on anything else.
poly tree_to_poly(expr_tree const& tree);
// As above, but nullopt once any intermediate exceeds `max_degree` or the
// result has a non-finite coefficient.
std::optional<poly> tree_to_poly(expr_tree const& tree, std::size_t max_degree);

// L2(a, b) with the closed-form polynomial inner product.
class l2_space {
public:
    using element_type = poly;

    l2_space(double a, double b, std::size_t max_degree = lsp_degree_guard);

    [[nodiscard]] double a() const noexcept { return a_; }
    [[nodiscard]] double b() const noexcept { return b_; }
    [[nodiscard]] double inner(poly const& p, poly const& q) const;

private:
    double a_;
    double b_;
    std::vector<double> moments_;
};

class lsp_problem {
public:
    using space_type = l2_space;
    using element_type = poly;

    lsp_problem(interval domain, poly target, std::size_t max_degree = lsp_degree_guard);

    // Σ_{i=0}^{degree} x^i on [a, b].
    static lsp_problem sum_of_powers(std::size_t degree, double a = 0.0, double b = 1.0);

    [[nodiscard]] interval domain() const noexcept { return domain_; }
    [[nodiscard]] poly const& target() const noexcept { return target_; }
    [[nodiscard]] operator_set const& operators() const noexcept { return ops_; }
    [[nodiscard]] l2_space const& space() const noexcept { return space_; }
    [[nodiscard]] std::size_t max_degree() const noexcept { return max_degree_; }

    [[nodiscard]] std::optional<poly> embed(expr_tree const& tree) const;
    // Exact squared L2 distance to the target; +inf for an invalid candidate
    // or when rounding makes the closed form negative.
    [[nodiscard]] double loss(poly const& candidate) const;
    [[nodiscard]] double loss(expr_tree const& tree) const;
    [[nodiscard]] double loss(expr_tree const& tree, budget_meter& meter) const;

private:
    interval domain_;
    poly target_;
    std::size_t max_degree_;
    operator_set ops_;
    l2_space space_;
};

inline double lsp_loss(expr_tree const& candidate, lsp_problem const& problem, budget_meter& meter)
{
    return problem.loss(candidate, meter);
}

enum class lsp_algorithm { ftg, one_plus_lambda, canonical };

struct lsp_config {
    ftg_config ftg {};
    gp_config one_plus_lambda = gp_config::one_plus_lambda();
    gp_config canonical = gp_config::canonical();
};

struct lsp_generation {
    std::size_t generation = 0;
    std::uint64_t fe = 0;
    double loss = 0.0;
    std::size_t span = 0;
    std::size_t nodes = 0;
};

struct lsp_trace {
    std::vector<lsp_generation> generations;
    // Individuals that beat the best-so-far loss while spanning more terms.
    std::size_t dual_improvements = 0;
};

lsp_trace run_lsp_experiment(lsp_algorithm algorithm, lsp_problem const& problem, lsp_config const& config, rng_type& rng);

} // namespace ftg
