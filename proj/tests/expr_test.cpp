#include <cmath>
#include <map>
#include <set>

#include <gtest/gtest.h>

#include "ftg/expr.hpp"
#include "oracles.hpp"

using namespace ftg;

namespace {

double at(expr_tree const& t, double x) { return eval_tree(t, std::span(&x, 1)); }

expr_tree x_plus_one() { return make_binary(binary_op::add, make_variable(0), make_constant(1.0)); }

// depth of every leaf
std::vector<std::size_t> leaf_depths(expr_tree const& t)
{
    std::vector<std::size_t> out;
    std::vector<std::size_t> pending { 0 };
    for (auto const& n : t.nodes()) {
        auto const d = pending.back();
        pending.pop_back();
        if (n.is_leaf()) {
            out.push_back(d);
        }
        for (std::size_t c = 0; c < n.arity(); ++c) {
            pending.push_back(d + 1);
        }
    }
    return out;
}

} // namespace

TEST(eval, x_plus_one_at_two) { EXPECT_EQ(at(x_plus_one(), 2.0), 3.0); }

TEST(eval, nguyen5_at_zero)
{
    auto const x = make_variable(0);
    auto const t = make_binary(binary_op::sub,
        make_binary(binary_op::mul, make_unary(unary_op::sin, make_binary(binary_op::mul, x, x)), make_unary(unary_op::cos, x)),
        make_constant(1.0));
    EXPECT_EQ(at(t, 0.0), -1.0);
}

TEST(eval, protected_division)
{
    auto const t = make_binary(binary_op::div, make_variable(0), make_constant(0.0));
    EXPECT_EQ(at(t, 7.0), 1.0);
    EXPECT_EQ(apply(binary_op::div, 3.0, 1e-12), 1.0);
    EXPECT_EQ(apply(binary_op::div, 3.0, -1e-12), 1.0);
    EXPECT_DOUBLE_EQ(apply(binary_op::div, 3.0, 2e-12), 1.5e12);
}

TEST(eval, protected_log)
{
    EXPECT_EQ(apply(unary_op::ln, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(apply(unary_op::ln, -std::exp(1.0)), 1.0);
    EXPECT_DOUBLE_EQ(apply(unary_op::ln, std::exp(2.0)), 2.0);
}

TEST(eval, non_finite_propagates)
{
    auto const t = make_binary(binary_op::mul, make_variable(0), make_variable(0));
    EXPECT_TRUE(std::isinf(at(t, 1e200)));
    auto const nan_tree = make_binary(binary_op::sub, t, t);
    EXPECT_TRUE(std::isnan(at(nan_tree, 1e200)));
}

TEST(eval, multivariate_and_batch)
{
    auto const t = make_binary(binary_op::sub, make_variable(1), make_variable(0));
    std::vector<double> const pts { 1.0, 5.0, 2.0, -1.0 };
    std::vector<double> out(2);
    eval_batch(t, pts, 2, out);
    EXPECT_EQ(out[0], 4.0);
    EXPECT_EQ(out[1], -3.0);
    EXPECT_EQ(eval_tree(t, std::span(pts).subspan(0, 2)), 4.0);
}

TEST(tree, size_and_depth)
{
    EXPECT_EQ(tree_size(make_constant(1.0)), 1U);
    EXPECT_EQ(tree_depth(make_constant(1.0)), 0U);
    EXPECT_EQ(tree_size(x_plus_one()), 3U);
    EXPECT_EQ(tree_depth(x_plus_one()), 1U);
    auto const deep = make_unary(unary_op::sin, make_unary(unary_op::cos, x_plus_one()));
    EXPECT_EQ(deep.depth(), 3U);
    EXPECT_EQ(deep.arity_required(), 1U);
    EXPECT_EQ(make_constant(2.0).arity_required(), 0U);
}

TEST(tree, malformed_prefix_rejected)
{
    EXPECT_THROW(expr_tree(std::vector<node> {}), malformed_tree);
    EXPECT_THROW(expr_tree(std::vector<node> { node::make_binary(binary_op::add), node::make_constant(1) }), malformed_tree);
    EXPECT_THROW(expr_tree(std::vector<node> { node::make_constant(1), node::make_constant(2) }), malformed_tree);
    EXPECT_THROW(expr_tree(node::make_unary(unary_op::sin)), malformed_tree);
}

TEST(tree, subtree_copy)
{
    auto const t = make_binary(binary_op::mul, x_plus_one(), make_constant(3.0));
    EXPECT_EQ(t.subtree(1), x_plus_one());
    EXPECT_EQ(t.subtree(4), make_constant(3.0));
    EXPECT_THROW((void)t.subtree(5), std::out_of_range);
}

TEST(generate, default_parameters_depth_at_most_nine)
{
    rng_type rng(1);
    for (int i = 0; i < 1000; ++i) {
        auto const t = generate_composition(operator_set::standard(), gen_params {}, rng);
        ASSERT_LE(t.depth(), 9U);
        ASSERT_GE(t.depth(), 1U);
    }
}

// The root sits at depth 0 < l and is always an operator; its children sit at
// depth 1 >= u and are terminals.
TEST(generate, l1_u1_gives_one_operator_over_terminals)
{
    rng_type rng(2);
    gen_params g;
    g.min_depth = 1;
    g.max_depth = 1;
    for (int i = 0; i < 1000; ++i) {
        auto const t = generate_composition(operator_set::standard(), g, rng);
        ASSERT_EQ(t.depth(), 1U);
        ASSERT_FALSE(t.root().is_leaf());
    }
}

TEST(generate, p_one_gives_full_trees)
{
    rng_type rng(3);
    gen_params g;
    g.p = 1.0;
    g.min_depth = 3;
    g.max_depth = 3;
    for (int i = 0; i < 1000; ++i) {
        auto const t = generate_composition(operator_set::standard(), g, rng);
        for (auto d : leaf_depths(t)) {
            ASSERT_EQ(d, 3U) << to_sexpr(t);
        }
    }
    // u~ drawn from {1, 2, 3}: each tree is full to its own depth
    g.min_depth = 1;
    std::set<std::size_t> seen;
    for (int i = 0; i < 1000; ++i) {
        auto const t = generate_composition(operator_set::standard(), g, rng);
        for (auto d : leaf_depths(t)) {
            ASSERT_EQ(d, t.depth());
        }
        seen.insert(t.depth());
    }
    EXPECT_EQ(seen, (std::set<std::size_t> { 1, 2, 3 }));
}

TEST(generate, half_of_the_draws_use_p_equal_one)
{
    // p = 0 leaves only the p~ = 1 draws growing past depth l = 1
    rng_type rng(4);
    gen_params g;
    g.p = 0.0;
    g.min_depth = 1;
    g.max_depth = 2;
    int deep = 0;
    int const n = 4000;
    for (int i = 0; i < n; ++i) {
        deep += generate_composition(operator_set::polynomial(), g, rng).depth() == 2 ? 1 : 0;
    }
    // P(depth 2) = P(p~ = 1) P(u~ = 2) = 1/4
    EXPECT_NEAR(deep / static_cast<double>(n), 0.25, 0.03);
}

TEST(generate, terminals_split_between_variables_and_constants)
{
    rng_type rng(5);
    gen_params g;
    g.min_depth = 1;
    g.max_depth = 1;
    auto ops = operator_set::polynomial(3);
    std::map<int, int> counts;
    int const n = 6000;
    for (int i = 0; i < n; ++i) {
        auto const t = generate_composition(ops, g, rng);
        auto const& leaf = t[1];
        counts[leaf.kind == node_kind::constant ? -1 : static_cast<int>(leaf.var)]++;
        if (leaf.kind == node_kind::constant) {
            ASSERT_GE(leaf.value, -1.0);
            ASSERT_LT(leaf.value, 1.0);
        }
    }
    EXPECT_NEAR(counts[-1] / static_cast<double>(n), 0.5, 0.03);
    for (int v = 0; v < 3; ++v) {
        EXPECT_NEAR(counts[v] / static_cast<double>(n), 1.0 / 6.0, 0.03);
    }
}

TEST(generate, invalid_configuration_throws)
{
    rng_type rng(6);
    gen_params bad;
    bad.min_depth = 0;
    EXPECT_THROW(generate_composition(operator_set::standard(), bad, rng), std::invalid_argument);
    bad = {};
    bad.min_depth = 5;
    bad.max_depth = 4;
    EXPECT_THROW(generate_composition(operator_set::standard(), bad, rng), std::invalid_argument);
    bad = {};
    bad.p = 1.5;
    EXPECT_THROW(generate_composition(operator_set::standard(), bad, rng), std::invalid_argument);
    operator_set none;
    EXPECT_THROW(generate_composition(none, gen_params {}, rng), std::invalid_argument);
    auto zero_vars = operator_set::standard();
    zero_vars.variables = 0;
    EXPECT_THROW(zero_vars.validate(), std::invalid_argument);
}

TEST(subtree, single_leaf_selects_root)
{
    rng_type rng(7);
    auto const t = make_constant(4.0);
    for (int i = 0; i < 100; ++i) {
        EXPECT_EQ(random_subtree(t, rng).index, 0U);
    }
}

TEST(subtree, replace_root)
{
    rng_type rng(8);
    auto const t = x_plus_one();
    node_handle root { 0, t.fingerprint() };
    EXPECT_EQ(replace_subtree(t, root, make_constant(5.0)), make_constant(5.0));
    EXPECT_EQ(t, x_plus_one());
}

TEST(subtree, stale_and_out_of_range_handles)
{
    auto const t = x_plus_one();
    auto const other = make_binary(binary_op::mul, make_variable(0), make_constant(1.0));
    EXPECT_THROW(replace_subtree(t, { 1, other.fingerprint() }, make_constant(2.0)), stale_handle);
    EXPECT_THROW(replace_subtree(t, { 3, t.fingerprint() }, make_constant(2.0)), std::exception);
    EXPECT_THROW(splice_subtree(t, 3, make_constant(2.0)), std::out_of_range);
}

TEST(subtree, uniform_node_choice)
{
    // 7 nodes: (+ (* x 2) (- x 1))
    auto const x = make_variable(0);
    auto const t = make_binary(binary_op::add, make_binary(binary_op::mul, x, make_constant(2.0)),
        make_binary(binary_op::sub, x, make_constant(1.0)));
    ASSERT_EQ(t.size(), 7U);
    rng_type rng(9);
    std::vector<std::size_t> counts(7, 0);
    int const n = 10'000;
    for (int i = 0; i < n; ++i) {
        counts[random_subtree(t, rng).index]++;
    }
    for (auto c : counts) {
        EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 7.0, 0.02);
    }
    // chi-square, 6 degrees of freedom, 0.1% critical value
    EXPECT_LT(oracle::chi_square_uniform(counts), 22.458);
}

TEST(crossover, constants_give_the_second_parent)
{
    rng_type rng(10);
    auto const child = subtree_crossover(make_constant(1.0), make_constant(2.0), rng);
    EXPECT_EQ(child, make_constant(2.0));
}

TEST(crossover, size_bound_and_parents_untouched)
{
    rng_type rng(11);
    auto const ops = operator_set::standard();
    for (int i = 0; i < 1000; ++i) {
        auto const a = generate_composition(ops, gen_params {}, rng);
        auto const b = generate_composition(ops, gen_params {}, rng);
        auto const a0 = a;
        auto const b0 = b;
        auto const child = subtree_crossover(a, b, rng);
        ASSERT_LE(child.size(), a.size() - 1 + b.size());
        ASSERT_EQ(a, a0);
        ASSERT_EQ(b, b0);
    }
}

TEST(crossover, self_crossover_outcomes_enumerated)
{
    // 5 nodes: (+ (* x 2) x)
    auto const x = make_variable(0);
    auto const a = make_binary(binary_op::add, make_binary(binary_op::mul, x, make_constant(2.0)), x);
    ASSERT_EQ(a.size(), 5U);
    std::set<std::string> possible;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            possible.insert(to_sexpr(replace_subtree(a, { i, a.fingerprint() }, a.subtree(j))));
        }
    }
    rng_type rng(12);
    std::set<std::string> seen;
    for (int i = 0; i < 2000; ++i) {
        auto const child = to_sexpr(subtree_crossover(a, a, rng));
        ASSERT_TRUE(possible.contains(child)) << child;
        seen.insert(child);
    }
    EXPECT_EQ(seen, possible);
}

TEST(sexpr, canonical_text)
{
    auto const t = make_binary(binary_op::add, make_unary(unary_op::sin, make_variable(0)), make_constant(0.5));
    EXPECT_EQ(to_sexpr(t), "(+ (sin x0) 0.5)");
    EXPECT_EQ(parse_sexpr("(+ (sin x0) 0.5)"), t);
    EXPECT_EQ(parse_sexpr("  ( /  x1   -2.5e-3 ) "), make_binary(binary_op::div, make_variable(1), make_constant(-2.5e-3)));
    EXPECT_EQ(to_sexpr(make_constant(0.1)), "0.1");
}

TEST(sexpr, malformed_text_throws)
{
    for (auto const* bad : { "", "(", "(+ x0)", "(+ x0 1 2)", "(sin)", "(pow x0 2)", "x0 x0", "y", "(+ x0 1))" }) {
        EXPECT_THROW(parse_sexpr(bad), std::invalid_argument) << bad;
    }
}
