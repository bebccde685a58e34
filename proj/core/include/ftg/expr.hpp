#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ftg/random.hpp"

namespace ftg {

enum class unary_op : std::uint8_t { sin, cos, ln };
enum class binary_op : std::uint8_t { add, sub, mul, div };
enum class node_kind : std::uint8_t { unary, binary, variable, constant };

std::string_view symbol(unary_op op) noexcept;
std::string_view symbol(binary_op op) noexcept;

// |denominator| at or below this makes protected division return 1.
inline constexpr double division_guard = 1e-12;

double apply(unary_op op, double x) noexcept;
double apply(binary_op op, double lhs, double rhs) noexcept;

struct node {
    node_kind kind = node_kind::constant;
    unary_op uop = unary_op::sin;
    binary_op bop = binary_op::add;
    std::uint32_t var = 0;
    double value = 0.0;
    // Number of nodes in the subtree rooted here (including this one).
    std::uint32_t length = 1;

    static node make_unary(unary_op op) noexcept { node n; n.kind = node_kind::unary; n.uop = op; return n; }
    static node make_binary(binary_op op) noexcept { node n; n.kind = node_kind::binary; n.bop = op; return n; }
    static node make_variable(std::uint32_t index) noexcept { node n; n.kind = node_kind::variable; n.var = index; return n; }
    static node make_constant(double v) noexcept { node n; n.kind = node_kind::constant; n.value = v; return n; }

    [[nodiscard]] std::size_t arity() const noexcept
    {
        switch (kind) {
        case node_kind::unary: return 1;
        case node_kind::binary: return 2;
        default: return 0;
        }
    }
    [[nodiscard]] bool is_leaf() const noexcept { return arity() == 0; }

    bool operator==(node const& other) const noexcept;
};

class malformed_tree : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Expression tree stored as a prefix-ordered node array. Immutable value
// type: every operation that changes structure returns a new tree.
class expr_tree {
public:
    expr_tree() : expr_tree(node::make_constant(0.0)) { }
    explicit expr_tree(node leaf);
    // Throws malformed_tree if `prefix` is not exactly one well-formed tree.
    explicit expr_tree(std::vector<node> prefix);

    [[nodiscard]] std::span<node const> nodes() const noexcept { return nodes_; }
    [[nodiscard]] node const& root() const noexcept { return nodes_.front(); }
    [[nodiscard]] node const& operator[](std::size_t i) const { return nodes_[i]; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }
    [[nodiscard]] std::size_t depth() const;
    // Largest variable index + 1 (0 when the tree has no variables).
    [[nodiscard]] std::size_t arity_required() const noexcept;
    // Structural hash; used to detect stale node handles.
    [[nodiscard]] std::uint64_t fingerprint() const noexcept;

    // Copy of the subtree rooted at prefix position `i`.
    [[nodiscard]] expr_tree subtree(std::size_t i) const;

    bool operator==(expr_tree const& other) const noexcept { return nodes_ == other.nodes_; }

private:
    friend expr_tree splice_subtree(expr_tree const& tree, std::size_t index, expr_tree const& replacement);
    struct trusted { };
    expr_tree(std::vector<node> prefix, trusted) : nodes_(std::move(prefix)) { }

    std::vector<node> nodes_;
};

expr_tree make_constant(double value);
expr_tree make_variable(std::uint32_t index);
expr_tree make_unary(unary_op op, expr_tree const& child);
expr_tree make_binary(binary_op op, expr_tree const& lhs, expr_tree const& rhs);

inline std::size_t tree_size(expr_tree const& t) noexcept { return t.size(); }
inline std::size_t tree_depth(expr_tree const& t) { return t.depth(); }

// Evaluation is total: protected division and logarithm; other non-finite
// intermediates propagate to the result.
double eval_tree(expr_tree const& tree, std::span<double const> x);
// Same semantics over many points at once; `points` is row-major with `dims`
// coordinates per point, one output value per point.
void eval_batch(expr_tree const& tree, std::span<double const> points, std::size_t dims, std::span<double> out);

struct constant_sampler {
    double lo = -1.0;
    double hi = 1.0;
};

struct operator_set {
    std::vector<unary_op> unary;
    std::vector<binary_op> binary;
    std::size_t variables = 1;
    constant_sampler constants;

    // Throws std::invalid_argument when no operator can be drawn or n == 0.
    void validate() const;

    static operator_set standard(std::size_t variables = 1);     // {+,-,*,/} and {sin,cos,ln}
    static operator_set polynomial(std::size_t variables = 1);   // {+,-,*}
    static operator_set lsp();                                   // {+,*}
};

struct gen_params {
    double p = 0.5;
    std::size_t min_depth = 1; // l
    std::size_t max_depth = 9; // u

    void validate() const;
};

// Randomized ramped half-and-half composition: breadth-first expansion where
// each slot at depth d is drawn from E(p~, d, l, u~).
expr_tree generate_composition(operator_set const& ops, gen_params const& params, rng_type& rng);

struct node_handle {
    std::size_t index = 0;
    std::uint64_t fingerprint = 0;
};

class stale_handle : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

node_handle random_subtree(expr_tree const& tree, rng_type& rng);
expr_tree replace_subtree(expr_tree const& tree, node_handle handle, expr_tree const& replacement);
// Unchecked variant for callers that know `index` addresses `tree`; only the
// ancestors' subtree lengths are recomputed. Throws std::out_of_range.
expr_tree splice_subtree(expr_tree const& tree, std::size_t index, expr_tree const& replacement);
expr_tree subtree_crossover(expr_tree const& a, expr_tree const& b, rng_type& rng);

// Canonical s-expression text, e.g. `(+ (sin x0) 0.5)`. Constants use the
// shortest round-trip decimal form.
std::string to_sexpr(expr_tree const& tree);
expr_tree parse_sexpr(std::string_view text);

} // namespace ftg
