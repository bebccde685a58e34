#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "ftg/expr.hpp"

namespace ftg {

struct interval {
    double lo = 0.0;
    double hi = 0.0;

    bool operator==(interval const&) const = default;
};

// Ordered training set X with known target values F(x_i).
class data_set {
public:
    // `points` is row-major, N rows of `dims` coordinates each.
    data_set(std::size_t dims, std::vector<double> points, std::vector<double> targets, std::vector<interval> bounds);

    [[nodiscard]] std::size_t size() const noexcept { return targets_.size(); }
    [[nodiscard]] std::size_t dims() const noexcept { return dims_; }
    [[nodiscard]] std::span<double const> point(std::size_t i) const noexcept
    {
        return { points_.data() + i * dims_, dims_ };
    }
    [[nodiscard]] std::span<double const> points() const noexcept { return points_; }
    [[nodiscard]] std::span<double const> targets() const noexcept { return targets_; }
    [[nodiscard]] std::span<interval const> bounds() const noexcept { return bounds_; }

    bool operator==(data_set const&) const = default;

private:
    std::size_t dims_;
    std::vector<double> points_;
    std::vector<double> targets_;
    std::vector<interval> bounds_;
};

void write_csv(data_set const& data, std::filesystem::path const& path);
data_set read_csv(std::filesystem::path const& path, std::vector<interval> bounds);

// Values of a function on X: the coordinates of its equivalence class.
class eval_vector {
public:
    eval_vector() = default;
    explicit eval_vector(std::vector<double> values) : values_(std::move(values)) { }
    eval_vector(std::size_t n, double fill) : values_(n, fill) { }

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<double const> values() const noexcept { return values_; }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }
    [[nodiscard]] bool finite() const noexcept;

    // Uncharged dot product; use inner() to account for the traversal.
    [[nodiscard]] double dot(eval_vector const& other) const;

    eval_vector& operator+=(eval_vector const& other);
    eval_vector& operator-=(eval_vector const& other);
    eval_vector& operator*=(double s) noexcept;

    friend eval_vector operator+(eval_vector a, eval_vector const& b) { return a += b; }
    friend eval_vector operator-(eval_vector a, eval_vector const& b) { return a -= b; }
    friend eval_vector operator*(double s, eval_vector a) { return a *= s; }

    bool operator==(eval_vector const&) const = default;

private:
    std::vector<double> values_;
};

class budget_exhausted : public std::runtime_error {
public:
    budget_exhausted() : std::runtime_error("traversal budget exhausted") { }
};

// Counts traversals of the training set. charge() throws budget_exhausted
// once the count exceeds the limit; the crossing charge is still recorded.
class budget_meter {
public:
    explicit budget_meter(std::uint64_t limit = std::numeric_limits<std::uint64_t>::max()) : limit_(limit) { }

    void charge(std::uint64_t n = 1)
    {
        traverses_ += n;
        if (traverses_ > limit_) {
            throw budget_exhausted();
        }
    }
    [[nodiscard]] std::uint64_t traverses() const noexcept { return traverses_; }
    [[nodiscard]] std::uint64_t limit() const noexcept { return limit_; }
    [[nodiscard]] bool within_limit() const noexcept { return traverses_ <= limit_; }

private:
    std::uint64_t traverses_ = 0;
    std::uint64_t limit_;
};

// π(⟦f⟧) without charging; FTG folds this pass into the inner product it
// is computed for.
eval_vector evaluate(expr_tree const& tree, data_set const& data);
eval_vector evaluate_class(expr_tree const& tree, data_set const& data, budget_meter& meter);
eval_vector target_vector(data_set const& data);

double inner(eval_vector const& u, eval_vector const& v, budget_meter& meter);
double sq_distance(eval_vector const& u, eval_vector const& v, budget_meter& meter);
// Σ (F(x_i) - f(x_i))², +inf when the tree yields a non-finite value.
double loss_sum(expr_tree const& tree, data_set const& data, budget_meter& meter);
double loss_sum(expr_tree const& tree, data_set const& data);

// Values of every subtree of one tree on every training point. A mutant that
// swaps one subtree is re-scored by recomputing only the path to the root.
class node_values {
public:
    node_values(expr_tree const& tree, data_set const& data);

    [[nodiscard]] std::span<double const> root() const noexcept { return { lane(0), n_ }; }
    // Root values of `tree` with the subtree at `index` swapped for
    // `replacement`; `tree` must be the tree these values were built from.
    void mutant_root(expr_tree const& tree, std::size_t index, expr_tree const& replacement, std::span<double> out) const;
    // Same swap, applied in place.
    void replace(expr_tree const& tree, std::size_t index, expr_tree const& replacement);

private:
    struct step {
        std::size_t node;
        bool from_left;
        std::size_t sibling;
    };
    std::vector<step> const& path(expr_tree const& tree, std::size_t index) const;
    // Recomputes the ancestors on `path` from the new values `cur` of the
    // swapped node; siblings right of it sit `shift` slots away. Writes the
    // ancestors' values to `store` when given.
    void climb(expr_tree const& tree, std::vector<step> const& path, double* cur, std::ptrdiff_t shift, bool store);
    void climb(expr_tree const& tree, std::vector<step> const& path, double* cur) const;
    [[nodiscard]] double const* lane(std::size_t i) const noexcept { return slab_.data() + std::size_t { slot_[i] } * n_; }
    [[nodiscard]] double* lane(std::size_t i) noexcept { return slab_.data() + std::size_t { slot_[i] } * n_; }
    std::uint32_t allocate();

    data_set const* data_;
    std::size_t n_;
    // prefix position -> lane slot in slab_, so a swap moves indices, not values
    std::vector<std::uint32_t> slot_;
    std::vector<double> slab_;
    std::vector<std::uint32_t> free_;
};

// Hilbert space of equivalence classes on a finite X.
struct sample_space {
    using element_type = eval_vector;
    [[nodiscard]] double inner(eval_vector const& u, eval_vector const& v) const { return u.dot(v); }
};

// A regression instance on a finite training set.
class sample_problem {
public:
    using space_type = sample_space;
    using element_type = eval_vector;

    sample_problem(data_set data, operator_set ops);

    [[nodiscard]] data_set const& data() const noexcept { return data_; }
    [[nodiscard]] operator_set const& operators() const noexcept { return ops_; }
    [[nodiscard]] sample_space space() const noexcept { return {}; }
    [[nodiscard]] eval_vector const& target() const noexcept { return target_; }

    // nullopt when the tree is non-finite somewhere on X.
    [[nodiscard]] std::optional<eval_vector> embed(expr_tree const& tree) const;
    [[nodiscard]] double loss(expr_tree const& tree, budget_meter& meter) const { return loss_sum(tree, data_, meter); }
    [[nodiscard]] double loss(expr_tree const& tree) const { return loss_sum(tree, data_); }

    // Incremental scoring for subtree mutation; one traversal per mutant.
    using cache_type = node_values;
    [[nodiscard]] node_values cache(expr_tree const& tree) const { return { tree, data_ }; }
    [[nodiscard]] double mutant_loss(node_values const& parent_values, expr_tree const& parent, std::size_t index,
        expr_tree const& replacement, budget_meter& meter) const;

private:
    data_set data_;
    operator_set ops_;
    eval_vector target_;
};

} // namespace ftg
