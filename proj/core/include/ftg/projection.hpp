#pragma once

#include <concepts>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ftg/hilbert.hpp"

namespace ftg {

// An inner-product space over some element type. Elements must form a
// vector space (sum, difference, scalar multiple).
template <class S>
concept hilbert_space = requires(S const& s, typename S::element_type const& a) {
    { s.inner(a, a) } -> std::convertible_to<double>;
    { a + a } -> std::convertible_to<typename S::element_type>;
    { a - a } -> std::convertible_to<typename S::element_type>;
    { 2.0 * a } -> std::convertible_to<typename S::element_type>;
};

struct checked_inverse {
    Eigen::MatrixXd inverse;
    // Ratio of the extreme singular values of the unscaled G (inf when singular).
    double condition = 0.0;
    bool accepted = false;
};

// SVD inverse of a symmetric Gram matrix (after diagonal equilibration),
// accepted only when every entry of G * inv(G) is within eps1 of the
// identity. No singular-value clipping.
checked_inverse invert_checked(Eigen::MatrixXd const& gram, double eps1);

template <class Element>
struct gram_extension {
    Element element;
    Eigen::MatrixXd gram;
    Eigen::VectorXd rhs;
};

template <hilbert_space Space>
class gram_state {
public:
    using element_type = typename Space::element_type;

    explicit gram_state(Space space = {}) : space_(std::move(space)) { }

    [[nodiscard]] Space const& space() const noexcept { return space_; }
    [[nodiscard]] std::size_t size() const noexcept { return basis_.size(); }
    [[nodiscard]] std::vector<element_type> const& basis() const noexcept { return basis_; }
    [[nodiscard]] Eigen::MatrixXd const& gram() const noexcept { return gram_; }
    [[nodiscard]] Eigen::MatrixXd const& inverse() const noexcept { return inverse_; }
    [[nodiscard]] Eigen::VectorXd const& rhs() const noexcept { return rhs_; }
    [[nodiscard]] Eigen::VectorXd const& alpha() const noexcept { return alpha_; }
    [[nodiscard]] double condition() const noexcept { return condition_; }

    // Adds the last row/column of G (charged 2k-1 traversals) and one more
    // right-hand side entry <target, v> (1 traversal), where k is the new size.
    [[nodiscard]] gram_extension<element_type> extend(element_type v, element_type const& target, budget_meter& meter) const
    {
        auto const k = static_cast<Eigen::Index>(basis_.size()) + 1;
        gram_extension<element_type> ext { std::move(v), Eigen::MatrixXd(k, k), Eigen::VectorXd(k) };
        ext.gram.topLeftCorner(k - 1, k - 1) = gram_;
        for (Eigen::Index i = 0; i + 1 < k; ++i) {
            auto const g = space_.inner(basis_[static_cast<std::size_t>(i)], ext.element);
            ext.gram(i, k - 1) = g;
            ext.gram(k - 1, i) = g;
        }
        ext.gram(k - 1, k - 1) = space_.inner(ext.element, ext.element);
        meter.charge(static_cast<std::uint64_t>(2 * k - 1));

        ext.rhs.head(k - 1) = rhs_;
        ext.rhs(k - 1) = space_.inner(target, ext.element);
        meter.charge();
        return ext;
    }

    // Commits an extension whose Gram matrix passed invert_checked and
    // re-solves the coefficients.
    void accept(gram_extension<element_type> ext, checked_inverse inv)
    {
        if (!inv.accepted) {
            throw std::logic_error("cannot accept a rejected Gram extension");
        }
        if (ext.gram.rows() != static_cast<Eigen::Index>(basis_.size()) + 1) {
            throw std::logic_error("Gram extension does not match the current basis");
        }
        basis_.push_back(std::move(ext.element));
        gram_ = std::move(ext.gram);
        rhs_ = std::move(ext.rhs);
        inverse_ = std::move(inv.inverse);
        condition_ = inv.condition;
        alpha_ = inverse_ * rhs_;
    }

    // Σ α_i v_i; requires a non-empty basis.
    [[nodiscard]] element_type combination() const
    {
        if (basis_.empty()) {
            throw std::logic_error("empty basis has no combination");
        }
        element_type out = alpha_(0) * basis_[0];
        for (std::size_t i = 1; i < basis_.size(); ++i) {
            out = out + alpha_(static_cast<Eigen::Index>(i)) * basis_[i];
        }
        return out;
    }

private:
    Space space_;
    std::vector<element_type> basis_;
    Eigen::MatrixXd gram_;
    Eigen::MatrixXd inverse_;
    Eigen::VectorXd rhs_;
    Eigen::VectorXd alpha_;
    double condition_ = 1.0;
};

template <hilbert_space Space>
gram_extension<typename Space::element_type> extend_gram(gram_state<Space> const& state,
    typename Space::element_type v, typename Space::element_type const& target, budget_meter& meter)
{
    return state.extend(std::move(v), target, meter);
}

template <hilbert_space Space>
Eigen::VectorXd const& solve_coefficients(gram_state<Space> const& state)
{
    return state.alpha();
}

} // namespace ftg
