#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ftg {

// Dense polynomial Σ c_i x^i in normal form: no trailing zero coefficients.
// A non-finite coefficient marks the polynomial invalid; invalidity is
// sticky through arithmetic.
class poly {
public:
    poly() = default;
    explicit poly(std::vector<double> coeffs);

    static poly constant(double c) { return poly(std::vector<double> { c }); }
    static poly monomial(std::size_t degree, double c = 1.0);

    [[nodiscard]] std::span<double const> coeffs() const noexcept { return coeffs_; }
    // -1 for the zero polynomial.
    [[nodiscard]] long degree() const noexcept { return static_cast<long>(coeffs_.size()) - 1; }
    [[nodiscard]] bool is_zero() const noexcept { return coeffs_.empty(); }
    [[nodiscard]] bool valid() const noexcept { return valid_; }
    [[nodiscard]] double operator()(double x) const noexcept;

    poly& operator+=(poly const& q);
    poly& operator-=(poly const& q);
    poly& operator*=(double s);

    friend poly operator+(poly p, poly const& q) { return p += q; }
    friend poly operator-(poly p, poly const& q) { return p -= q; }
    friend poly operator*(double s, poly p) { return p *= s; }
    friend poly operator*(poly const& p, poly const& q);

    bool operator==(poly const&) const = default;

private:
    void normalize();

    std::vector<double> coeffs_;
    bool valid_ = true;
};

inline poly poly_add(poly const& p, poly const& q) { return p + q; }
inline poly poly_sub(poly const& p, poly const& q) { return p - q; }
inline poly poly_mul(poly const& p, poly const& q) { return p * q; }

// Number of terms with a nonzero coefficient.
std::size_t span_size(poly const& p) noexcept;

// ∫_a^b x^s dx for s = 0..max_power.
std::vector<double> power_moments(double a, double b, std::size_t max_power);

// ∫_a^b p(x) q(x) dx in closed form; NaN when either operand is invalid.
double l2_inner(poly const& p, poly const& q, double a, double b);
double l2_inner(poly const& p, poly const& q, std::span<double const> moments);

} // namespace ftg
