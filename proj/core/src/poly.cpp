#include "ftg/poly.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ftg {

poly::poly(std::vector<double> coeffs)
    : coeffs_(std::move(coeffs))
{
    normalize();
}

poly poly::monomial(std::size_t degree, double c)
{
    std::vector<double> v(degree + 1, 0.0);
    v[degree] = c;
    return poly(std::move(v));
}

void poly::normalize()
{
    if (!std::all_of(coeffs_.begin(), coeffs_.end(), [](double c) { return std::isfinite(c); })) {
        valid_ = false;
    }
    while (!coeffs_.empty() && coeffs_.back() == 0.0) {
        coeffs_.pop_back();
    }
}

double poly::operator()(double x) const noexcept
{
    double acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
        acc = acc * x + *it;
    }
    return acc;
}

poly& poly::operator+=(poly const& q)
{
    if (q.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(q.coeffs_.size(), 0.0);
    }
    for (std::size_t i = 0; i < q.coeffs_.size(); ++i) {
        coeffs_[i] += q.coeffs_[i];
    }
    valid_ = valid_ && q.valid_;
    normalize();
    return *this;
}

poly& poly::operator-=(poly const& q)
{
    if (q.coeffs_.size() > coeffs_.size()) {
        coeffs_.resize(q.coeffs_.size(), 0.0);
    }
    for (std::size_t i = 0; i < q.coeffs_.size(); ++i) {
        coeffs_[i] -= q.coeffs_[i];
    }
    valid_ = valid_ && q.valid_;
    normalize();
    return *this;
}

poly& poly::operator*=(double s)
{
    for (auto& c : coeffs_) {
        c *= s;
    }
    if (!std::isfinite(s)) {
        valid_ = false;
    }
    normalize();
    return *this;
}

poly operator*(poly const& p, poly const& q)
{
    poly out;
    out.valid_ = p.valid_ && q.valid_;
    if (p.is_zero() || q.is_zero()) {
        return out;
    }
    out.coeffs_.assign(p.coeffs_.size() + q.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.coeffs_.size(); ++i) {
        auto const pi = p.coeffs_[i];
        if (pi == 0.0) {
            continue;
        }
        for (std::size_t j = 0; j < q.coeffs_.size(); ++j) {
            out.coeffs_[i + j] += pi * q.coeffs_[j];
        }
    }
    out.normalize();
    return out;
}

std::size_t span_size(poly const& p) noexcept
{
    auto const c = p.coeffs();
    return static_cast<std::size_t>(std::count_if(c.begin(), c.end(), [](double v) { return v != 0.0; }));
}

std::vector<double> power_moments(double a, double b, std::size_t max_power)
{
    if (!(a < b)) {
        throw std::invalid_argument("integration interval must satisfy a < b");
    }
    std::vector<double> m(max_power + 1);
    double pa = a;
    double pb = b;
    for (std::size_t s = 0; s <= max_power; ++s) {
        m[s] = (pb - pa) / static_cast<double>(s + 1);
        pa *= a;
        pb *= b;
    }
    return m;
}

double l2_inner(poly const& p, poly const& q, std::span<double const> moments)
{
    if (!p.valid() || !q.valid()) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    auto const pc = p.coeffs();
    auto const qc = q.coeffs();
    if (pc.empty() || qc.empty()) {
        return 0.0;
    }
    if (pc.size() + qc.size() - 1 > moments.size()) {
        throw std::out_of_range("moment table too short for the product degree");
    }
    // Σ_s m_s Σ_{i+j=s} p_i q_j, with the terms i and s-i added as a pair so
    // that swapping p and q gives a bit-identical result
    auto const coeff = [](std::span<double const> c, std::size_t i) { return i < c.size() ? c[i] : 0.0; };
    double acc = 0.0;
    for (std::size_t s = 0; s + 1 < pc.size() + qc.size(); ++s) {
        double conv = 0.0;
        for (std::size_t i = 0; 2 * i < s; ++i) {
            conv += coeff(pc, i) * coeff(qc, s - i) + coeff(pc, s - i) * coeff(qc, i);
        }
        if (s % 2 == 0) {
            conv += coeff(pc, s / 2) * coeff(qc, s / 2);
        }
        acc += conv * moments[s];
    }
    return acc;
}

double l2_inner(poly const& p, poly const& q, double a, double b)
{
    auto const need = p.coeffs().size() + q.coeffs().size();
    auto const moments = power_moments(a, b, need == 0 ? 0 : need - 1);
    return l2_inner(p, q, moments);
}

} // namespace ftg
