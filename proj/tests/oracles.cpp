#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracle {

std::vector<double> least_squares(matrix a, std::vector<double> b)
{
    auto const m = a.size();
    auto const n = m == 0 ? 0 : a[0].size();
    if (m < n || b.size() != m) {
        throw std::invalid_argument("least_squares: shape");
    }
    for (std::size_t k = 0; k < n; ++k) {
        double norm = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            norm += a[i][k] * a[i][k];
        }
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            throw std::invalid_argument("least_squares: rank deficient");
        }
        double const alpha = a[k][k] > 0 ? -norm : norm;
        std::vector<double> v(m, 0.0);
        v[k] = a[k][k] - alpha;
        for (std::size_t i = k + 1; i < m; ++i) {
            v[i] = a[i][k];
        }
        double vv = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            vv += v[i] * v[i];
        }
        if (vv == 0.0) {
            continue;
        }
        // H = I - 2 v v^T / (v^T v) applied to the trailing columns and b
        for (std::size_t j = k; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = k; i < m; ++i) {
                s += v[i] * a[i][j];
            }
            s = 2.0 * s / vv;
            for (std::size_t i = k; i < m; ++i) {
                a[i][j] -= s * v[i];
            }
        }
        double s = 0.0;
        for (std::size_t i = k; i < m; ++i) {
            s += v[i] * b[i];
        }
        s = 2.0 * s / vv;
        for (std::size_t i = k; i < m; ++i) {
            b[i] -= s * v[i];
        }
    }
    std::vector<double> x(n, 0.0);
    for (std::size_t k = n; k-- > 0;) {
        double s = b[k];
        for (std::size_t j = k + 1; j < n; ++j) {
            s -= a[k][j] * x[j];
        }
        x[k] = s / a[k][k];
    }
    return x;
}

std::optional<matrix> inverse(matrix a, double tiny)
{
    auto const n = a.size();
    matrix inv(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) {
        inv[i][i] = 1.0;
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r) {
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) {
                piv = r;
            }
        }
        if (!(std::abs(a[piv][c]) > tiny)) {
            return std::nullopt;
        }
        std::swap(a[c], a[piv]);
        std::swap(inv[c], inv[piv]);
        double const d = a[c][c];
        for (std::size_t j = 0; j < n; ++j) {
            a[c][j] /= d;
            inv[c][j] /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c || a[r][c] == 0.0) {
                continue;
            }
            double const f = a[r][c];
            for (std::size_t j = 0; j < n; ++j) {
                a[r][j] -= f * a[c][j];
                inv[r][j] -= f * inv[c][j];
            }
        }
    }
    return inv;
}

std::size_t rank(matrix a, double rel_tol)
{
    double scale = 0.0;
    for (auto const& row : a) {
        for (auto v : row) {
            scale = std::max(scale, std::abs(v));
        }
    }
    if (scale == 0.0) {
        return 0;
    }
    auto const rows = a.size();
    auto const cols = a[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        std::size_t piv = r;
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (std::abs(a[i][c]) > std::abs(a[piv][c])) {
                piv = i;
            }
        }
        if (std::abs(a[piv][c]) <= rel_tol * scale) {
            continue;
        }
        std::swap(a[r], a[piv]);
        for (std::size_t i = r + 1; i < rows; ++i) {
            double const f = a[i][c] / a[r][c];
            for (std::size_t j = c; j < cols; ++j) {
                a[i][j] -= f * a[r][j];
            }
        }
        ++r;
    }
    return r;
}

namespace {

    double simpson(std::function<double(double)> const& f, double a, double fa, double b, double fb, double m, double fm,
        double whole, double tol, int depth)
    {
        double const lm = 0.5 * (a + m);
        double const rm = 0.5 * (m + b);
        double const flm = f(lm);
        double const frm = f(rm);
        double const left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        double const right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        double const delta = left + right - whole;
        if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
            return left + right + delta / 15.0;
        }
        return simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1)
            + simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
    }

} // namespace

double integrate(std::function<double(double)> const& f, double a, double b, double tol)
{
    // split first so a symmetric integrand cannot fool the initial estimate
    constexpr int pieces = 16;
    double total = 0.0;
    for (int k = 0; k < pieces; ++k) {
        double const lo = a + (b - a) * k / pieces;
        double const hi = a + (b - a) * (k + 1) / pieces;
        double const mid = 0.5 * (lo + hi);
        double const flo = f(lo);
        double const fhi = f(hi);
        double const fmid = f(mid);
        double const whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += simpson(f, lo, flo, hi, fhi, mid, fmid, whole, tol / pieces, 40);
    }
    return total;
}

double chi_square_uniform(std::vector<std::size_t> const& counts)
{
    double total = 0.0;
    for (auto c : counts) {
        total += static_cast<double>(c);
    }
    double const expected = total / static_cast<double>(counts.size());
    double stat = 0.0;
    for (auto c : counts) {
        double const d = static_cast<double>(c) - expected;
        stat += d * d / expected;
    }
    return stat;
}

double tournament_best_probability(std::size_t m, std::size_t s)
{
    // enumerate all m^s ordered draws
    std::size_t total = 1;
    for (std::size_t i = 0; i < s; ++i) {
        total *= m;
    }
    std::size_t wins = 0;
    for (std::size_t code = 0; code < total; ++code) {
        auto c = code;
        bool hit = false;
        for (std::size_t i = 0; i < s; ++i) {
            hit = hit || c % m == 0;
            c /= m;
        }
        wins += hit ? 1 : 0;
    }
    return static_cast<double>(wins) / static_cast<double>(total);
}

matrix multiply(matrix const& a, matrix const& b)
{
    matrix out(a.size(), std::vector<double>(b[0].size(), 0.0));
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < b.size(); ++k) {
            for (std::size_t j = 0; j < b[0].size(); ++j) {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

} // namespace oracle
