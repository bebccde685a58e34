#pragma once

// Reference computations that share no code with the library: plain
// vectors, textbook algorithms.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

namespace oracle {

using matrix = std::vector<std::vector<double>>;

// argmin ||A x - b||_2 by Householder QR; A is rows x cols with rows >= cols
// and full column rank.
std::vector<double> least_squares(matrix a, std::vector<double> b);

// Gauss-Jordan with partial pivoting; nullopt when a pivot is below `tiny`.
std::optional<matrix> inverse(matrix a, double tiny = 1e-300);

// Row reduction with a pivot threshold relative to the largest entry.
std::size_t rank(matrix a, double rel_tol = 1e-10);

// Adaptive Simpson quadrature to absolute tolerance `tol`.
double integrate(std::function<double(double)> const& f, double a, double b, double tol = 1e-13);

// Pearson statistic for observed counts against equal expected counts.
double chi_square_uniform(std::vector<std::size_t> const& counts);

// P(best of {1..m} wins a size-s tournament drawn with replacement).
double tournament_best_probability(std::size_t m, std::size_t s);

matrix multiply(matrix const& a, matrix const& b);

} // namespace oracle
