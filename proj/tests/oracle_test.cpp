// The oracles are only useful if they are right; check them against
// answers known in closed form.

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"

TEST(oracle, least_squares_line_fit)
{
    // y = 2 + 3x exactly, then with symmetric noise that cancels
    oracle::matrix a { { 1, -1 }, { 1, 0 }, { 1, 1 } };
    auto const x = oracle::least_squares(a, { -1, 2, 5 });
    EXPECT_NEAR(x[0], 2.0, 1e-14);
    EXPECT_NEAR(x[1], 3.0, 1e-14);
    auto const y = oracle::least_squares(a, { -1 + 0.5, 2 - 1.0, 5 + 0.5 });
    EXPECT_NEAR(y[0], 2.0, 1e-14);
    EXPECT_NEAR(y[1], 3.0, 1e-14);
}

TEST(oracle, inverse_and_multiply)
{
    oracle::matrix const a { { 4, 7 }, { 2, 6 } };
    auto const inv = oracle::inverse(a);
    ASSERT_TRUE(inv.has_value());
    EXPECT_NEAR((*inv)[0][0], 0.6, 1e-15);
    EXPECT_NEAR((*inv)[0][1], -0.7, 1e-15);
    EXPECT_NEAR((*inv)[1][0], -0.2, 1e-15);
    EXPECT_NEAR((*inv)[1][1], 0.4, 1e-15);
    auto const id = oracle::multiply(a, *inv);
    EXPECT_NEAR(id[0][0], 1.0, 1e-15);
    EXPECT_NEAR(id[0][1], 0.0, 1e-15);
    EXPECT_FALSE(oracle::inverse({ { 1, 2 }, { 2, 4 } }).has_value());
}

TEST(oracle, rank)
{
    EXPECT_EQ(oracle::rank({ { 1, 2, 3 }, { 2, 4, 6 } }), 1U);
    EXPECT_EQ(oracle::rank({ { 1, 0, 0 }, { 0, 1, 0 }, { 1, 1, 0 } }), 2U);
    EXPECT_EQ(oracle::rank({ { 1, 0 }, { 0, 1e-3 } }), 2U);
    EXPECT_EQ(oracle::rank({ { 0, 0 } }), 0U);
}

TEST(oracle, integrate)
{
    EXPECT_NEAR(oracle::integrate([](double x) { return x * x; }, 0.0, 3.0), 9.0, 1e-12);
    EXPECT_NEAR(oracle::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi), 2.0, 1e-12);
    EXPECT_NEAR(oracle::integrate([](double x) { return std::exp(x); }, -1.0, 1.0), std::exp(1.0) - std::exp(-1.0), 1e-12);
}

TEST(oracle, chi_square)
{
    EXPECT_EQ(oracle::chi_square_uniform({ 10, 10, 10 }), 0.0);
    // expected 10 each: (5^2 + 5^2) / 10
    EXPECT_DOUBLE_EQ(oracle::chi_square_uniform({ 5, 15, 10 }), 5.0);
}

TEST(oracle, tournament_probability)
{
    EXPECT_DOUBLE_EQ(oracle::tournament_best_probability(1, 2), 1.0);
    EXPECT_DOUBLE_EQ(oracle::tournament_best_probability(2, 1), 0.5);
    EXPECT_DOUBLE_EQ(oracle::tournament_best_probability(4, 2), 7.0 / 16.0);
    EXPECT_NEAR(oracle::tournament_best_probability(5, 3), 1.0 - std::pow(0.8, 3), 1e-15);
}
