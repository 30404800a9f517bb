// Checks of the independent test oracles themselves.
#include "fixtures.hpp"
#include "oracles.hpp"

#include <varcomp/likelihood.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace varcomp;
using namespace varcomp::testing;

TEST(OneWayOracle, HandComputedSummary)
{
    // groups (2,3), (4,6), (9,8); means 2.5, 5, 8.5; grand mean 16/3
    const auto s = one_way_summary(vec({2, 3, 4, 6, 9, 8}), 3, 2);
    EXPECT_NEAR(s.grand_mean, 16.0 / 3.0, 1e-14);
    EXPECT_NEAR(s.sse, 0.5 + 2.0 + 0.5, 1e-14);
    const double ssa = 2.0 * (std::pow(2.5 - 16.0 / 3, 2) + std::pow(5.0 - 16.0 / 3, 2) +
                              std::pow(8.5 - 16.0 / 3, 2));
    EXPECT_NEAR(s.ssa, ssa, 1e-12);
    EXPECT_NEAR(s.mse(), 1.0, 1e-14);
    EXPECT_NEAR(s.msa(), 109.0 / 6.0, 1e-12);
}

TEST(OneWayOracle, HandComputedEstimates)
{
    const auto s = one_way_summary(vec({2, 3, 4, 6, 9, 8}), 3, 2);
    const Vector reml = one_way_reml_closed_form(s);
    EXPECT_NEAR(reml(0), 1.0, 1e-14);
    EXPECT_NEAR(reml(1), (109.0 / 6.0 - 1.0) / 2.0, 1e-12);
    const Vector ml = one_way_ml_closed_form(s);
    EXPECT_NEAR(ml(0), 1.0, 1e-14);
    EXPECT_NEAR(ml(1), (109.0 / 3.0 / 3.0 - 1.0) / 2.0, 1e-12);
}

TEST(OneWayOracle, HandComputedBoundary)
{
    // all group means 2: SSA = 0, SSE = 1 + 0 + 4 = 10
    const auto s = one_way_summary(vec({1, 3, 2, 2, 0, 4}), 3, 2);
    EXPECT_NEAR(s.ssa, 0.0, 1e-14);
    EXPECT_NEAR(s.sse, 10.0, 1e-14);
    const Vector reml = one_way_reml_closed_form(s);
    EXPECT_NEAR(reml(0), 2.0, 1e-14);
    EXPECT_EQ(reml(1), 0.0);
    const Vector ml = one_way_ml_closed_form(s);
    EXPECT_NEAR(ml(0), 10.0 / 6.0, 1e-14);
    EXPECT_EQ(ml(1), 0.0);
}

TEST(OneWayOracle, CriterionMatchesDirectEvaluation)
{
    const auto model = one_way_model(3, 2);
    const Vector y = vec({2, 3, 4, 6, 9, 8});
    const auto s = one_way_summary(y, 3, 2);
    for (double s0 : {0.3, 1.0, 4.0}) {
        for (double s1 : {0.0, 0.7, 12.0}) {
            const double direct = neg2_loglik(model, {vec({s.grand_mean}), vec({s0, s1})}, y);
            EXPECT_NEAR(one_way_ml_criterion(s, s0, s1), direct, 1e-12);
        }
    }
}

TEST(OneWayOracle, ZeroMeanCriterionMatchesDirectEvaluation)
{
    const auto model = build_model(Matrix(6, 0), {group_indicator(3, 2)});
    const Vector y = vec({2, 3, 4, 6, 9, 8});
    const auto s = one_way_summary(y, 3, 2);
    for (double s0 : {0.3, 1.0, 4.0}) {
        for (double s1 : {0.0, 0.7, 12.0}) {
            const double direct = neg2_loglik(model, {Vector(0), vec({s0, s1})}, y);
            EXPECT_NEAR(one_way_zero_mean_criterion(s, s0, s1), direct, 1e-12);
        }
    }
}

TEST(GridOracle, RecoversClosedFormMl)
{
    for (const Vector& y : {vec({2, 3, 4, 6, 9, 8}), vec({1, 3, 2, 2, 0, 4})}) {
        const auto s = one_way_summary(y, 3, 2);
        const auto opt = grid_minimize(
            [&](double s0, double s1) { return one_way_ml_criterion(s, s0, s1); }, 1e-3, 1e3,
            1e-4, 1e3);
        const Vector expected = one_way_ml_closed_form(s);
        EXPECT_NEAR(opt.s0, expected(0), 1e-6 * expected(0));
        EXPECT_NEAR(opt.s1, expected(1), 1e-6 * std::max(1.0, expected(1)));
    }
}

TEST(RankOracle, Basics)
{
    const auto m = tiny_model();
    EXPECT_FALSE(rank_oracle_exists(m, vec({1, 1, 1})));
    EXPECT_FALSE(rank_oracle_exists(m, vec({1, 0, 0})));
    EXPECT_TRUE(rank_oracle_exists(m, vec({0, 1, -1})));
}
