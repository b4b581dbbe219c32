#include "udn/planner.hpp"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "udn/analytic.hpp"
#include "udn/error.hpp"

namespace udn
{
namespace
{

MedianRateEngine semianalytic()
{
    return MedianRateEngine(EngineConfig{});
}

TEST(EngineKind, names)
{
    EXPECT_EQ(engine_from_string("montecarlo"), EngineKind::montecarlo);
    EXPECT_EQ(to_string(EngineKind::semianalytic), "semianalytic");
    EXPECT_THROW(engine_from_string("exact"), InvalidParameter);
}

TEST(MedianRateEngine, memoizes_and_validates)
{
    auto engine = semianalytic();
    double const m = engine.median(1.0);
    EXPECT_DOUBLE_EQ(m, SemianalyticRateModel(1.0, ChannelParams{}).median());
    engine.median(1.0);
    EXPECT_EQ(engine.evaluations(), 1u);
    EXPECT_EQ(engine.evaluate(1.0).slack, 0.0);
    EXPECT_THROW(engine.evaluate(0), InvalidParameter);
    EXPECT_THROW(engine.evaluate(INFINITY), InvalidParameter);

    EngineConfig bad;
    bad.mc_trials = 0;
    EXPECT_THROW(MedianRateEngine{bad}, InvalidParameter);
}

TEST(MedianRateEngine, montecarlo_is_monotone_under_common_numbers)
{
    EngineConfig cfg;
    cfg.kind = EngineKind::montecarlo;
    cfg.mc_trials = 600;
    MedianRateEngine engine(cfg);
    double prev = 0;
    for (double tau : {0.25, 0.5, 1.0, 2.0, 4.0})
    {
        auto const est = engine.evaluate(tau);
        EXPECT_GE(est.median, prev);
        EXPECT_GT(est.slack, 0);
        prev = est.median;
    }
}

TEST(MinTau, hits_target_within_tolerance)
{
    auto engine = semianalytic();
    double prev = 0;
    for (double r0 : {0.02, 0.1, 0.5, 1.0, 4.0})
    {
        PlannerQuery q;
        q.target_median_rate = r0;
        q.tolerance = 1e-4;
        auto const res = min_tau(q, engine);
        EXPECT_TRUE(res.within_tolerance);
        // Independent check through a fresh model
        double const m
            = SemianalyticRateModel(res.tau_min, ChannelParams{}).median();
        EXPECT_NEAR(m, r0, 1e-4 * r0);
        EXPECT_GT(res.tau_min, prev);
        prev = res.tau_min;
    }
}

TEST(MinTau, bracket_errors)
{
    auto engine = semianalytic();
    PlannerQuery q;
    q.target_median_rate = 100;
    EXPECT_THROW(min_tau(q, engine), BracketError);
    q.target_median_rate = 1e-6;
    EXPECT_THROW(min_tau(q, engine), BracketError);
    q.target_median_rate = 1;
    q.tau_lo = 10;
    q.tau_hi = 1;
    EXPECT_THROW(min_tau(q, engine), InvalidParameter);
}

TEST(Regression, exact_line)
{
    std::vector<double> const x{1, 2, 3, 4};
    std::vector<double> const y{3, 5, 7, 9};
    auto const fit = linear_fit(x, y);
    EXPECT_NEAR(fit.slope, 2, 1e-14);
    EXPECT_NEAR(fit.intercept, 1, 1e-14);
    EXPECT_NEAR(fit.r_squared, 1, 1e-14);
    std::vector<double> const same{2, 2};
    EXPECT_THROW(linear_fit(same, same), InvalidParameter);
}

TEST(Regression, spread)
{
    std::vector<double> const r0{0.01, 0.02, 0.04};
    std::vector<double> const lin{0.3, 0.6, 1.2};
    EXPECT_NEAR(proportionality_spread(r0, lin), 0, 1e-14);
    std::vector<double> const off{0.3, 0.6, 1.5};
    EXPECT_NEAR(proportionality_spread(r0, off), 0.25, 1e-12);
}

TEST(Tradeoff, unit_point_at_full_factor)
{
    auto engine = semianalytic();
    std::vector<double> const x{1, 10, 100};
    auto const curve = tradeoff_curve(5, 100, 100, x, engine);
    ASSERT_EQ(curve.points.size(), 3u);
    EXPECT_DOUBLE_EQ(curve.points[2].tau, 0.05);
    EXPECT_DOUBLE_EQ(curve.points[2].rate_ratio, 1.0);
    EXPECT_DOUBLE_EQ(curve.points[0].tau, 5.0);
    // More UEs per AN always lowers the per-UE rate
    EXPECT_GT(curve.points[0].rate_ratio, curve.points[1].rate_ratio);
    EXPECT_GT(curve.points[1].rate_ratio, 1.0);

    std::vector<double> const bad{2, 1};
    EXPECT_THROW(tradeoff_curve(5, 100, 100, bad, engine), InvalidParameter);
}

TEST(AreaCapacity, ties_go_to_larger_x)
{
    TradeoffCurve c;
    c.base_lambda_an = 2;
    c.base_lambda_ue = 10;
    c.base_median = 0.5;
    c.densification_factor = 10;
    c.points = {{1, 2, 0}, {2, 3, 0}, {4, 3, 0}, {8, 1, 0}};
    auto const cap = area_capacity(c);
    EXPECT_EQ(cap.argmax, 2u);
    EXPECT_DOUBLE_EQ(cap.points[1].capacity, 20 * 3 * 0.5);
}

TEST(Csv, headers)
{
    std::ostringstream a;
    std::vector<MinTauRow> rows{{0.5, 1.25}};
    write_min_tau_csv(a, rows);
    EXPECT_EQ(a.str(), "r0,tau_min\n0.5,1.25\n");

    TradeoffCurve c;
    c.points = {{1, 1, 1}};
    std::ostringstream b;
    write_tradeoff_csv(b, c, area_capacity(c));
    EXPECT_EQ(b.str().substr(0, 28), "x,rate_ratio,area_capacity\n1");
}

}  // namespace
}  // namespace udn
