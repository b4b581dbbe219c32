#include "udn/rate_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <gtest/gtest.h>

#include "udn/error.hpp"
#include "udn/rng.hpp"

namespace udn
{
namespace
{

double brute_ks(std::vector<double> const& a, std::vector<double> const& b)
{
    auto frac_le = [](std::vector<double> const& s, double t) {
        return static_cast<double>(std::count_if(
                   s.begin(), s.end(), [t](double v) { return v <= t; }))
               / static_cast<double>(s.size());
    };
    double d = 0;
    for (auto const* s : {&a, &b})
    {
        for (double t : *s)
            d = std::max(d, std::abs(frac_le(a, t) - frac_le(b, t)));
    }
    return d;
}

TEST(EmpiricalCdf, four_samples)
{
    auto const cdf = empirical_cdf({4, 2, 1, 3});
    EXPECT_NO_THROW(cdf.check_invariants());
    EXPECT_EQ(cdf.grid, (std::vector<double>{1, 2, 3, 4}));
    EXPECT_EQ(cdf.cdf, (std::vector<double>{0.125, 0.375, 0.625, 0.875}));
    EXPECT_DOUBLE_EQ(quantile(cdf, 0.5), 2.5);
    EXPECT_EQ(cdf.zero_mass(), 0.0);
    EXPECT_EQ(cdf.n_trials, 4u);
}

TEST(EmpiricalCdf, outage_dominated_median_is_zero)
{
    auto const cdf = empirical_cdf({0, 0, 0, 0, 0, 0, 1, 2, 3, 4});
    EXPECT_DOUBLE_EQ(cdf.zero_mass(), 0.6);
    EXPECT_EQ(quantile(cdf, 0.5), 0.0);
    EXPECT_EQ(cdf.grid.front(), 0.0);
    EXPECT_DOUBLE_EQ(cdf.evaluate(1), 0.65);
}

TEST(EmpiricalCdf, infinite_rates_are_tail_mass)
{
    double const inf = std::numeric_limits<double>::infinity();
    auto const cdf = empirical_cdf({1, 2, inf, inf});
    EXPECT_DOUBLE_EQ(cdf.infinite_mass, 0.5);
    EXPECT_EQ(cdf.grid.size(), 2u);
    EXPECT_TRUE(std::isinf(quantile(cdf, 0.9)));
}

TEST(EmpiricalCdf, thinning_keeps_extremes_and_invariants)
{
    Engine rng = make_stream(1, 0, StreamPurpose::test);
    std::vector<double> s(20000);
    for (auto& v : s)
        v = uniform01(rng) < 0.2 ? 0.0 : exponential1(rng);
    auto const cdf = empirical_cdf(s, 100);
    EXPECT_NO_THROW(cdf.check_invariants());
    EXPECT_LE(cdf.grid.size(), 100u);
    EXPECT_EQ(cdf.grid.back(), *std::max_element(s.begin(), s.end()));
    // Interpolated CDF stays close to the sample fraction
    for (double t : {0.1, 0.5, 1.0, 2.0})
    {
        double const frac
            = static_cast<double>(
                  std::count_if(s.begin(), s.end(),
                                [t](double v) { return v <= t; }))
              / static_cast<double>(s.size());
        EXPECT_NEAR(cdf.evaluate(t), frac, 0.01);
    }
}

TEST(EmpiricalCdf, rejects_bad_input)
{
    EXPECT_THROW(empirical_cdf({}), InvalidParameter);
    EXPECT_THROW(empirical_cdf({1, -1}), InvalidParameter);
    EXPECT_THROW(empirical_cdf({1, std::nan("")}), InvalidParameter);
    auto const cdf = empirical_cdf({1, 2});
    EXPECT_THROW(quantile(cdf, 0), InvalidParameter);
    EXPECT_THROW(quantile(cdf, 1), InvalidParameter);
}

TEST(RateCdf, invariant_checks)
{
    RateCdf c;
    c.grid = {0, 1};
    c.cdf = {0.5, 0.4};
    EXPECT_THROW(c.check_invariants(), InvalidParameter);
    c.cdf = {0.5, 1.1};
    EXPECT_THROW(c.check_invariants(), InvalidParameter);
    c.grid = {1, 1};
    c.cdf = {0.1, 0.2};
    EXPECT_THROW(c.check_invariants(), InvalidParameter);
    c.grid = {1};
    EXPECT_THROW(c.check_invariants(), InvalidParameter);
}

TEST(Ks, matches_brute_force)
{
    Engine rng = make_stream(2, 0, StreamPurpose::test);
    for (int t = 0; t < 20; ++t)
    {
        std::vector<double> a(50 + t * 7), b(80 - t * 2);
        // Coarse values produce ties within and across samples
        for (auto& v : a)
            v = std::floor(uniform01(rng) * 20);
        for (auto& v : b)
            v = std::floor(uniform01(rng) * 20 + t * 0.2);
        EXPECT_NEAR(ks_distance(a, b), brute_ks(a, b), 1e-15);
    }
    std::vector<double> const x{1, 2, 3};
    EXPECT_EQ(ks_distance(x, x), 0.0);
    std::vector<double> const y{10, 11};
    EXPECT_EQ(ks_distance(x, y), 1.0);
}

TEST(RateCdf, csv_header)
{
    std::ostringstream os;
    write_csv(os, empirical_cdf({0, 1}));
    EXPECT_EQ(os.str().substr(0, 15), "rate_bps_hz,cdf");
}

}  // namespace
}  // namespace udn
