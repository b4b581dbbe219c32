#include "udn/montecarlo.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "udn/analytic.hpp"
#include "udn/error.hpp"

namespace udn
{
namespace
{

SimSpec small_spec(double lambda_ue, std::size_t n = 2000)
{
    SimSpec s;
    s.lambda_an = 100;
    s.lambda_ue = lambda_ue;
    s.n_trials = n;
    s.master_seed = 7;
    return s;
}

TEST(SimSpec, validation)
{
    auto s = small_spec(100);
    EXPECT_NO_THROW(s.validate());
    EXPECT_DOUBLE_EQ(s.tau(), 1.0);
    s.lambda_ue = 0;
    EXPECT_TRUE(std::isinf(s.tau()));
    s.lambda_an = 0;
    EXPECT_THROW(s.validate(), InvalidParameter);
    s = small_spec(-1);
    EXPECT_THROW(s.validate(), InvalidParameter);
    s = small_spec(1, 0);
    EXPECT_THROW(s.validate(), InvalidParameter);
}

TEST(GuardRadius, expected_an_count)
{
    auto s = small_spec(100);
    double const r = guard_radius_m(s);
    EXPECT_NEAR(M_PI * r * r / 1e6 * s.lambda_an, 500, 1e-9);
    s.lambda_ue = s.lambda_an / 0.01;
    double const r2 = guard_radius_m(s);
    EXPECT_NEAR(M_PI * r2 * r2 / 1e6 * s.lambda_an, 2000, 1e-9);
}

TEST(RunTrials, independent_of_worker_count)
{
    auto const spec = small_spec(200, 300);
    auto const one = run_trials(spec, {1, false});
    auto const many = run_trials(spec, {4, false});
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i)
    {
        EXPECT_EQ(one[i].sir, many[i].sir);
        EXPECT_EQ(one[i].rate, many[i].rate);
        EXPECT_EQ(one[i].serving_load, many[i].serving_load);
    }
}

TEST(RunTrials, rate_is_shared_log_rate)
{
    auto const spec = small_spec(300, 500);
    double const theta0 = db_to_linear(spec.params.theta0_db);
    for (auto const& t : run_trials(spec))
    {
        ASSERT_GE(t.serving_load, 1u);
        ASSERT_GE(t.n_access_nodes, 1u);
        double const expected
            = t.sir < theta0 ? 0.0 : std::log2(1 + t.sir) / t.serving_load;
        EXPECT_DOUBLE_EQ(t.rate, expected);
    }
}

TEST(Coverage, all_active_matches_analytic)
{
    auto spec = small_spec(0, 20000);
    spec.activity = InterfererActivity::all_active;
    double const theta_db = -6;
    auto const est = estimate_coverage(spec, theta_db);
    double const exact
        = coverage_probability(db_to_linear(theta_db), spec.params.alpha, 1);
    EXPECT_NEAR(est.probability, exact, 3 * est.std_error);
    EXPECT_EQ(est.n_trials, 20000u);
}

TEST(Coverage, outage_mass_is_sir_below_threshold)
{
    // One subchannel, every trial single-user: rate is zero exactly when the
    // SIR misses the threshold
    auto spec = small_spec(0, 3000);
    spec.params.n_subchannels = 1;
    spec.activity = InterfererActivity::all_active;
    auto const trials = run_trials(spec);
    auto const cov = coverage_from_trials(trials, spec.params.theta0_db);
    auto const rates = rates_of(trials);
    double const zeros
        = static_cast<double>(std::count(rates.begin(), rates.end(), 0.0))
          / static_cast<double>(rates.size());
    EXPECT_DOUBLE_EQ(zeros, 1 - cov.probability);
}

TEST(Coverage, rejects_unsupported_modes)
{
    auto spec = small_spec(100, 10);
    EXPECT_THROW(estimate_coverage(spec, 0.0), InvalidParameter);
    spec.activity = InterfererActivity::all_active;
    spec.params.noise_psd_dbm_hz = -174;
    EXPECT_THROW(estimate_coverage(spec, 0.0), InvalidParameter);
}

TEST(Rates, sparse_users_behave_like_single_user)
{
    auto spec = small_spec(0.01, 2000);
    spec.params.noise_psd_dbm_hz = -174;
    auto const plain = rates_of(run_trials(spec));
    auto const single = rates_of(run_trials(spec, {1, true}));
    std::size_t differ = 0;
    for (std::size_t i = 0; i < plain.size(); ++i)
        differ += plain[i] != single[i];
    // Only trials where another UE shares the serving cell can differ
    EXPECT_LE(differ, plain.size() / 100);
    EXPECT_NEAR(quantile(empirical_cdf(plain), 0.5),
                quantile(empirical_cdf(single), 0.5), 1e-6);
}

TEST(Rates, per_trial_monotone_in_tau)
{
    // Fixed AN density and seed: lower tau only adds UEs
    std::vector<std::vector<double>> rates;
    for (double tau : {0.5, 1.0, 2.0, 4.0})
        rates.push_back(rates_of(run_trials(small_spec(100 / tau, 800))));
    for (std::size_t k = 1; k < rates.size(); ++k)
    {
        for (std::size_t i = 0; i < rates[k].size(); ++i)
            ASSERT_GE(rates[k][i], rates[k - 1][i]) << "trial " << i;
        EXPECT_GE(quantile(empirical_cdf(rates[k]), 0.5),
                  quantile(empirical_cdf(rates[k - 1]), 0.5));
    }
}

}  // namespace
}  // namespace udn
