#include "udn/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "udn/error.hpp"

namespace udn
{
namespace
{

ChannelParams noisy()
{
    ChannelParams p;
    p.noise_psd_dbm_hz = -174;
    return p;
}

// Thermal noise over one RB, in dBm, computed independently
double rb_noise_dbm(ChannelParams const& p, std::size_t n_rb)
{
    return p.noise_psd_dbm_hz
           + 10 * std::log10(p.bandwidth_hz / static_cast<double>(n_rb));
}

// ANs along the x axis; UE u sits next to AN serving[u]
CoordProblem line_problem(std::vector<std::size_t> const& serving,
                          std::size_t n_ans, GainMatrix gains,
                          std::size_t n_rb)
{
    NetworkSnapshot snap;
    snap.window = Window::square({}, 10000);
    for (std::size_t a = 0; a < n_ans; ++a)
        snap.ans.points.push_back({1000.0 * static_cast<double>(a), 0});
    for (std::size_t u = 0; u < serving.size(); ++u)
        snap.ues.points.push_back(
            {1000.0 * static_cast<double>(serving[u]), 1 + double(u)});
    return make_problem(snap, std::move(gains), noisy(), n_rb);
}

CoordProblem pair_problem(double g_s, double g_i, std::size_t n_rb)
{
    GainMatrix g(2, 2, g_i);
    g(0, 0) = g_s;
    g(1, 1) = g_s;
    return line_problem({0, 1}, 2, g, n_rb);
}

double min_rate_of(CoordProblem const& pr, std::vector<std::size_t> rb_of)
{
    return evaluate_assignment(pr, std::move(rb_of)).min_rate;
}

// Every RB assignment of the links, keeping only balanced ones
std::vector<std::vector<std::size_t>> all_assignments(CoordProblem const& pr,
                                                      bool balanced_only)
{
    std::vector<std::vector<std::size_t>> out;
    std::size_t const n = pr.n_ues();
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i)
        total *= pr.n_rb;
    for (std::size_t code = 0; code < total; ++code)
    {
        std::vector<std::size_t> rb(n);
        std::size_t c = code;
        for (auto& r : rb)
        {
            r = c % pr.n_rb;
            c /= pr.n_rb;
        }
        if (!balanced_only || is_balanced_assignment(pr, rb))
            out.push_back(rb);
    }
    return out;
}

TEST(PolicyId, names)
{
    for (auto p : {PolicyId::baseline, PolicyId::policy1, PolicyId::policy2})
        EXPECT_EQ(policy_from_string(to_string(p)), p);
    EXPECT_THROW(policy_from_string("policy3"), InvalidParameter);
}

TEST(Baseline, single_link_full_bandwidth)
{
    GainMatrix g(1, 1, 1e-10);
    auto const pr = line_problem({0}, 1, g, 1);
    double const snr_db = 30 - 100 - rb_noise_dbm(pr.params, 1);
    double const expected = std::log2(1 + std::pow(10, snr_db / 10));
    for (auto policy :
         {PolicyId::baseline, PolicyId::policy1, PolicyId::policy2})
    {
        auto const a = evaluate_policy(pr, policy);
        EXPECT_NEAR(a.min_rate, expected, 1e-12) << to_string(policy);
        EXPECT_DOUBLE_EQ(a.share[0], 1.0);
        EXPECT_NEAR(a.power_dbm[0], 30, 1e-12);
    }
}

TEST(Baseline, one_an_two_ues_orthogonal)
{
    GainMatrix g(1, 2, 1e-10);
    g(0, 1) = 4e-10;
    auto const pr = line_problem({0, 0}, 1, g, 2);
    auto const a = evaluate_baseline(pr);
    EXPECT_NE(a.rb_of[0], a.rb_of[1]);
    double const noise_dbm = rb_noise_dbm(pr.params, 2);
    for (std::size_t u = 0; u < 2; ++u)
    {
        double const snr_db = 30 + 10 * std::log10(g(0, u)) - noise_dbm;
        EXPECT_DOUBLE_EQ(a.share[u], 0.5);
        EXPECT_NEAR(a.sinr[u], std::pow(10, snr_db / 10),
                    1e-12 * a.sinr[u]);
        EXPECT_NEAR(a.rates[u], 0.5 * std::log2(1 + a.sinr[u]), 1e-14);
    }
}

TEST(Baseline, symmetric_pair_on_one_rb)
{
    double const gs = 1e-10, gi = 3e-11;
    auto const pr = pair_problem(gs, gi, 1);
    auto const a = evaluate_baseline(pr);
    double const p = 1.0;  // 30 dBm
    double const n = std::pow(10, (rb_noise_dbm(pr.params, 1) - 30) / 10);
    double const sinr = gs * p / (gi * p + n);
    EXPECT_NEAR(a.sinr[0], sinr, 1e-12 * sinr);
    EXPECT_DOUBLE_EQ(a.rates[0], a.rates[1]);
    EXPECT_NEAR(a.min_rate, std::log2(1 + sinr), 1e-12);

    // Symmetric power control cannot beat full power
    auto const p2 = evaluate_policy2(pr);
    EXPECT_NEAR(p2.power_dbm[0], 30, 1e-9);
    EXPECT_NEAR(p2.power_dbm[1], 30, 1e-9);
    EXPECT_NEAR(p2.min_rate, a.min_rate, 1e-12);
}

TEST(Policy1, separates_strong_conflict)
{
    double const gs = 1e-10;
    auto const pr = pair_problem(gs, gs / 2, 2);
    auto const a = evaluate_policy1(pr);
    EXPECT_NE(a.rb_of[0], a.rb_of[1]);
    double const snr_db
        = 30 + 10 * std::log10(gs) - rb_noise_dbm(pr.params, 2);
    double const expected = 0.5 * std::log2(1 + std::pow(10, snr_db / 10));
    EXPECT_NEAR(a.rates[0], expected, 1e-12);
    EXPECT_NEAR(a.rates[1], expected, 1e-12);
}

TEST(Policy1, negligible_conflict_picks_best_assignment)
{
    auto const pr = pair_problem(1e-10, 1e-22, 2);
    double best = 0;
    for (auto const& rb : all_assignments(pr, false))
        best = std::max(best, min_rate_of(pr, rb));
    EXPECT_NEAR(evaluate_policy1(pr).min_rate, best, 1e-12 * best);
}

TEST(Policy1, four_links_beat_single_rb)
{
    ChannelParams const p = noisy();
    auto const pr = make_problem(2, 4, Window::square({}, 300), p, 2, 17, 0);
    double const greedy = evaluate_policy1(pr).min_rate;
    auto const all = all_assignments(pr, false);
    ASSERT_EQ(all.size(), 16u);
    EXPECT_GE(greedy, min_rate_of(pr, all.front()));
    double best = 0;
    for (auto const& rb : all_assignments(pr, true))
        best = std::max(best, min_rate_of(pr, rb));
    EXPECT_GE(greedy, 0.9 * best);
}

TEST(Policy2, two_link_grid_search)
{
    // Asymmetric links on one RB
    GainMatrix g(2, 2);
    g(0, 0) = 1e-9;
    g(1, 1) = 2e-11;
    g(0, 1) = 8e-12;
    g(1, 0) = 5e-12;
    auto const pr = line_problem({0, 1}, 2, g, 1);
    auto const p2 = evaluate_policy2(pr);

    double best = 0;
    for (int i = 1; i <= 50; ++i)
    {
        for (int j = 1; j <= 50; ++j)
        {
            std::vector<double> dbm{30 + 10 * std::log10(i / 50.0),
                                    30 + 10 * std::log10(j / 50.0)};
            best = std::max(
                best, evaluate_assignment(pr, {0, 0}, dbm).min_rate);
        }
    }
    EXPECT_GE(p2.min_rate, 0.99 * best);
    EXPECT_GT(p2.min_rate, evaluate_policy1(pr).min_rate);
    EXPECT_LE(std::max(p2.power_dbm[0], p2.power_dbm[1]), 30 + 1e-9);
}

TEST(Policies, structural_invariants)
{
    ChannelParams const p = noisy();
    for (std::uint64_t seed = 0; seed < 40; ++seed)
    {
        std::size_t const n_ans = 1 + seed % 30;
        auto const pr = make_problem(n_ans, 50, Window::square({}, 1000), p,
                                     4, seed, seed);
        auto const base = evaluate_baseline(pr);
        auto const p1 = evaluate_policy1(pr);
        auto const p2 = evaluate_policy2(pr);
        for (auto const* a : {&base, &p1, &p2})
        {
            EXPECT_TRUE(is_balanced_assignment(pr, a->rb_of));
            EXPECT_EQ(a->assoc, pr.snapshot.assoc);
            EXPECT_DOUBLE_EQ(a->min_rate,
                             *std::min_element(a->rates.begin(),
                                               a->rates.end()));
            for (double dbm : a->power_dbm)
                EXPECT_LE(dbm, p.tx_power_dbm + 1e-9);
            double total_share = 0;
            for (double s : a->share)
                total_share += s;
            EXPECT_LE(total_share, static_cast<double>(n_ans) + 1e-12);
        }
        // No AN serves two UEs on one RB unless it is overloaded
        for (std::size_t u = 0; u < pr.n_ues(); ++u)
        {
            for (std::size_t v = u + 1; v < pr.n_ues(); ++v)
            {
                std::size_t const a = pr.snapshot.assoc[u];
                if (a == pr.snapshot.assoc[v]
                    && pr.snapshot.loads[a] <= pr.n_rb)
                {
                    EXPECT_NE(p1.rb_of[u], p1.rb_of[v]);
                }
            }
        }
        EXPECT_EQ(p2.rb_of, p1.rb_of);
        EXPECT_GE(p2.min_rate, p1.min_rate) << "seed " << seed;
    }
}

TEST(Policy1, beats_random_assignment_in_most_seeds)
{
    ChannelParams const p = noisy();
    int wins = 0;
    int const n = 100;
    for (int seed = 0; seed < n; ++seed)
    {
        auto const pr = make_problem(50, 50, Window::square({}, 1000), p, 4,
                                     1000 + seed, 0);
        // Random balanced assignment: shuffled UEs, random starting RB
        Engine rng = make_stream(seed, 1, StreamPurpose::test);
        std::vector<std::size_t> order(pr.n_ues());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        std::vector<std::size_t> next(pr.n_ans());
        for (auto& o : next)
            o = rng() % pr.n_rb;
        std::vector<std::size_t> rb(pr.n_ues());
        for (auto u : order)
            rb[u] = next[pr.snapshot.assoc[u]]++ % pr.n_rb;
        wins += evaluate_policy1(pr).min_rate >= min_rate_of(pr, rb);
    }
    EXPECT_GE(wins, 95);
}

TEST(EvaluateAssignment, rejects_bad_input)
{
    auto const pr = pair_problem(1e-10, 1e-11, 2);
    EXPECT_THROW(evaluate_assignment(pr, {0, 2}), InvalidParameter);
    EXPECT_THROW(evaluate_assignment(pr, {0}), InvalidParameter);
    EXPECT_THROW(evaluate_assignment(pr, {0, 1}, {31, 30}), InvalidParameter);
    // A silent link gets no rate
    auto const a = evaluate_assignment(pr, {0, 1}, {-INFINITY, 30});
    EXPECT_EQ(a.rates[0], 0.0);
    EXPECT_EQ(a.min_rate, 0.0);
}

TEST(Problem, validation)
{
    GainMatrix g(1, 1, 0.0);
    EXPECT_THROW(line_problem({0}, 1, g, 1), InvalidParameter);
    GainMatrix wrong(2, 1, 1.0);
    EXPECT_THROW(line_problem({0}, 1, wrong, 1), InvalidParameter);
    ChannelParams quiet;
    EXPECT_THROW(make_problem(1, 1, Window::square({}, 10), quiet, 1, 0, 0),
                 InvalidParameter);
    EXPECT_THROW(make_problem(0, 1, Window::square({}, 10), noisy(), 1, 0, 0),
                 NoServerError);
}

TEST(Problem, common_numbers_across_an_counts)
{
    auto const w = Window::square({}, 1000);
    auto const few = make_problem(5, 20, w, noisy(), 4, 3, 9);
    auto const many = make_problem(40, 20, w, noisy(), 4, 3, 9);
    EXPECT_EQ(few.snapshot.ues.points, many.snapshot.ues.points);
    for (std::size_t a = 0; a < 5; ++a)
    {
        EXPECT_EQ(few.snapshot.ans.points[a], many.snapshot.ans.points[a]);
        EXPECT_EQ(few.rb_offset[a], many.rb_offset[a]);
        for (std::size_t u = 0; u < 20; ++u)
            EXPECT_EQ(few.gains(a, u), many.gains(a, u));
    }
    auto const other = make_problem(5, 20, w, noisy(), 4, 3, 10);
    EXPECT_NE(few.snapshot.ues.points, other.snapshot.ues.points);
}

TEST(Curves, an_count_and_validation)
{
    EXPECT_EQ(an_count(0.001, 50), 1u);
    EXPECT_EQ(an_count(0.5, 50), 25u);
    EXPECT_EQ(an_count(0.11, 50), 6u);
    EXPECT_EQ(an_count(20, 50), 1000u);

    CurveSpec s;
    s.params = noisy();
    EXPECT_THROW(s.validate(), InvalidParameter);
    s.tau_grid = {1, 0.5};
    EXPECT_THROW(s.validate(), InvalidParameter);
    s.tau_grid = {0.5, 1};
    EXPECT_NO_THROW(s.validate());
    s.params = ChannelParams{};
    EXPECT_THROW(s.validate(), InvalidParameter);
}

TEST(Curves, paired_and_worker_independent)
{
    CurveSpec s;
    s.params = noisy();
    s.tau_grid = {0.2, 1, 4};
    s.n_ues = 20;
    s.n_realizations = 6;
    std::vector<PolicyId> const all{PolicyId::policy2, PolicyId::baseline,
                                    PolicyId::policy1};
    auto const one = guaranteed_rate_curves(s, all, 1);
    auto const three = guaranteed_rate_curves(s, all, 3);
    ASSERT_EQ(one.size(), 3u);
    for (auto const& [policy, curve] : one)
    {
        auto const& other = three.at(policy);
        for (std::size_t i = 0; i < curve.size(); ++i)
        {
            EXPECT_EQ(curve[i].mean_min_rate, other[i].mean_min_rate);
            EXPECT_EQ(curve[i].std_error, other[i].std_error);
        }
    }
    auto const single = guaranteed_rate_curve(s, PolicyId::policy1, 2);
    for (std::size_t i = 0; i < single.size(); ++i)
    {
        EXPECT_EQ(single[i].mean_min_rate,
                  one.at(PolicyId::policy1)[i].mean_min_rate);
        EXPECT_GE(one.at(PolicyId::policy2)[i].mean_min_rate,
                  one.at(PolicyId::policy1)[i].mean_min_rate);
    }
}

TEST(Savings, interpolation_and_errors)
{
    GuaranteedRateCurve const c{{1, 0.1, 0}, {10, 1.0, 0}, {100, 2.0, 0}};
    EXPECT_DOUBLE_EQ(required_tau(c, 0.05, PolicyId::baseline), 1.0);
    EXPECT_DOUBLE_EQ(required_tau(c, 0.1, PolicyId::baseline), 1.0);
    EXPECT_NEAR(required_tau(c, 0.55, PolicyId::baseline), std::sqrt(10.0),
                1e-12);
    EXPECT_NEAR(required_tau(c, 2.0, PolicyId::baseline), 100, 1e-9);
    try
    {
        required_tau(c, 3.0, PolicyId::policy2);
        FAIL() << "unreachable target accepted";
    }
    catch (UnachievableTarget const& e)
    {
        EXPECT_EQ(e.policy(), "policy2");
        EXPECT_NE(std::string(e.what()).find("policy2"), std::string::npos);
    }
}

TEST(Savings, identical_curves_give_zero)
{
    GuaranteedRateCurve const c{{1, 0.1, 0}, {10, 1.0, 0}};
    std::map<PolicyId, GuaranteedRateCurve> curves{
        {PolicyId::baseline, c}, {PolicyId::policy1, c}};
    std::vector<double> const targets{0.2, 0.7};
    auto const rows = densification_savings(targets, curves);
    ASSERT_EQ(rows.size(), 2u);
    for (auto const& r : rows)
        EXPECT_EQ(r.savings_pct, 0.0);

    // Half the tau everywhere means 50% savings
    GuaranteedRateCurve const half{{0.5, 0.1, 0}, {5, 1.0, 0}};
    curves[PolicyId::policy2] = half;
    for (auto const& r : densification_savings(targets, curves))
    {
        if (r.policy == PolicyId::policy2)
        {
            EXPECT_NEAR(r.savings_pct, 50, 1e-9);
        }
    }
    curves.erase(PolicyId::baseline);
    EXPECT_THROW(densification_savings(targets, curves), InvalidParameter);
}

TEST(Csv, headers)
{
    std::map<PolicyId, GuaranteedRateCurve> curves{
        {PolicyId::baseline, {{1, 0.5, 0.25}}}};
    std::ostringstream a;
    write_coord_csv(a, curves);
    EXPECT_EQ(a.str(), "tau,policy,mean_min_rate,stderr\n1,baseline,0.5,0.25\n");
    std::vector<SavingsRow> rows{{0.5, PolicyId::policy1, 2, 40}};
    std::ostringstream b;
    write_savings_csv(b, rows);
    EXPECT_EQ(b.str(), "target_rate,policy,savings_pct\n0.5,policy1,40\n");
}

}  // namespace
}  // namespace udn
