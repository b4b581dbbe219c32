#include "udn/coordination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>

#include "udn/error.hpp"
#include "udn/format.hpp"
#include "udn/parallel.hpp"
#include "udn/rng.hpp"

namespace udn
{
namespace
{
constexpr double max_sinr_target = 1e6;
constexpr int bisection_steps = 40;
constexpr int fixed_point_steps = 2000;
constexpr double fixed_point_tol = 1e-9;

//! ANs transmitting on one RB and the UEs each of them serves there.
struct RbGroup
{
    std::vector<std::size_t> ans;
    std::vector<std::vector<std::size_t>> ues;
};

struct Layout
{
    std::vector<RbGroup> rbs;
    std::vector<double> share;
};

std::vector<std::size_t> loads_of(CoordProblem const& problem)
{
    std::vector<std::size_t> loads(problem.n_ans(), 0);
    for (auto a : problem.snapshot.assoc)
        ++loads[a];
    return loads;
}

Layout make_layout(CoordProblem const& problem,
                   std::span<std::size_t const> rb_of)
{
    auto const& assoc = problem.snapshot.assoc;
    if (rb_of.size() != problem.n_ues())
        throw InvalidParameter("RB assignment must cover every UE");

    auto const loads = loads_of(problem);
    auto const n_rb = static_cast<double>(problem.n_rb);
    Layout out;
    out.rbs.resize(problem.n_rb);
    out.share.resize(problem.n_ues());

    // slot[b][a] = position of AN a within RB b's group
    std::vector<std::vector<std::size_t>> slot(
        problem.n_rb,
        std::vector<std::size_t>(problem.n_ans(),
                                 std::numeric_limits<std::size_t>::max()));
    std::vector<std::size_t> order(problem.n_ues());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](auto i, auto j) { return assoc[i] < assoc[j]; });
    for (auto u : order)
    {
        std::size_t const b = rb_of[u];
        if (b >= problem.n_rb)
            throw InvalidParameter("RB index out of range");
        std::size_t const a = assoc[u];
        auto& group = out.rbs[b];
        if (slot[b][a] == std::numeric_limits<std::size_t>::max())
        {
            slot[b][a] = group.ans.size();
            group.ans.push_back(a);
            group.ues.emplace_back();
        }
        group.ues[slot[b][a]].push_back(u);

        auto const load = static_cast<double>(loads[a]);
        out.share[u] = load <= n_rb ? 1 / n_rb : 1 / load;
    }
    return out;
}

//! SINR and rate of every UE in one RB for per-slot powers (W).
void evaluate_rb(CoordProblem const& problem, RbGroup const& group,
                 std::span<double const> power_w,
                 std::span<double const> share, std::vector<double>& sinr_out,
                 std::vector<double>& rate_out)
{
    double const noise = problem.rb_noise_w();
    double const theta0 = db_to_linear(problem.params.theta0_db);
    for (std::size_t t = 0; t < group.ans.size(); ++t)
    {
        for (auto u : group.ues[t])
        {
            double interference = 0;
            for (std::size_t o = 0; o < group.ans.size(); ++o)
            {
                if (o != t)
                    interference += power_w[o] * problem.gains(group.ans[o], u);
            }
            double const signal = power_w[t] * problem.gains(group.ans[t], u);
            double const denom = interference + noise;
            double s;
            if (denom > 0)
                s = signal / denom;
            else
                s = signal > 0 ? std::numeric_limits<double>::infinity() : 0;
            sinr_out[u] = s;
            rate_out[u] = shannon_rate(s, share[u], theta0);
        }
    }
}

double rb_min_rate(RbGroup const& group, std::vector<double> const& rates)
{
    double m = std::numeric_limits<double>::infinity();
    for (auto const& ues : group.ues)
    {
        for (auto u : ues)
            m = std::min(m, rates[u]);
    }
    return m;
}

Allocation assemble(CoordProblem const& problem,
                    std::vector<std::size_t> rb_of, Layout const& layout,
                    std::vector<std::vector<double>> const& power_w,
                    PolicyId tag)
{
    Allocation out;
    out.policy = tag;
    out.assoc = problem.snapshot.assoc;
    out.share = layout.share;
    out.power_dbm.assign(problem.n_ues(),
                         -std::numeric_limits<double>::infinity());
    out.sinr.assign(problem.n_ues(), 0);
    out.rates.assign(problem.n_ues(), 0);
    for (std::size_t b = 0; b < layout.rbs.size(); ++b)
    {
        auto const& group = layout.rbs[b];
        evaluate_rb(problem, group, power_w[b], layout.share, out.sinr,
                    out.rates);
        for (std::size_t t = 0; t < group.ans.size(); ++t)
        {
            for (auto u : group.ues[t])
                out.power_dbm[u] = watts_to_dbm(power_w[b][t]);
        }
    }
    out.rb_of = std::move(rb_of);
    out.min_rate = out.rates.empty()
                       ? 0.0
                       : *std::min_element(out.rates.begin(), out.rates.end());
    return out;
}

std::vector<std::vector<double>> full_power(CoordProblem const& problem,
                                            Layout const& layout)
{
    std::vector<std::vector<double>> p;
    for (auto const& group : layout.rbs)
        p.emplace_back(group.ans.size(), problem.tx_power_w());
    return p;
}

std::vector<std::size_t> policy1_assignment(CoordProblem const& problem)
{
    auto const& assoc = problem.snapshot.assoc;
    std::size_t const n = problem.n_ues();
    std::size_t const n_rb = problem.n_rb;

    std::vector<double> signal(n);
    for (std::size_t i = 0; i < n; ++i)
        signal[i] = problem.gains(assoc[i], i);
    // c(j -> i): interference j's AN puts on link i relative to i's signal
    auto cost = [&](std::size_t j, std::size_t i) {
        return problem.gains(assoc[j], i) / signal[i];
    };

    std::vector<double> conflict(n, 0);
    for (std::size_t i = 0; i < n; ++i)
    {
        for (std::size_t j = 0; j < n; ++j)
        {
            if (assoc[i] != assoc[j])
            {
                conflict[i] = std::max(
                    conflict[i], std::max(cost(j, i), cost(i, j)));
            }
        }
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto i, auto j) {
        return conflict[i] > conflict[j];
    });

    auto const loads = loads_of(problem);
    std::vector<std::vector<std::size_t>> count(
        problem.n_ans(), std::vector<std::size_t>(n_rb, 0));
    std::vector<std::size_t> n_full(problem.n_ans(), 0);
    std::vector<std::vector<std::size_t>> placed(n_rb);
    std::vector<std::size_t> rb_of(n, 0);

    for (auto i : order)
    {
        std::size_t const a = assoc[i];
        std::size_t const floor_cnt = loads[a] / n_rb;
        std::size_t const extra = loads[a] % n_rb;

        std::size_t best = n_rb;
        double best_cost = std::numeric_limits<double>::infinity();
        for (std::size_t b = 0; b < n_rb; ++b)
        {
            bool const open = count[a][b] < floor_cnt
                              || (count[a][b] == floor_cnt && n_full[a] < extra);
            if (!open)
                continue;
            double c = 0;
            for (auto j : placed[b])
            {
                if (assoc[j] != a)
                    c += cost(j, i) + cost(i, j);
            }
            if (best == n_rb || c < best_cost)
            {
                best = b;
                best_cost = c;
            }
        }
        if (count[a][best] == floor_cnt)
            ++n_full[a];
        ++count[a][best];
        placed[best].push_back(i);
        rb_of[i] = best;
    }
    return rb_of;
}

/*!
 * Solve (I - M) p = b for the one-link-per-AN case, where M[t][o] =
 * γ_t g(o, u_t) / g(t, u_t) and b[t] = γ_t N / g(t, u_t). A nonnegative
 * solution exists exactly when the spectral radius of M is below one, and
 * it is then the least fixed point of the power iteration.
 */
std::optional<std::vector<double>>
solve_single_links(CoordProblem const& problem, RbGroup const& group,
                   std::span<double const> gamma)
{
    double const noise = problem.rb_noise_w();
    std::size_t const n = group.ans.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0));
    for (std::size_t t = 0; t < n; ++t)
    {
        std::size_t const u = group.ues[t].front();
        double const scale = gamma[u] / problem.gains(group.ans[t], u);
        for (std::size_t o = 0; o < n; ++o)
        {
            a[t][o] = o == t ? 1.0
                             : -scale * problem.gains(group.ans[o], u);
        }
        a[t][n] = scale * noise;
    }
    // Gaussian elimination with partial pivoting
    for (std::size_t c = 0; c < n; ++c)
    {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
        {
            if (std::abs(a[r][c]) > std::abs(a[piv][c]))
                piv = r;
        }
        if (!(std::abs(a[piv][c]) > 0))
            return std::nullopt;
        std::swap(a[c], a[piv]);
        for (std::size_t r = c + 1; r < n; ++r)
        {
            double const f = a[r][c] / a[c][c];
            for (std::size_t k = c; k <= n; ++k)
                a[r][k] -= f * a[c][k];
        }
    }
    std::vector<double> p(n, 0);
    for (std::size_t c = n; c-- > 0;)
    {
        double v = a[c][n];
        for (std::size_t k = c + 1; k < n; ++k)
            v -= a[c][k] * p[k];
        p[c] = v / a[c][c];
    }
    for (double v : p)
    {
        if (!(v >= 0) || !std::isfinite(v))
            return std::nullopt;
    }
    return p;
}

/*!
 * Smallest powers meeting per-UE SINR targets on one RB, or nothing if they
 * exceed the cap. ANs with several links there use the power iteration,
 * which gives up when it leaves the cap or fails to settle.
 */
std::optional<std::vector<double>>
min_powers(CoordProblem const& problem, RbGroup const& group,
           std::span<double const> gamma)
{
    double const cap = problem.tx_power_w();
    double const noise = problem.rb_noise_w();
    std::size_t const n = group.ans.size();
    bool const single = std::all_of(group.ues.begin(), group.ues.end(),
                                    [](auto const& v) { return v.size() == 1; });
    if (single)
    {
        auto p = solve_single_links(problem, group, gamma);
        if (p && std::all_of(p->begin(), p->end(),
                             [&](double v) { return v <= cap; }))
        {
            return p;
        }
        return std::nullopt;
    }
    std::vector<double> p(n, 0), next(n, 0);
    for (int it = 0; it < fixed_point_steps; ++it)
    {
        double change = 0;
        for (std::size_t t = 0; t < n; ++t)
        {
            double need = 0;
            for (auto u : group.ues[t])
            {
                double interference = noise;
                for (std::size_t o = 0; o < n; ++o)
                {
                    if (o != t)
                        interference += p[o] * problem.gains(group.ans[o], u);
                }
                need = std::max(need, gamma[u] * interference
                                          / problem.gains(group.ans[t], u));
            }
            if (!(need <= cap))
                return std::nullopt;
            next[t] = need;
            if (need > 0)
                change = std::max(change, std::abs(need - p[t]) / need);
        }
        std::swap(p, next);
        if (change < fixed_point_tol)
            return p;
    }
    return std::nullopt;
}

Allocation policy2_from(CoordProblem const& problem, Allocation const& p1)
{
    Layout const layout = make_layout(problem, p1.rb_of);
    auto powers = full_power(problem, layout);
    std::vector<double> sinr_tmp(problem.n_ues(), 0);
    std::vector<double> rate_tmp(problem.n_ues(), 0);
    std::vector<double> gamma(problem.n_ues(), 0);
    double const theta0 = db_to_linear(problem.params.theta0_db);
    double const cap = problem.tx_power_w();

    for (std::size_t b = 0; b < layout.rbs.size(); ++b)
    {
        auto const& group = layout.rbs[b];
        if (group.ans.size() < 2)
            continue;

        evaluate_rb(problem, group, powers[b], layout.share, sinr_tmp,
                    rate_tmp);
        double const full_min = rb_min_rate(group, rate_tmp);

        auto targets_for = [&](double c) {
            for (auto const& ues : group.ues)
            {
                for (auto u : ues)
                {
                    gamma[u] = std::max(
                        theta0, std::expm1(c / layout.share[u] * std::log(2.0)));
                }
            }
            return min_powers(problem, group, gamma);
        };

        double lo = full_min;
        double hi = std::numeric_limits<double>::infinity();
        for (auto const& ues : group.ues)
        {
            for (auto u : ues)
                hi = std::min(hi, layout.share[u] * std::log2(1 + max_sinr_target));
        }
        std::optional<std::vector<double>> best = targets_for(lo);
        if (!best || !(lo < hi))
            continue;
        for (int it = 0; it < bisection_steps; ++it)
        {
            double const mid = 0.5 * (lo + hi);
            if (auto p = targets_for(mid))
            {
                lo = mid;
                best = std::move(p);
            }
            else
            {
                hi = mid;
            }
        }

        auto candidate = *best;
        double const top = *std::max_element(candidate.begin(), candidate.end());
        if (!(top > 0))
            continue;
        for (auto& v : candidate)
            v = std::min(cap, v * (cap / top));
        evaluate_rb(problem, group, candidate, layout.share, sinr_tmp,
                    rate_tmp);
        if (rb_min_rate(group, rate_tmp) > full_min)
            powers[b] = std::move(candidate);
    }
    return assemble(problem, p1.rb_of, layout, powers, PolicyId::policy2);
}

/*!
 * Local improvement of a full-power assignment. The worst-served link and
 * the other-AN links sharing its RB are moved to another RB, or swapped
 * with a link of their own AN there; the best move is taken while it
 * strictly raises the minimum rate and keeps every AN balanced.
 */
Allocation refine_bottleneck(CoordProblem const& problem, Allocation current)
{
    auto const& assoc = problem.snapshot.assoc;
    std::size_t const n = problem.n_ues();
    std::size_t const n_rb = problem.n_rb;
    if (n_rb < 2)
        return current;

    std::vector<std::vector<std::size_t>> links_of(problem.n_ans());
    for (std::size_t u = 0; u < n; ++u)
        links_of[assoc[u]].push_back(u);
    auto balanced_at = [&](std::vector<std::size_t> const& rb_of,
                           std::size_t a) {
        std::vector<std::size_t> count(n_rb, 0);
        for (auto u : links_of[a])
            ++count[rb_of[u]];
        auto const [lo, hi] = std::minmax_element(count.begin(), count.end());
        return *hi - *lo <= 1;
    };

    for (std::size_t step = 0; step < n; ++step)
    {
        auto const worst = static_cast<std::size_t>(
            std::min_element(current.rates.begin(), current.rates.end())
            - current.rates.begin());
        std::vector<std::size_t> movers{worst};
        for (std::size_t v = 0; v < n; ++v)
        {
            if (v != worst && assoc[v] != assoc[worst]
                && current.rb_of[v] == current.rb_of[worst])
            {
                movers.push_back(v);
            }
        }

        std::optional<Allocation> best;
        double best_min = current.min_rate;
        auto consider = [&](std::vector<std::size_t> rb_of) {
            auto cand = evaluate_assignment(problem, std::move(rb_of), {},
                                            PolicyId::policy1);
            if (cand.min_rate > best_min)
            {
                best_min = cand.min_rate;
                best = std::move(cand);
            }
        };
        for (auto x : movers)
        {
            std::size_t const a = assoc[x];
            for (std::size_t b = 0; b < n_rb; ++b)
            {
                if (b == current.rb_of[x])
                    continue;
                auto moved = current.rb_of;
                moved[x] = b;
                if (balanced_at(moved, a))
                    consider(moved);
                for (auto y : links_of[a])
                {
                    if (current.rb_of[y] == b)
                    {
                        auto swapped = current.rb_of;
                        std::swap(swapped[x], swapped[y]);
                        consider(std::move(swapped));
                    }
                }
            }
        }
        if (!best)
            break;
        current = std::move(*best);
    }
    return current;
}

void check_has_server(CoordProblem const& problem)
{
    if (problem.n_ans() == 0)
        throw NoServerError("coordination needs at least one access node");
}

}  // namespace

//---------------------------------------------------------------------------//
// Names
//---------------------------------------------------------------------------//

std::string to_string(PolicyId policy)
{
    switch (policy)
    {
        case PolicyId::baseline:
            return "baseline";
        case PolicyId::policy1:
            return "policy1";
        case PolicyId::policy2:
            return "policy2";
    }
    return "?";
}

PolicyId policy_from_string(std::string const& name)
{
    if (name == "baseline")
        return PolicyId::baseline;
    if (name == "policy1")
        return PolicyId::policy1;
    if (name == "policy2")
        return PolicyId::policy2;
    throw InvalidParameter("unknown policy '" + name
                           + "' (expected baseline, policy1 or policy2)");
}

//---------------------------------------------------------------------------//
// Problems
//---------------------------------------------------------------------------//

double CoordProblem::rb_noise_w() const
{
    return noise_power_watts(params,
                             params.bandwidth_hz / static_cast<double>(n_rb));
}

void CoordProblem::validate() const
{
    params.validate();
    if (params.interference_limited())
        throw InvalidParameter("coordination requires a finite noise density");
    if (n_rb < 1)
        throw InvalidParameter("n_rb must be at least 1");
    if (gains.n_ans() != snapshot.ans.size()
        || gains.n_ues() != snapshot.ues.size())
    {
        throw InvalidParameter("gain matrix must be |ANs| x |UEs|");
    }
    if (snapshot.assoc.size() != snapshot.ues.size())
        throw InvalidParameter("association must cover every UE");
    if (rb_offset.size() != snapshot.ans.size())
        throw InvalidParameter("one baseline RB offset per AN is required");
    for (auto o : rb_offset)
    {
        if (o >= n_rb)
            throw InvalidParameter("baseline RB offset out of range");
    }
    for (std::size_t a = 0; a < n_ans(); ++a)
    {
        for (std::size_t u = 0; u < n_ues(); ++u)
        {
            double const g = gains(a, u);
            if (!(g >= 0) || !std::isfinite(g))
                throw InvalidParameter("link gains must be finite and >= 0");
        }
    }
    for (std::size_t u = 0; u < n_ues(); ++u)
    {
        if (snapshot.assoc[u] >= n_ans())
            throw InvalidParameter("association refers to a missing AN");
        if (!(gains(snapshot.assoc[u], u) > 0))
            throw InvalidParameter("serving link gain must be positive");
    }
}

CoordProblem make_problem(std::size_t n_ans, std::size_t n_ues,
                          Window const& window, ChannelParams const& params,
                          std::size_t n_rb, std::uint64_t master_seed,
                          std::uint64_t realization)
{
    if (n_ans < 1)
        throw NoServerError("coordination needs at least one access node");
    if (n_rb < 1)
        throw InvalidParameter("n_rb must be at least 1");

    Engine an_rng
        = make_stream(master_seed, realization, StreamPurpose::access_nodes);
    Engine ue_rng
        = make_stream(master_seed, realization, StreamPurpose::user_equipment);
    auto ans = sample_fixed(n_ans, window, an_rng, NodeKind::access_node);
    auto ues = sample_fixed(n_ues, window, ue_rng, NodeKind::user);

    CoordProblem problem;
    problem.params = params;
    problem.n_rb = n_rb;
    problem.snapshot = make_snapshot(window, std::move(ans), std::move(ues));

    auto const& snap = problem.snapshot;
    problem.gains = GainMatrix(n_ans, n_ues);
    Engine fading_rng
        = make_stream(master_seed, realization, StreamPurpose::fading);
    for (std::size_t a = 0; a < n_ans; ++a)
    {
        for (std::size_t u = 0; u < n_ues; ++u)
        {
            double const d = distance(snap.ans.points[a], snap.ues.points[u]);
            problem.gains(a, u) = path_gain(d, params).value
                                  * draw_fading(params.fading, fading_rng);
        }
    }

    Engine rb_rng
        = make_stream(master_seed, realization, StreamPurpose::rb_offset);
    problem.rb_offset.resize(n_ans);
    for (auto& o : problem.rb_offset)
    {
        auto const pick = static_cast<std::size_t>(
            uniform01(rb_rng) * static_cast<double>(n_rb));
        o = std::min(pick, n_rb - 1);
    }
    problem.validate();
    return problem;
}

CoordProblem make_problem(NetworkSnapshot snapshot, GainMatrix gains,
                          ChannelParams const& params, std::size_t n_rb)
{
    CoordProblem problem;
    if (snapshot.assoc.size() != snapshot.ues.size())
    {
        snapshot = make_snapshot(snapshot.window, std::move(snapshot.ans),
                                 std::move(snapshot.ues));
    }
    problem.snapshot = std::move(snapshot);
    problem.gains = std::move(gains);
    problem.params = params;
    problem.n_rb = n_rb;
    problem.rb_offset.assign(problem.snapshot.ans.size(), 0);
    problem.validate();
    return problem;
}

//---------------------------------------------------------------------------//
// Policies
//---------------------------------------------------------------------------//

bool is_balanced_assignment(CoordProblem const& problem,
                            std::span<std::size_t const> rb_of)
{
    if (rb_of.size() != problem.n_ues())
        return false;
    std::vector<std::vector<std::size_t>> count(
        problem.n_ans(), std::vector<std::size_t>(problem.n_rb, 0));
    for (std::size_t u = 0; u < rb_of.size(); ++u)
    {
        if (rb_of[u] >= problem.n_rb)
            return false;
        ++count[problem.snapshot.assoc[u]][rb_of[u]];
    }
    for (auto const& c : count)
    {
        auto const [lo, hi] = std::minmax_element(c.begin(), c.end());
        if (*hi - *lo > 1)
            return false;
    }
    return true;
}

Allocation evaluate_assignment(CoordProblem const& problem,
                               std::vector<std::size_t> rb_of,
                               std::vector<double> power_dbm, PolicyId tag)
{
    check_has_server(problem);
    Layout const layout = make_layout(problem, rb_of);
    if (!power_dbm.empty() && power_dbm.size() != problem.n_ues())
        throw InvalidParameter("one power per link is required");

    std::vector<std::vector<double>> power_w;
    for (auto const& group : layout.rbs)
    {
        std::vector<double> p(group.ans.size(), problem.tx_power_w());
        if (!power_dbm.empty())
        {
            for (std::size_t t = 0; t < group.ans.size(); ++t)
            {
                double best = -std::numeric_limits<double>::infinity();
                for (auto u : group.ues[t])
                {
                    if (power_dbm[u] > problem.params.tx_power_dbm + 1e-9)
                        throw InvalidParameter("link power exceeds the cap");
                    best = std::max(best, power_dbm[u]);
                }
                p[t] = std::isinf(best) ? 0.0 : dbm_to_watts(best);
            }
        }
        power_w.push_back(std::move(p));
    }
    return assemble(problem, std::move(rb_of), layout, power_w, tag);
}

Allocation evaluate_baseline(CoordProblem const& problem)
{
    check_has_server(problem);
    std::vector<std::size_t> next(problem.n_ans(), 0);
    std::vector<std::size_t> rb_of(problem.n_ues());
    for (std::size_t u = 0; u < problem.n_ues(); ++u)
    {
        std::size_t const a = problem.snapshot.assoc[u];
        rb_of[u] = (problem.rb_offset[a] + next[a]++) % problem.n_rb;
    }
    return evaluate_assignment(problem, std::move(rb_of), {},
                               PolicyId::baseline);
}

Allocation evaluate_policy1(CoordProblem const& problem)
{
    check_has_server(problem);
    return refine_bottleneck(
        problem, evaluate_assignment(problem, policy1_assignment(problem), {},
                                     PolicyId::policy1));
}

Allocation evaluate_policy2(CoordProblem const& problem)
{
    return policy2_from(problem, evaluate_policy1(problem));
}

Allocation evaluate_policy(CoordProblem const& problem, PolicyId policy)
{
    switch (policy)
    {
        case PolicyId::baseline:
            return evaluate_baseline(problem);
        case PolicyId::policy1:
            return evaluate_policy1(problem);
        case PolicyId::policy2:
            return evaluate_policy2(problem);
    }
    throw InvalidParameter("unknown policy");
}

//---------------------------------------------------------------------------//
// Curves
//---------------------------------------------------------------------------//

void CurveSpec::validate() const
{
    params.validate();
    if (params.interference_limited())
        throw InvalidParameter("coordination requires a finite noise density");
    if (tau_grid.empty())
        throw InvalidParameter("tau_grid must not be empty");
    for (std::size_t i = 0; i < tau_grid.size(); ++i)
    {
        if (!(tau_grid[i] > 0) || !std::isfinite(tau_grid[i]))
            throw InvalidParameter("tau_grid values must be positive");
        if (i > 0 && !(tau_grid[i] > tau_grid[i - 1]))
            throw InvalidParameter("tau_grid must be strictly ascending");
    }
    if (n_ues < 1)
        throw InvalidParameter("n_ues must be at least 1");
    if (n_rb < 1)
        throw InvalidParameter("n_rb must be at least 1");
    if (n_realizations < 1)
        throw InvalidParameter("n_realizations must be at least 1");
}

std::size_t an_count(double tau, std::size_t n_ues)
{
    double const n = std::round(tau * static_cast<double>(n_ues));
    return n < 1 ? 1 : static_cast<std::size_t>(n);
}

std::map<PolicyId, GuaranteedRateCurve>
guaranteed_rate_curves(CurveSpec const& spec,
                       std::span<PolicyId const> policies, int workers)
{
    spec.validate();
    std::vector<PolicyId> wanted(policies.begin(), policies.end());
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    std::size_t const n_tau = spec.tau_grid.size();
    std::size_t const n_real = spec.n_realizations;
    // min_rate[policy slot][tau * n_real + realization]
    std::vector<std::vector<double>> min_rate(
        wanted.size(), std::vector<double>(n_tau * n_real, 0));

    parallel_for(n_tau * n_real, workers, [&](std::size_t job) {
        std::size_t const it = job / n_real;
        std::size_t const r = job % n_real;
        auto const problem = make_problem(
            an_count(spec.tau_grid[it], spec.n_ues), spec.n_ues, spec.window,
            spec.params, spec.n_rb, spec.master_seed, r);
        std::optional<Allocation> p1;
        for (std::size_t k = 0; k < wanted.size(); ++k)
        {
            double value = 0;
            switch (wanted[k])
            {
                case PolicyId::baseline:
                    value = evaluate_baseline(problem).min_rate;
                    break;
                case PolicyId::policy1:
                    p1 = evaluate_policy1(problem);
                    value = p1->min_rate;
                    break;
                case PolicyId::policy2:
                    if (!p1)
                        p1 = evaluate_policy1(problem);
                    value = policy2_from(problem, *p1).min_rate;
                    break;
            }
            min_rate[k][job] = value;
        }
    });

    std::map<PolicyId, GuaranteedRateCurve> out;
    for (std::size_t k = 0; k < wanted.size(); ++k)
    {
        GuaranteedRateCurve curve;
        for (std::size_t it = 0; it < n_tau; ++it)
        {
            double sum = 0;
            for (std::size_t r = 0; r < n_real; ++r)
                sum += min_rate[k][it * n_real + r];
            double const mean = sum / static_cast<double>(n_real);
            double ss = 0;
            for (std::size_t r = 0; r < n_real; ++r)
            {
                double const d = min_rate[k][it * n_real + r] - mean;
                ss += d * d;
            }
            double se = 0;
            if (n_real > 1)
            {
                se = std::sqrt(ss / static_cast<double>(n_real - 1)
                               / static_cast<double>(n_real));
            }
            curve.push_back({spec.tau_grid[it], mean, se});
        }
        out.emplace(wanted[k], std::move(curve));
    }
    return out;
}

GuaranteedRateCurve guaranteed_rate_curve(CurveSpec const& spec,
                                          PolicyId policy, int workers)
{
    PolicyId const one[] = {policy};
    return guaranteed_rate_curves(spec, one, workers).at(policy);
}

//---------------------------------------------------------------------------//
// Savings
//---------------------------------------------------------------------------//

double required_tau(GuaranteedRateCurve const& curve, double target,
                    PolicyId policy)
{
    for (std::size_t i = 0; i < curve.size(); ++i)
    {
        if (i > 0 && !(curve[i].tau > curve[i - 1].tau))
            throw InvalidParameter("curve tau values must be ascending");
        if (curve[i].mean_min_rate < target)
            continue;
        if (i == 0)
            return curve[0].tau;
        auto const& a = curve[i - 1];
        auto const& b = curve[i];
        double const t
            = (target - a.mean_min_rate) / (b.mean_min_rate - a.mean_min_rate);
        double const la = std::log(a.tau);
        double const lb = std::log(b.tau);
        return std::exp(la + t * (lb - la));
    }
    throw UnachievableTarget(to_string(policy), target);
}

std::vector<SavingsRow>
densification_savings(std::span<double const> target_rates,
                      std::map<PolicyId, GuaranteedRateCurve> const& curves)
{
    auto const base = curves.find(PolicyId::baseline);
    if (base == curves.end())
        throw InvalidParameter("savings need a baseline curve");

    std::vector<SavingsRow> rows;
    for (double g : target_rates)
    {
        if (!(g > 0))
            throw InvalidParameter("target rates must be positive");
        double const tau_base = required_tau(base->second, g, PolicyId::baseline);
        for (auto const& [policy, curve] : curves)
        {
            if (policy == PolicyId::baseline)
                continue;
            double const tau = required_tau(curve, g, policy);
            rows.push_back({g, policy, tau, 100 * (1 - tau / tau_base)});
        }
    }
    return rows;
}

void write_coord_csv(std::ostream& os,
                     std::map<PolicyId, GuaranteedRateCurve> const& curves)
{
    os << "tau,policy,mean_min_rate,stderr\n";
    for (auto const& [policy, curve] : curves)
    {
        for (auto const& p : curve)
        {
            os << format_number(p.tau) << ',' << to_string(policy) << ','
               << format_number(p.mean_min_rate) << ','
               << format_number(p.std_error) << '\n';
        }
    }
}

void write_savings_csv(std::ostream& os, std::span<SavingsRow const> rows)
{
    os << "target_rate,policy,savings_pct\n";
    for (auto const& r : rows)
    {
        os << format_number(r.target_rate) << ',' << to_string(r.policy) << ','
           << format_number(r.savings_pct) << '\n';
    }
}

}  // namespace udn
