#include "udn/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "udn/error.hpp"
#include "udn/parallel.hpp"
#include "udn/pointprocess.hpp"

namespace udn
{
namespace
{
constexpr int max_resamples = 64;

struct TrialContext
{
    SimSpec const& spec;
    SimOptions const& options;
    Window window;
    double tx_power_w;
    double noise_w;
    double theta0;
};

TrialOutcome run_one_trial(TrialContext const& ctx, std::uint64_t trial)
{
    SimSpec const& spec = ctx.spec;
    ChannelParams const& params = spec.params;

    PointSet ans;
    for (int attempt = 0;; ++attempt)
    {
        if (attempt == max_resamples)
        {
            throw SimulationFailure(
                "no access node fell inside the guard window after "
                + std::to_string(max_resamples) + " resamples");
        }
        std::uint64_t const seed
            = spec.master_seed
              ^ (static_cast<std::uint64_t>(attempt) * 0x9e3779b97f4a7c15ULL);
        Engine rng = make_stream(seed, trial, StreamPurpose::access_nodes);
        ans = sample_hppp(spec.lambda_an, ctx.window, rng,
                          NodeKind::access_node);
        if (!ans.empty())
            break;
    }

    PointSet ues{{}, NodeKind::user};
    if (spec.lambda_ue > 0)
    {
        Engine rng = make_stream(spec.master_seed, trial,
                                 StreamPurpose::user_equipment);
        ues = sample_hppp(spec.lambda_ue, ctx.window, rng, NodeKind::user);
    }

    auto const snap = place_typical_ue(
        make_snapshot(ctx.window, std::move(ans), std::move(ues)));
    std::size_t const serving = snap.assoc[*snap.typical_ue];
    auto const load = static_cast<std::uint32_t>(snap.loads[serving]);
    Point const origin = snap.ues.points[*snap.typical_ue];

    Engine activity_rng
        = make_stream(spec.master_seed, trial, StreamPurpose::activity);
    Engine fading_rng
        = make_stream(spec.master_seed, trial, StreamPurpose::fading);

    double const n_sub = params.n_subchannels;
    double signal = 0;
    double interference = 0;
    for (std::size_t a = 0; a < snap.ans.size(); ++a)
    {
        // Draw both numbers for every AN so that AN a always consumes the
        // same stream positions
        double const u = uniform01(activity_rng);
        double const h = draw_fading(params.fading, fading_rng);
        double const g
            = path_gain(distance(origin, snap.ans.points[a]), params).value;
        if (a == serving)
        {
            signal = g * h;
            continue;
        }
        bool active = true;
        if (spec.activity == InterfererActivity::load_based)
        {
            double const busy
                = std::min(static_cast<double>(snap.loads[a]), n_sub) / n_sub;
            active = u < busy;
        }
        if (active)
            interference += g * h;
    }

    TrialOutcome out;
    out.serving_load = load;
    out.n_access_nodes = static_cast<std::uint32_t>(snap.ans.size());
    double const denom = ctx.tx_power_w * interference + ctx.noise_w;
    out.sir = denom > 0 ? ctx.tx_power_w * signal / denom
                        : std::numeric_limits<double>::infinity();
    std::uint32_t const k = ctx.options.force_single_user ? 1 : load;
    out.rate = shannon_rate(out.sir, 1.0 / k, ctx.theta0);
    return out;
}

}  // namespace

double SimSpec::tau() const noexcept
{
    if (lambda_ue <= 0)
        return std::numeric_limits<double>::infinity();
    return lambda_an / lambda_ue;
}

void SimSpec::validate() const
{
    params.validate();
    if (!(lambda_an > 0) || !std::isfinite(lambda_an))
        throw InvalidParameter("lambda_an must be positive and finite");
    if (!(lambda_ue >= 0) || !std::isfinite(lambda_ue))
        throw InvalidParameter("lambda_ue must be finite and non-negative");
    if (n_trials < 1)
        throw InvalidParameter("n_trials must be at least 1");
}

double guard_radius_m(SimSpec const& spec)
{
    double const tau = spec.tau();
    double const expected_ans = std::max(500.0, 20.0 / tau);
    double const area_km2 = expected_ans / spec.lambda_an;
    return std::sqrt(area_km2 / std::numbers::pi) * 1000.0;
}

std::vector<TrialOutcome> run_trials(SimSpec const& spec,
                                     SimOptions const& options)
{
    spec.validate();
    TrialContext const ctx{
        spec,
        options,
        Window::disk({0, 0}, guard_radius_m(spec)),
        dbm_to_watts(spec.params.tx_power_dbm),
        noise_power_watts(spec.params,
                          spec.params.bandwidth_hz / spec.params.n_subchannels),
        db_to_linear(spec.params.theta0_db),
    };

    std::vector<TrialOutcome> out(spec.n_trials);
    parallel_for(spec.n_trials, options.workers, [&](std::size_t t) {
        out[t] = run_one_trial(ctx, t);
    });
    return out;
}

std::vector<double> rates_of(std::span<TrialOutcome const> trials)
{
    std::vector<double> r;
    r.reserve(trials.size());
    for (auto const& t : trials)
        r.push_back(t.rate);
    return r;
}

std::vector<double> sirs_of(std::span<TrialOutcome const> trials)
{
    std::vector<double> r;
    r.reserve(trials.size());
    for (auto const& t : trials)
        r.push_back(t.sir);
    return r;
}

RateCdf simulate_typical_rate(SimSpec const& spec, SimOptions const& options)
{
    auto const trials = run_trials(spec, options);
    return empirical_cdf(rates_of(trials));
}

CoverageEstimate coverage_from_trials(std::span<TrialOutcome const> trials,
                                      double theta_db)
{
    if (trials.empty())
        throw InvalidParameter("coverage needs at least one trial");
    double const theta = db_to_linear(theta_db);
    std::size_t hits = 0;
    for (auto const& t : trials)
        hits += (t.sir >= theta) ? 1 : 0;
    auto const n = static_cast<double>(trials.size());
    double const p = static_cast<double>(hits) / n;

    CoverageEstimate est;
    est.theta_db = theta_db;
    est.probability = p;
    est.std_error = std::sqrt(p * (1 - p) / n);
    est.n_trials = trials.size();
    return est;
}

std::vector<CoverageEstimate>
estimate_coverage(SimSpec const& spec, std::span<double const> theta_db,
                  SimOptions const& options)
{
    if (!spec.params.interference_limited())
        throw InvalidParameter(
            "coverage estimation requires interference-limited mode");
    if (spec.params.n_subchannels != 1
        && spec.activity != InterfererActivity::all_active)
    {
        throw InvalidParameter(
            "coverage estimation requires full activity (one subchannel or "
            "all_active interferers)");
    }
    auto const trials = run_trials(spec, options);
    std::vector<CoverageEstimate> out;
    out.reserve(theta_db.size());
    for (double th : theta_db)
        out.push_back(coverage_from_trials(trials, th));
    return out;
}

CoverageEstimate estimate_coverage(SimSpec const& spec, double theta_db,
                                   SimOptions const& options)
{
    return estimate_coverage(spec, std::span<double const>(&theta_db, 1),
                             options)
        .front();
}

}  // namespace udn
