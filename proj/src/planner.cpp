#include "udn/planner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "udn/analytic.hpp"
#include "udn/error.hpp"
#include "udn/format.hpp"
#include "udn/montecarlo.hpp"

namespace udn
{

std::string to_string(EngineKind kind)
{
    return kind == EngineKind::montecarlo ? "montecarlo" : "semianalytic";
}

EngineKind engine_from_string(std::string const& name)
{
    if (name == "montecarlo")
        return EngineKind::montecarlo;
    if (name == "semianalytic")
        return EngineKind::semianalytic;
    throw InvalidParameter("unknown engine '" + name
                           + "' (expected montecarlo or semianalytic)");
}

//---------------------------------------------------------------------------//
// MedianRateEngine
//---------------------------------------------------------------------------//

MedianRateEngine::MedianRateEngine(EngineConfig config)
    : config_(std::move(config))
{
    config_.params.validate();
    if (config_.mc_trials < 1)
        throw InvalidParameter("mc_trials must be at least 1");
    if (!(config_.mc_lambda_an > 0))
        throw InvalidParameter("mc_lambda_an must be positive");
}

MedianEstimate MedianRateEngine::evaluate(double tau)
{
    if (!(tau > 0) || !std::isfinite(tau))
        throw InvalidParameter("densification ratio must be positive");
    if (auto it = cache_.find(tau); it != cache_.end())
        return it->second;

    MedianEstimate est;
    if (config_.kind == EngineKind::semianalytic)
    {
        est.median = SemianalyticRateModel(tau, config_.params).median();
    }
    else
    {
        SimSpec spec;
        spec.lambda_an = config_.mc_lambda_an;
        spec.lambda_ue = config_.mc_lambda_an / tau;
        spec.params = config_.params;
        spec.n_trials = config_.mc_trials;
        spec.master_seed = config_.master_seed;
        auto const cdf = simulate_typical_rate(spec, {config_.workers});
        est.median = quantile(cdf, 0.5);
        double const band
            = 2 * std::sqrt(0.25 / static_cast<double>(config_.mc_trials));
        double const lo = quantile(cdf, std::max(0.5 - band, 1e-9));
        double const hi = quantile(cdf, std::min(0.5 + band, 1 - 1e-9));
        est.slack = std::max(hi - est.median, est.median - lo);
    }
    cache_.emplace(tau, est);
    return est;
}

//---------------------------------------------------------------------------//
// min_tau
//---------------------------------------------------------------------------//

namespace
{
void check_monotone(std::map<double, MedianEstimate> const& seen)
{
    double running_max = -1;
    double running_slack = 0;
    double running_tau = 0;
    for (auto const& [tau, est] : seen)
    {
        double const allowance
            = running_slack + est.slack + 1e-12 * std::abs(est.median);
        if (running_max > est.median + allowance)
        {
            throw BracketError(
                "median rate is non-monotone in tau beyond Monte Carlo slack: "
                "median(" + format_number(running_tau) + ") = "
                + format_number(running_max) + " > median("
                + format_number(tau) + ") = " + format_number(est.median));
        }
        if (est.median > running_max)
        {
            running_max = est.median;
            running_slack = est.slack;
            running_tau = tau;
        }
    }
}
}  // namespace

MinTauResult min_tau(PlannerQuery const& query, MedianRateEngine& engine)
{
    double const target = query.target_median_rate;
    if (!(target > 0))
        throw InvalidParameter("target median rate must be positive");
    if (!(query.tau_lo > 0 && query.tau_lo < query.tau_hi))
        throw InvalidParameter("tau bracket must satisfy 0 < lo < hi");
    if (!(query.tolerance > 0))
        throw InvalidParameter("planner tolerance must be positive");

    std::map<double, MedianEstimate> seen;
    auto eval = [&](double tau) {
        auto const est = engine.evaluate(tau);
        seen.emplace(tau, est);
        check_monotone(seen);
        return est.median;
    };

    double lo = query.tau_lo;
    double hi = query.tau_hi;
    double const m_lo = eval(lo);
    double const m_hi = eval(hi);
    if (!(m_lo < target && target <= m_hi))
    {
        throw BracketError("tau bracket [" + format_number(lo) + ", "
                           + format_number(hi)
                           + "] does not straddle target median "
                           + format_number(target) + " (medians "
                           + format_number(m_lo) + ", " + format_number(m_hi)
                           + ")");
    }

    MinTauResult result;
    result.tau_min = hi;
    result.median_at_tau = m_hi;
    for (int it = 1; it <= 200; ++it)
    {
        double const mid = std::sqrt(lo * hi);
        double const m = eval(mid);
        result.iterations = it;
        if (std::abs(m - target) <= query.tolerance * target)
        {
            result.tau_min = mid;
            result.median_at_tau = m;
            result.within_tolerance = true;
            return result;
        }
        if (m < target)
            lo = mid;
        else
        {
            hi = mid;
            result.tau_min = mid;
            result.median_at_tau = m;
        }
        if (hi / lo - 1 < 1e-13)
            break;
    }
    result.within_tolerance
        = std::abs(result.median_at_tau - target) <= query.tolerance * target;
    return result;
}

//---------------------------------------------------------------------------//
// Regression
//---------------------------------------------------------------------------//

LinearFit linear_fit(std::span<double const> x, std::span<double const> y)
{
    if (x.size() != y.size() || x.size() < 2)
        throw InvalidParameter("linear fit needs two equal-length series");
    auto const n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
    {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    if (sxx == 0)
        throw InvalidParameter("linear fit needs distinct x values");

    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

double proportionality_spread(std::span<double const> r0,
                              std::span<double const> tau_min)
{
    if (r0.size() != tau_min.size() || r0.empty())
        throw InvalidParameter("spread needs two equal-length series");
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = 0; i < r0.size(); ++i)
    {
        double const ratio = tau_min[i] / r0[i];
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return hi / lo - 1;
}

//---------------------------------------------------------------------------//
// Tradeoff
//---------------------------------------------------------------------------//

TradeoffCurve tradeoff_curve(double base_lambda_an, double base_lambda_ue,
                             double densification_factor,
                             std::span<double const> x_grid,
                             MedianRateEngine& engine)
{
    if (!(base_lambda_an > 0 && base_lambda_ue > 0))
        throw InvalidParameter("base densities must be positive");
    if (!(densification_factor > 0))
        throw InvalidParameter("densification factor must be positive");
    for (std::size_t i = 0; i < x_grid.size(); ++i)
    {
        if (!(x_grid[i] > 0) || (i > 0 && !(x_grid[i] > x_grid[i - 1])))
            throw InvalidParameter("x grid must be positive and ascending");
    }

    TradeoffCurve curve;
    curve.base_lambda_an = base_lambda_an;
    curve.base_lambda_ue = base_lambda_ue;
    curve.densification_factor = densification_factor;
    double const tau_base = base_lambda_an / base_lambda_ue;
    curve.base_median = engine.median(tau_base);
    if (!(curve.base_median > 0))
        throw InvalidParameter("base median rate is zero; ratio undefined");

    for (double x : x_grid)
    {
        // factor / x == 1 exactly at x == factor, so τ' == τ_base there
        double const tau = tau_base * (densification_factor / x);
        curve.points.push_back(
            {x, engine.median(tau) / curve.base_median, tau});
    }
    return curve;
}

AreaCapacity area_capacity(TradeoffCurve const& curve)
{
    AreaCapacity out;
    double const lambda_an = curve.densification_factor * curve.base_lambda_an;
    double best = -INFINITY;
    for (std::size_t i = 0; i < curve.points.size(); ++i)
    {
        auto const& p = curve.points[i];
        double const cap = lambda_an * p.rate_ratio * curve.base_median;
        out.points.push_back({p.ue_density_ratio, cap});
        if (cap >= best)
        {
            best = cap;
            out.argmax = i;
        }
    }
    return out;
}

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

void write_min_tau_csv(std::ostream& os, std::span<MinTauRow const> rows)
{
    os << "r0,tau_min\n";
    for (auto const& r : rows)
        os << format_number(r.r0) << ',' << format_number(r.tau_min) << '\n';
}

void write_tradeoff_csv(std::ostream& os, TradeoffCurve const& curve,
                        AreaCapacity const& capacity)
{
    os << "x,rate_ratio,area_capacity\n";
    for (std::size_t i = 0; i < curve.points.size(); ++i)
    {
        os << format_number(curve.points[i].ue_density_ratio) << ','
           << format_number(curve.points[i].rate_ratio) << ','
           << format_number(capacity.points[i].capacity) << '\n';
    }
}

}  // namespace udn
