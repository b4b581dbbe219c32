#include "udn/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "udn/error.hpp"

namespace udn
{
namespace
{
constexpr double pmf_tail_target = 1e-12;
constexpr std::size_t pmf_hard_limit = 1u << 22;

void check_alpha(double alpha)
{
    if (!(alpha > 2) || !std::isfinite(alpha))
        throw InvalidParameter(
            "interference integral diverges: path-loss exponent must exceed 2");
}

void check_tau(double tau)
{
    if (!(tau > 0) || std::isnan(tau))
        throw InvalidParameter("densification ratio must be positive");
}

QuadratureValue integrate(auto const& f, double a, double b, double rel_tol)
{
    if (!(b > a))
        return {};
    using Integrator = boost::math::quadrature::gauss_kronrod<double, 15>;
    double err = 0;
    double const v = Integrator::integrate(f, a, b, 20, rel_tol, &err);
    return {v, err * std::abs(v)};
}

/*!
 * Negative binomial pmf with real shape `s` for the number of UEs landing in
 * a Gamma(s, rate c)-area cell when UEs have mean 1/τ per mean cell area.
 *
 * Fills until the remaining tail drops below `tail_target`, or exactly
 * `fixed_len` entries when nonzero.
 */
std::vector<double> negbin_pmf(double shape, double tau, std::size_t fixed_len,
                               double tail_target)
{
    constexpr double c = voronoi_gamma_shape;
    std::vector<double> out;
    if (std::isinf(tau))
    {
        out.assign(std::max<std::size_t>(fixed_len, 1), 0.0);
        out[0] = 1.0;
        return out;
    }
    double const m = 1.0 / tau;
    double const log_q = std::log(m / (c + m));
    double const log_p0 = shape * std::log(c / (c + m));
    double const mean = shape * m / c;

    double cum = 0;
    for (std::size_t k = 0;; ++k)
    {
        if (fixed_len != 0 && k == fixed_len)
            break;
        auto const kd = static_cast<double>(k);
        double const log_pk = std::lgamma(kd + shape) - std::lgamma(shape)
                              - std::lgamma(kd + 1) + log_p0 + kd * log_q;
        double const pk = std::exp(log_pk);
        out.push_back(pk);
        cum += pk;
        if (fixed_len == 0 && kd > mean && 1.0 - cum < tail_target)
            break;
        if (k > pmf_hard_limit)
            throw InvalidParameter("load distribution too wide to tabulate");
    }
    return out;
}

LoadPmf to_load_pmf(std::vector<double> others)
{
    LoadPmf result;
    double sum = 0;
    for (double p : others)
        sum += p;
    result.pmf = std::move(others);
    result.tail_mass = std::max(0.0, 1.0 - sum);
    return result;
}

}  // namespace

//---------------------------------------------------------------------------//
// Interference integral and coverage
//---------------------------------------------------------------------------//

QuadratureValue rho_integral_with_error(double theta_linear, double alpha,
                                        double rel_tol)
{
    check_alpha(alpha);
    if (!(theta_linear >= 0))
        throw InvalidParameter("SIR threshold must be non-negative");
    if (theta_linear == 0)
        return {};
    if (std::isinf(theta_linear))
        return {std::numeric_limits<double>::infinity(), 0};

    double const beta = alpha / 2;
    double const scale = std::pow(theta_linear, 2 / alpha);
    double const lower = 1 / scale;
    double const split = std::max(lower, 1.0);

    auto const head = integrate(
        [beta](double u) { return 1 / (1 + std::pow(u, beta)); }, lower, split,
        rel_tol);
    // ∫_split^∞ du/(1+u^β) = 1/(β-1) ∫_0^{split^(1-β)} dy/(1+y^(β/(β-1)))
    double const tail_exp = beta / (beta - 1);
    auto const tail = integrate(
        [tail_exp](double y) { return 1 / (1 + std::pow(y, tail_exp)); }, 0.0,
        std::pow(split, 1 - beta), rel_tol);

    double const inv = 1 / (beta - 1);
    return {scale * (head.value + inv * tail.value),
            scale * (head.error + inv * tail.error)};
}

double rho_integral(double theta_linear, double alpha)
{
    check_alpha(alpha);
    if (!(theta_linear >= 0))
        throw InvalidParameter("SIR threshold must be non-negative");
    if (theta_linear == 0)
        return 0;
    if (std::isinf(theta_linear))
        return std::numeric_limits<double>::infinity();
    // t = 1 / (1 + u^(α/2)) turns the integral into an incomplete beta
    double const a = 2 / alpha;
    return std::pow(theta_linear, a) * a
           * boost::math::betac(a, 1 - a, 1 / (1 + theta_linear));
}

double coverage_probability(double theta_linear, double alpha,
                            double activity)
{
    if (!(activity >= 0 && activity <= 1))
        throw InvalidParameter("activity must lie in [0, 1]");
    double const rho = rho_integral(theta_linear, alpha);
    if (std::isinf(rho))
        return activity > 0 ? 0.0 : 1.0;
    return 1 / (1 + activity * rho);
}

//---------------------------------------------------------------------------//
// Loads
//---------------------------------------------------------------------------//

double LoadPmf::mean_coload() const
{
    double m = 0;
    for (std::size_t k = 0; k < pmf.size(); ++k)
        m += static_cast<double>(k) * pmf[k];
    return m;
}

LoadPmf load_pmf(double tau, std::size_t k_max)
{
    check_tau(tau);
    if (k_max < 1)
        throw InvalidParameter("k_max must be at least 1");
    return to_load_pmf(
        negbin_pmf(voronoi_gamma_shape + 1, tau, k_max, pmf_tail_target));
}

std::vector<double> other_cell_load_pmf(double tau, std::size_t k_max)
{
    check_tau(tau);
    return negbin_pmf(voronoi_gamma_shape, tau, k_max + 1, pmf_tail_target);
}

double interferer_activity(double tau, int n_subchannels)
{
    check_tau(tau);
    if (n_subchannels < 1)
        throw InvalidParameter("n_subchannels must be at least 1");
    auto const n = static_cast<std::size_t>(n_subchannels);
    auto const pk = other_cell_load_pmf(tau, n - 1);
    double below = 0;
    double partial_mean = 0;
    for (std::size_t k = 0; k < n; ++k)
    {
        below += pk[k];
        partial_mean += static_cast<double>(k) * pk[k];
    }
    double const busy
        = partial_mean + static_cast<double>(n) * std::max(0.0, 1.0 - below);
    return std::clamp(busy / static_cast<double>(n), 0.0, 1.0);
}

//---------------------------------------------------------------------------//
// Semi-analytic rate distribution
//---------------------------------------------------------------------------//

SemianalyticRateModel::SemianalyticRateModel(double tau,
                                             ChannelParams const& params)
    : tau_(tau)
    , alpha_(params.alpha)
    , theta0_(db_to_linear(params.theta0_db))
{
    params.validate();
    check_tau(tau);
    activity_ = interferer_activity(tau, params.n_subchannels);
    loads_ = to_load_pmf(
        negbin_pmf(voronoi_gamma_shape + 1, tau, 0, pmf_tail_target));
    outage_ = cdf(0.0);
}

double SemianalyticRateModel::cdf(double rate) const
{
    if (rate < 0)
        return 0.0;
    double const cov0 = coverage_probability(theta0_, alpha_, activity_);
    double f = loads_.tail_mass;
    for (std::size_t i = 0; i < loads_.pmf.size(); ++i)
    {
        double const k = static_cast<double>(i + 1);
        double const exponent = rate * k;
        double cov = 0;
        if (exponent <= 1000)
        {
            double const theta = std::expm1(exponent * std::log(2.0));
            cov = theta <= theta0_
                      ? cov0
                      : coverage_probability(theta, alpha_, activity_);
        }
        f += loads_.pmf[i] * (1 - cov);
    }
    return std::clamp(f, 0.0, 1.0);
}

double SemianalyticRateModel::quantile(double p) const
{
    if (!(p > 0 && p < 1))
        throw InvalidParameter("quantile level must lie in (0, 1)");
    if (p <= outage_)
        return 0.0;

    double hi = 1.0;
    while (cdf(hi) < p)
    {
        hi *= 2;
        if (hi > 1e6)
            throw InvalidParameter("quantile beyond representable rates");
    }
    double lo = hi / 2;
    while (lo > 1e-300 && cdf(lo) >= p)
        lo /= 2;
    // F is continuous on (0, ∞); bisect in log space
    for (int it = 0; it < 200 && hi / lo - 1 > 1e-12; ++it)
    {
        double const mid = std::sqrt(lo * hi);
        if (cdf(mid) >= p)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

RateCdf rate_cdf_semianalytic(double tau, ChannelParams const& params,
                              std::size_t n_grid)
{
    if (n_grid < 3 || n_grid > 2048)
        throw InvalidParameter("semianalytic grid size must be in [3, 2048]");
    SemianalyticRateModel const model(tau, params);

    RateCdf out;
    out.kind = RateCdf::Kind::semianalytic;
    out.grid.push_back(0.0);
    out.cdf.push_back(model.outage());

    // Rates below log2(1 + θ0) / K_max are unreachable; above the 1 - 1e-9
    // point the CDF is flat to within plotting precision
    double const theta0 = db_to_linear(params.theta0_db);
    double const r_min = std::max(
        std::log2(1 + theta0) / static_cast<double>(model.loads().pmf.size()),
        1e-9);
    double r_max = std::max(2 * r_min, 1.0);
    while (model.cdf(r_max) < 1 - 1e-9 && r_max < 1e4)
        r_max *= 2;

    std::size_t const n = n_grid - 1;
    double const ratio = std::log(r_max / r_min);
    for (std::size_t i = 0; i < n; ++i)
    {
        double const r
            = r_min * std::exp(ratio * static_cast<double>(i)
                               / static_cast<double>(n - 1));
        double const f = std::max(model.cdf(r), out.cdf.back());
        out.grid.push_back(r);
        out.cdf.push_back(f);
    }
    return out;
}

}  // namespace udn
