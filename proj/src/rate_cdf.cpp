#include "udn/rate_cdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "udn/error.hpp"
#include "udn/format.hpp"

namespace udn
{

double RateCdf::zero_mass() const noexcept
{
    if (grid.empty() || grid.front() > 0)
        return 0.0;
    return cdf.front();
}

double RateCdf::evaluate(double rate) const
{
    if (grid.empty() || rate < grid.front())
        return 0.0;
    if (rate >= grid.back())
        return cdf.back();
    auto const it = std::upper_bound(grid.begin(), grid.end(), rate);
    auto const i = static_cast<std::size_t>(it - grid.begin());
    double const t = (rate - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return cdf[i - 1] + t * (cdf[i] - cdf[i - 1]);
}

void RateCdf::check_invariants() const
{
    if (grid.size() != cdf.size())
        throw InvalidParameter("rate CDF grid and values differ in length");
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        if (!(cdf[i] >= 0 && cdf[i] <= 1))
            throw InvalidParameter("rate CDF value outside [0, 1]");
        if (i > 0 && !(grid[i] > grid[i - 1]))
            throw InvalidParameter("rate CDF grid not strictly ascending");
        if (i > 0 && cdf[i] < cdf[i - 1])
            throw InvalidParameter("rate CDF not nondecreasing");
    }
}

RateCdf empirical_cdf(std::vector<double> samples, std::size_t max_points)
{
    if (samples.empty())
        throw InvalidParameter("empirical CDF needs at least one sample");
    if (max_points < 3)
        throw InvalidParameter("empirical CDF needs at least 3 grid points");
    std::sort(samples.begin(), samples.end());
    if (samples.front() < 0 || std::isnan(samples.back()))
        throw InvalidParameter("rates must be non-negative numbers");

    RateCdf result;
    result.kind = RateCdf::Kind::empirical;
    result.n_trials = samples.size();

    auto const n = static_cast<double>(samples.size());
    auto const first_pos = static_cast<std::size_t>(
        std::upper_bound(samples.begin(), samples.end(), 0.0)
        - samples.begin());
    double const zero_mass = static_cast<double>(first_pos) / n;
    if (first_pos > 0)
    {
        result.grid.push_back(0.0);
        result.cdf.push_back(zero_mass);
    }

    // +inf rates (no interferer and no noise) stay as mass beyond the grid
    auto const end_finite = static_cast<std::size_t>(
        std::lower_bound(samples.begin(), samples.end(),
                         std::numeric_limits<double>::infinity())
        - samples.begin());
    std::size_t const n_pos = end_finite - first_pos;
    result.infinite_mass
        = static_cast<double>(samples.size() - end_finite) / n;
    if (n_pos == 0)
        return result;

    auto push = [&](std::size_t rank) {
        double const r = samples[first_pos + rank];
        double const f = zero_mass + (static_cast<double>(rank) + 0.5) / n;
        if (!result.grid.empty() && r <= result.grid.back())
        {
            // Ties collapse onto the highest plotting position
            result.cdf.back() = f;
            return;
        }
        result.grid.push_back(r);
        result.cdf.push_back(f);
    };

    std::size_t const budget = max_points - (first_pos > 0 ? 1 : 0);
    if (n_pos <= budget)
    {
        for (std::size_t i = 0; i < n_pos; ++i)
            push(i);
    }
    else
    {
        for (std::size_t k = 0; k < budget; ++k)
            push(k * (n_pos - 1) / (budget - 1));
    }
    return result;
}

double quantile(RateCdf const& cdf, double p)
{
    if (!(p > 0 && p < 1))
        throw InvalidParameter("quantile level must lie in (0, 1)");
    if (cdf.grid.empty())
        throw InvalidParameter("quantile of an empty rate CDF");

    auto const it = std::lower_bound(cdf.cdf.begin(), cdf.cdf.end(), p);
    if (it == cdf.cdf.end())
    {
        return p > 1.0 - cdf.infinite_mass
                   ? std::numeric_limits<double>::infinity()
                   : cdf.grid.back();
    }
    auto const i = static_cast<std::size_t>(it - cdf.cdf.begin());
    if (i == 0 || cdf.cdf[i] == p)
        return cdf.grid[i];
    double const t = (p - cdf.cdf[i - 1]) / (cdf.cdf[i] - cdf.cdf[i - 1]);
    return cdf.grid[i - 1] + t * (cdf.grid[i] - cdf.grid[i - 1]);
}

double ks_distance(std::span<double const> a, std::span<double const> b)
{
    if (a.empty() || b.empty())
        throw InvalidParameter("KS distance needs two non-empty samples");
    std::vector<double> x(a.begin(), a.end());
    std::vector<double> y(b.begin(), b.end());
    std::sort(x.begin(), x.end());
    std::sort(y.begin(), y.end());

    auto const nx = static_cast<double>(x.size());
    auto const ny = static_cast<double>(y.size());
    std::size_t i = 0, j = 0;
    double d = 0;
    while (i < x.size() && j < y.size())
    {
        double const v = std::min(x[i], y[j]);
        while (i < x.size() && x[i] <= v)
            ++i;
        while (j < y.size() && y[j] <= v)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / nx
                                 - static_cast<double>(j) / ny));
    }
    return d;
}

void write_csv(std::ostream& os, RateCdf const& cdf)
{
    os << "rate_bps_hz,cdf\n";
    for (std::size_t i = 0; i < cdf.grid.size(); ++i)
        os << format_number(cdf.grid[i]) << ',' << format_number(cdf.cdf[i])
           << '\n';
}

}  // namespace udn
