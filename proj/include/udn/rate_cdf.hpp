#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace udn
{

/*!
 * Distribution of the typical-UE rate in bps/Hz.
 *
 * `grid` is strictly ascending and `cdf[i]` is the distribution function at
 * `grid[i]`. A leading grid point at rate 0 carries the outage atom, so
 * `cdf[0]` may be well above zero.
 *
 * Empirical CDFs place positive samples at mid-rank plotting positions,
 * (zeros + i + 1/2) / n for the i-th positive order statistic; the zero atom
 * keeps its full mass. Between grid points the CDF is linearly interpolated.
 */
struct RateCdf
{
    enum class Kind
    {
        empirical,
        semianalytic
    };

    Kind kind = Kind::empirical;
    std::vector<double> grid;
    std::vector<double> cdf;
    std::size_t n_trials = 0;  //!< empirical only
    //! Probability of an unbounded rate (no interferer and no noise)
    double infinite_mass = 0;

    //! Mass at rate zero.
    double zero_mass() const noexcept;

    //! Interpolated CDF value at `rate`.
    double evaluate(double rate) const;

    //! Throws InvalidParameter if any structural invariant is broken.
    void check_invariants() const;
};

/*!
 * Build an empirical CDF from rate samples.
 *
 * When there are more than `max_points` positive samples, evenly spaced order
 * statistics (always including the minimum and maximum) are kept.
 */
RateCdf empirical_cdf(std::vector<double> samples,
                      std::size_t max_points = 2048);

//! Rate at which the interpolated CDF first reaches p, for p in (0, 1).
double quantile(RateCdf const& cdf, double p);

//! Two-sample Kolmogorov-Smirnov statistic; inputs need not be sorted.
double ks_distance(std::span<double const> a, std::span<double const> b);

//! Writes the `rate_bps_hz,cdf` table.
void write_csv(std::ostream& os, RateCdf const& cdf);

}  // namespace udn
