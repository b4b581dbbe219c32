#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "udn/channel.hpp"

namespace udn
{

enum class EngineKind
{
    montecarlo,
    semianalytic
};

std::string to_string(EngineKind kind);
EngineKind engine_from_string(std::string const& name);

struct EngineConfig
{
    EngineKind kind = EngineKind::semianalytic;
    ChannelParams params;
    std::size_t mc_trials = 10000;
    std::uint64_t master_seed = 1;
    //! AN density held fixed while λ_UE = λ_AN / τ varies
    double mc_lambda_an = 100;
    int workers = 1;
};

struct MedianEstimate
{
    double median = 0;
    //! Half-width of a ~95% band on the median (0 for the semianalytic engine)
    double slack = 0;
};

/*!
 * Median typical-UE rate as a function of τ.
 *
 * The Monte Carlo engine reuses the same master seed at every τ with a fixed
 * AN density (common random numbers): AN layouts, activity draws and fading
 * are shared and the UE sample at a lower τ is a superset of the one at a
 * higher τ, which makes the estimate monotone in τ whenever the guard window
 * does not change. Results are memoized per τ.
 */
class MedianRateEngine
{
  public:
    explicit MedianRateEngine(EngineConfig config);

    MedianEstimate evaluate(double tau);
    double median(double tau) { return evaluate(tau).median; }

    EngineConfig const& config() const noexcept { return config_; }
    std::size_t evaluations() const noexcept { return cache_.size(); }

  private:
    EngineConfig config_;
    std::map<double, MedianEstimate> cache_;
};

//---------------------------------------------------------------------------//
// Minimum densification ratio
//---------------------------------------------------------------------------//

struct PlannerQuery
{
    double target_median_rate = 1.0;  //!< bps/Hz
    double tau_lo = 1e-3;
    double tau_hi = 1e3;
    double tolerance = 0.01;  //!< relative, on the median rate
};

struct MinTauResult
{
    double tau_min = 0;
    double median_at_tau = 0;
    int iterations = 0;
    bool within_tolerance = false;
};

/*!
 * Bisection in log τ for the smallest τ whose median rate reaches the target.
 *
 * Throws BracketError if the bracket does not straddle the target, or if two
 * evaluations contradict monotonicity by more than their combined slack.
 */
MinTauResult min_tau(PlannerQuery const& query, MedianRateEngine& engine);

//---------------------------------------------------------------------------//
// Regression helpers for scaling-law diagnostics
//---------------------------------------------------------------------------//

struct LinearFit
{
    double slope = 0;
    double intercept = 0;
    double r_squared = 0;
};

LinearFit linear_fit(std::span<double const> x, std::span<double const> y);

//! max(τ/r0) / min(τ/r0) - 1: zero for an exactly linear law.
double proportionality_spread(std::span<double const> r0,
                              std::span<double const> tau_min);

//---------------------------------------------------------------------------//
// Densification/exploitation tradeoff
//---------------------------------------------------------------------------//

struct TradeoffPoint
{
    double ue_density_ratio = 0;  //!< x = λ'_UE / λ_UE
    double rate_ratio = 0;        //!< y = r'_0 / r_0
    double tau = 0;               //!< τ' evaluated
};

struct TradeoffCurve
{
    double base_lambda_an = 0;
    double base_lambda_ue = 0;
    double base_median = 0;  //!< r_0
    double densification_factor = 0;
    std::vector<TradeoffPoint> points;
};

TradeoffCurve tradeoff_curve(double base_lambda_an, double base_lambda_ue,
                             double densification_factor,
                             std::span<double const> x_grid,
                             MedianRateEngine& engine);

struct CapacityPoint
{
    double ue_density_ratio = 0;
    double capacity = 0;  //!< λ'_AN · r'_0, bps/Hz per km²
};

struct AreaCapacity
{
    std::vector<CapacityPoint> points;
    std::size_t argmax = 0;  //!< ties resolve toward larger x
};

AreaCapacity area_capacity(TradeoffCurve const& curve);

//---------------------------------------------------------------------------//
// CSV
//---------------------------------------------------------------------------//

struct MinTauRow
{
    double r0 = 0;
    double tau_min = 0;
};

void write_min_tau_csv(std::ostream& os, std::span<MinTauRow const> rows);
void write_tradeoff_csv(std::ostream& os, TradeoffCurve const& curve,
                        AreaCapacity const& capacity);

}  // namespace udn
