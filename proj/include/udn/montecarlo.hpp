#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "udn/channel.hpp"
#include "udn/rate_cdf.hpp"

namespace udn
{

//! How interfering access nodes decide to transmit on the probe subchannel.
enum class InterfererActivity
{
    //! Active with probability min(load, N) / N, independently per AN
    load_based,
    //! Every AN other than the serving one transmits
    all_active,
};

struct SimSpec
{
    double lambda_an = 100;  //!< ANs per km²
    double lambda_ue = 100;  //!< background UEs per km² (0 allowed)
    ChannelParams params;
    std::size_t n_trials = 100000;
    std::uint64_t master_seed = 1;
    InterfererActivity activity = InterfererActivity::load_based;

    //! Densification ratio; +inf when there are no background UEs.
    double tau() const noexcept;
    void validate() const;
};

struct SimOptions
{
    int workers = 1;
    //! Ignore co-users in the serving cell (K = 1), leaving SIR untouched
    bool force_single_user = false;
};

//! Result of one typical-UE snapshot.
struct TrialOutcome
{
    double sir = 0;                 //!< linear SIR (SINR if noise is on)
    double rate = 0;                //!< bps/Hz, zero below threshold
    std::uint32_t serving_load = 0; //!< K, including the typical UE
    std::uint32_t n_access_nodes = 0;
};

//! Radius of the disk window: expected AN count max(500, 20 / tau).
double guard_radius_m(SimSpec const& spec);

/*!
 * Run every trial of a typical-UE simulation.
 *
 * Each trial draws ANs and background UEs in the guard disk centred on the
 * typical UE, associates everyone with the nearest AN, draws interferer
 * activity and Rayleigh fading, and records SIR, rate = log2(1 + SIR) / K
 * (zero below the threshold) and K. Trial t only uses streams keyed by t, so
 * results do not depend on the worker count.
 */
std::vector<TrialOutcome> run_trials(SimSpec const& spec,
                                     SimOptions const& options = {});

//! Empirical typical-UE rate distribution.
RateCdf simulate_typical_rate(SimSpec const& spec,
                              SimOptions const& options = {});

//! Rates extracted from trial outcomes.
std::vector<double> rates_of(std::span<TrialOutcome const> trials);
std::vector<double> sirs_of(std::span<TrialOutcome const> trials);

struct CoverageEstimate
{
    double theta_db = 0;
    double probability = 0;
    double std_error = 0;  //!< binomial standard error
    std::size_t n_trials = 0;
};

/*!
 * P(SIR >= theta) for the typical UE.
 *
 * Requires interference-limited operation and full activity: either a single
 * subchannel or InterfererActivity::all_active.
 */
CoverageEstimate estimate_coverage(SimSpec const& spec, double theta_db,
                                   SimOptions const& options = {});

//! Coverage at several thresholds from one set of trials.
std::vector<CoverageEstimate>
estimate_coverage(SimSpec const& spec, std::span<double const> theta_db,
                  SimOptions const& options = {});

//! Coverage statistics computed from existing trial outcomes.
CoverageEstimate coverage_from_trials(std::span<TrialOutcome const> trials,
                                      double theta_db);

}  // namespace udn
