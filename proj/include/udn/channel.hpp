#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "udn/rng.hpp"

namespace udn
{

enum class Fading
{
    rayleigh,
    none
};

/*!
 * Propagation and link-budget parameters shared by all engines.
 *
 * A noise density of -infinity selects interference-limited operation, in
 * which `sinr` returns the SIR and transmit power cancels out.
 */
struct ChannelParams
{
    double alpha = 4.0;      //!< path-loss exponent, must exceed 2
    double d0_m = 1.0;       //!< reference (clamp) distance
    Fading fading = Fading::rayleigh;
    double noise_psd_dbm_hz = -std::numeric_limits<double>::infinity();
    double bandwidth_hz = 10e6;
    double tx_power_dbm = 30.0;
    double theta0_db = -6.0;  //!< service threshold
    int n_subchannels = 10;

    bool interference_limited() const noexcept
    {
        return std::isinf(noise_psd_dbm_hz) && noise_psd_dbm_hz < 0;
    }

    //! Throws InvalidParameter naming the first violated invariant.
    void validate() const;
};

struct LinkGain
{
    double value = 0;  //!< linear power gain (path loss x fading)
};

//---------------------------------------------------------------------------//
// Unit conversions
//---------------------------------------------------------------------------//

inline double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

inline double linear_to_db(double lin)
{
    return 10.0 * std::log10(lin);
}

inline double dbm_to_watts(double dbm)
{
    return std::pow(10.0, (dbm - 30.0) / 10.0);
}

inline double watts_to_dbm(double w)
{
    return 10.0 * std::log10(w) + 30.0;
}

//! Thermal noise power (W) over `bandwidth_hz`, zero when noise is off.
double noise_power_watts(ChannelParams const& params, double bandwidth_hz);

//---------------------------------------------------------------------------//
// Link model
//---------------------------------------------------------------------------//

//! Power-law gain (max(d, d0)/d0)^-alpha.
LinkGain path_gain(double d_m, ChannelParams const& params);

//! Unit-mean exponential power factor for Rayleigh fading, 1 otherwise.
double draw_fading(Fading fading, Engine& rng);

/*!
 * SINR on one subchannel for transmitters at the fixed power of `params`.
 *
 * Noise is integrated over bandwidth_hz / n_subchannels. When there is no
 * active interferer and noise is off the result is +infinity.
 */
double sinr(LinkGain serving, std::span<LinkGain const> interferers,
            std::vector<bool> const& interferer_active,
            ChannelParams const& params);

/*!
 * Rate in bps/Hz of total system bandwidth: share · log2(1 + sinr), or zero
 * below the service threshold.
 */
double shannon_rate(double sinr_linear, double share, double theta0_linear);

}  // namespace udn
