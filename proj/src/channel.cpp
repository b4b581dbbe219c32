#include "udn/channel.hpp"

#include <algorithm>
#include <string>

#include "udn/error.hpp"

namespace udn
{

void ChannelParams::validate() const
{
    if (!(alpha > 2) || !std::isfinite(alpha))
        throw InvalidParameter("path-loss exponent must exceed 2");
    if (!(d0_m > 0) || !std::isfinite(d0_m))
        throw InvalidParameter("reference distance d0_m must be positive");
    if (n_subchannels < 1)
        throw InvalidParameter("n_subchannels must be at least 1");
    if (!(bandwidth_hz > 0) || !std::isfinite(bandwidth_hz))
        throw InvalidParameter("bandwidth_hz must be positive");
    if (!std::isfinite(tx_power_dbm))
        throw InvalidParameter("tx_power_dbm must be finite");
    if (std::isnan(theta0_db))
        throw InvalidParameter("theta0_db must be a number");
    if (std::isnan(noise_psd_dbm_hz)
        || (std::isinf(noise_psd_dbm_hz) && noise_psd_dbm_hz > 0))
    {
        throw InvalidParameter(
            "noise_psd_dbm_hz must be finite or -inf (noise off)");
    }
}

double noise_power_watts(ChannelParams const& params, double bandwidth_hz)
{
    if (params.interference_limited())
        return 0.0;
    return dbm_to_watts(params.noise_psd_dbm_hz + linear_to_db(bandwidth_hz));
}

LinkGain path_gain(double d_m, ChannelParams const& params)
{
    double const d = std::max(d_m, params.d0_m);
    return {std::pow(d / params.d0_m, -params.alpha)};
}

double draw_fading(Fading fading, Engine& rng)
{
    return fading == Fading::rayleigh ? exponential1(rng) : 1.0;
}

double sinr(LinkGain serving, std::span<LinkGain const> interferers,
            std::vector<bool> const& interferer_active,
            ChannelParams const& params)
{
    if (interferers.size() != interferer_active.size())
        throw InvalidParameter("interferer gain and activity sizes differ");

    double const power = dbm_to_watts(params.tx_power_dbm);
    double interference = 0;
    for (std::size_t i = 0; i < interferers.size(); ++i)
    {
        if (interferer_active[i])
            interference += power * interferers[i].value;
    }
    double const noise = noise_power_watts(
        params, params.bandwidth_hz / params.n_subchannels);
    double const denom = interference + noise;
    if (denom <= 0)
        return std::numeric_limits<double>::infinity();
    return power * serving.value / denom;
}

double shannon_rate(double sinr_linear, double share, double theta0_linear)
{
    if (!(share >= 0 && share <= 1))
        throw InvalidParameter("bandwidth share must lie in [0, 1]");
    if (!(sinr_linear >= theta0_linear))
        return 0.0;
    return share * std::log2(1.0 + sinr_linear);
}

}  // namespace udn
