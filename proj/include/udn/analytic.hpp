#pragma once

#include <cstddef>
#include <vector>

#include "udn/channel.hpp"
#include "udn/rate_cdf.hpp"

namespace udn
{

struct QuadratureValue
{
    double value = 0;
    double error = 0;  //!< absolute error estimate
};

/*!
 * Interference functional of nearest-AN association under Rayleigh fading:
 *
 *   ρ(θ, α) = θ^(2/α) ∫_{θ^(-2/α)}^∞ du / (1 + u^(α/2)).
 *
 * The integral is split at max(θ^(-2/α), 1); the tail is mapped onto a finite
 * interval with u = y^(-1/(α/2 - 1)) so that both pieces have bounded,
 * smooth integrands for adaptive Gauss-Kronrod quadrature.
 */
QuadratureValue rho_integral_with_error(double theta_linear, double alpha,
                                        double rel_tol = 1e-12);

/*!
 * Same functional through the substitution t = 1/(1 + u^(α/2)):
 *
 *   ρ(θ, α) = (2/α) θ^(2/α) B_c(2/α, 1 - 2/α; 1/(1 + θ)),
 *
 * with B_c the upper incomplete beta function. Used on hot paths.
 */
double rho_integral(double theta_linear, double alpha);

//! P(SIR >= θ) = 1 / (1 + activity · ρ(θ, α)), independent of AN density.
double coverage_probability(double theta_linear, double alpha,
                            double activity);

//---------------------------------------------------------------------------//
// Cell loads
//---------------------------------------------------------------------------//

//! Shape of the Gamma approximation of normalized Poisson-Voronoi cell area.
inline constexpr double voronoi_gamma_shape = 3.5;

/*!
 * Distribution of the typical UE's serving-cell load K (typical UE included).
 *
 * pmf[k - 1] = P(K = k) for k = 1..pmf.size().
 */
struct LoadPmf
{
    std::vector<double> pmf;
    double tail_mass = 0;  //!< P(K > pmf.size())

    //! E[K - 1] restricted to the tabulated range.
    double mean_coload() const;
};

/*!
 * Size-biased cell load under the Gamma(3.5) area approximation: the number
 * of other UEs is negative binomial with shape 4.5 and success probability
 * 3.5 τ / (3.5 τ + 1).
 */
LoadPmf load_pmf(double tau, std::size_t k_max = 64);

/*!
 * Load K' of an arbitrary (not size-biased) cell: negative binomial with
 * shape 3.5. Entry k is P(K' = k), k = 0..k_max.
 */
std::vector<double> other_cell_load_pmf(double tau, std::size_t k_max);

//! E[min(K', N)] / N, the chance that an interferer uses a given subchannel.
double interferer_activity(double tau, int n_subchannels);

//---------------------------------------------------------------------------//
// Rate distribution
//---------------------------------------------------------------------------//

/*!
 * Semi-analytic typical-UE rate distribution.
 *
 * F(r) = Σ_K P(K) [1 - coverage(max(θ0, 2^(rK) - 1))], treating load and SIR
 * as independent. The load table is extended until its tail is below 1e-12;
 * any residual tail is counted as outage.
 */
class SemianalyticRateModel
{
  public:
    SemianalyticRateModel(double tau, ChannelParams const& params);

    double tau() const noexcept { return tau_; }
    double activity() const noexcept { return activity_; }
    LoadPmf const& loads() const noexcept { return loads_; }

    //! F(r); F(0) is the outage mass
    double cdf(double rate) const;
    double outage() const noexcept { return outage_; }
    //! Smallest r with F(r) >= p, found by bisection to 1e-12 relative
    double quantile(double p) const;
    double median() const { return quantile(0.5); }

  private:
    double tau_;
    double alpha_;
    double theta0_;
    double activity_;
    LoadPmf loads_;
    double outage_;
};

RateCdf rate_cdf_semianalytic(double tau, ChannelParams const& params,
                              std::size_t n_grid = 512);

}  // namespace udn
