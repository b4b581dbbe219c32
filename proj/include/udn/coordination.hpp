#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "udn/channel.hpp"
#include "udn/pointprocess.hpp"

namespace udn
{

enum class PolicyId
{
    baseline,
    policy1,
    policy2
};

std::string to_string(PolicyId policy);
PolicyId policy_from_string(std::string const& name);

//! Dense |ANs| x |UEs| matrix of linear link gains.
class GainMatrix
{
  public:
    GainMatrix() = default;
    GainMatrix(std::size_t n_ans, std::size_t n_ues, double fill = 0)
        : rows_(n_ans), cols_(n_ues), data_(n_ans * n_ues, fill)
    {
    }

    double operator()(std::size_t an, std::size_t ue) const
    {
        return data_[an * cols_ + ue];
    }
    double& operator()(std::size_t an, std::size_t ue)
    {
        return data_[an * cols_ + ue];
    }
    std::size_t n_ans() const noexcept { return rows_; }
    std::size_t n_ues() const noexcept { return cols_; }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/*!
 * One finite-area realization handed to the coordination policies.
 *
 * `rb_offset[a]` is the first resource block of AN a's round-robin in the
 * uncoordinated baseline.
 */
struct CoordProblem
{
    NetworkSnapshot snapshot;
    ChannelParams params;
    std::size_t n_rb = 4;
    GainMatrix gains;
    std::vector<std::size_t> rb_offset;

    std::size_t n_ans() const noexcept { return gains.n_ans(); }
    std::size_t n_ues() const noexcept { return gains.n_ues(); }
    double tx_power_w() const { return dbm_to_watts(params.tx_power_dbm); }
    //! Noise over one resource block (W)
    double rb_noise_w() const;
    void validate() const;
};

/*!
 * Sample a realization: fixed-count uniform ANs and UEs, nearest-AN
 * association, gains = path loss x fading drawn once, random baseline RB
 * offsets. Realization r of a given seed reuses the same UE layout for every
 * AN count, and the first n ANs (positions, gains, offsets) agree across AN
 * counts.
 */
CoordProblem make_problem(std::size_t n_ans, std::size_t n_ues,
                          Window const& window, ChannelParams const& params,
                          std::size_t n_rb, std::uint64_t master_seed,
                          std::uint64_t realization);

//! Problem with explicit gains. The snapshot association is computed if
//! absent; baseline offsets are all zero.
CoordProblem make_problem(NetworkSnapshot snapshot, GainMatrix gains,
                          ChannelParams const& params, std::size_t n_rb);

struct Allocation
{
    PolicyId policy = PolicyId::baseline;
    std::vector<std::size_t> assoc;   //!< UE -> AN
    std::vector<std::size_t> rb_of;   //!< UE (link) -> resource block
    std::vector<double> share;        //!< UE -> fraction of total resources
    std::vector<double> power_dbm;    //!< UE link -> transmit power
    std::vector<double> sinr;         //!< UE -> linear SINR on its RB
    std::vector<double> rates;        //!< UE -> bps/Hz
    double min_rate = 0;
};

//---------------------------------------------------------------------------//
// Policies
//---------------------------------------------------------------------------//

//! Uncoordinated: per-AN round-robin from a random offset, full power.
Allocation evaluate_baseline(CoordProblem const& problem);

/*!
 * Interference-aware orthogonalization at full power.
 *
 * Links are ordered by their worst pairwise conflict, the larger of the two
 * cross-interference-to-signal ratios, and placed one by one into the
 * resource block with the least incurred plus caused conflict among the
 * blocks still open at their AN. Moves and same-AN swaps around the
 * worst-served link then refine the result while the minimum rate rises.
 */
Allocation evaluate_policy1(CoordProblem const& problem);

/*!
 * Policy I assignment followed by per-RB max-min rate power control.
 *
 * Bisection over the common rate target. Feasibility comes from the least
 * power vector meeting the targets: a linear solve when every AN has one
 * link on the RB, otherwise the standard-interference fixed point from zero
 * power, capped at the AN power limit. The feasible vector is then scaled so its largest entry sits at the
 * cap. Each RB keeps full power whenever that is at least as good.
 */
Allocation evaluate_policy2(CoordProblem const& problem);

Allocation evaluate_policy(CoordProblem const& problem, PolicyId policy);

//---------------------------------------------------------------------------//
// Building blocks shared with tests
//---------------------------------------------------------------------------//

/*!
 * True when every AN spreads its UEs over min(load, n_rb) blocks with counts
 * differing by at most one (so no block serves two UEs at once unless the
 * AN is overloaded).
 */
bool is_balanced_assignment(CoordProblem const& problem,
                            std::span<std::size_t const> rb_of);

/*!
 * Rates for a given RB assignment and per-link powers (dBm; empty means
 * full power). A UE gets 1/n_rb of the resources when its AN serves at most
 * n_rb UEs and 1/load otherwise (UEs sharing an RB are time-multiplexed).
 * An AN transmits on an RB at the largest power of its links there.
 */
Allocation evaluate_assignment(CoordProblem const& problem,
                               std::vector<std::size_t> rb_of,
                               std::vector<double> power_dbm = {},
                               PolicyId tag = PolicyId::baseline);

//---------------------------------------------------------------------------//
// Curves and savings
//---------------------------------------------------------------------------//

struct GuaranteedRatePoint
{
    double tau = 0;
    double mean_min_rate = 0;
    double std_error = 0;
};

using GuaranteedRateCurve = std::vector<GuaranteedRatePoint>;

struct CurveSpec
{
    std::vector<double> tau_grid;
    std::size_t n_ues = 50;
    Window window = Window::square({0, 0}, 1000.0);
    ChannelParams params;
    std::size_t n_rb = 4;
    std::size_t n_realizations = 100;
    std::uint64_t master_seed = 1;

    void validate() const;
};

//! AN count for a densification ratio: max(1, round(τ · n_ues)).
std::size_t an_count(double tau, std::size_t n_ues);

GuaranteedRateCurve guaranteed_rate_curve(CurveSpec const& spec,
                                          PolicyId policy, int workers = 1);

/*!
 * Curves for several policies evaluated on the same realizations, so policy
 * differences are paired.
 */
std::map<PolicyId, GuaranteedRateCurve>
guaranteed_rate_curves(CurveSpec const& spec,
                       std::span<PolicyId const> policies, int workers = 1);

struct SavingsRow
{
    double target_rate = 0;
    PolicyId policy = PolicyId::policy1;
    double tau_required = 0;
    double savings_pct = 0;
};

/*!
 * Smallest τ whose mean guaranteed rate reaches `target`, interpolating
 * log τ linearly between the bracketing grid points. Throws
 * UnachievableTarget when the curve never reaches the target.
 */
double required_tau(GuaranteedRateCurve const& curve, double target,
                    PolicyId policy);

//! Savings 1 - τ_p / τ_baseline (in percent) for every non-baseline policy.
std::vector<SavingsRow>
densification_savings(std::span<double const> target_rates,
                      std::map<PolicyId, GuaranteedRateCurve> const& curves);

void write_coord_csv(std::ostream& os,
                     std::map<PolicyId, GuaranteedRateCurve> const& curves);
void write_savings_csv(std::ostream& os, std::span<SavingsRow const> rows);

}  // namespace udn
