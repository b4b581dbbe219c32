#pragma once

#include <cstdint>
#include <random>

namespace udn
{

using Engine = std::mt19937_64;

//! Independent random streams derived from one master seed.
enum class StreamPurpose : std::uint32_t
{
    access_nodes = 1,
    user_equipment = 2,
    activity = 3,
    fading = 4,
    rb_offset = 5,
    test = 99,
};

/*!
 * Derive the stream for a (index, purpose) pair.
 *
 * The engine state depends only on the three keys, so a trial always sees the
 * same numbers regardless of which worker runs it or in which order trials
 * are evaluated.
 */
Engine make_stream(std::uint64_t master_seed, std::uint64_t index,
                   StreamPurpose purpose);

//! Uniform draw on [0, 1).
inline double uniform01(Engine& rng)
{
    return std::generate_canonical<double, 53>(rng);
}

//! Unit-mean exponential draw.
inline double exponential1(Engine& rng)
{
    return std::exponential_distribution<double>{1.0}(rng);
}

}  // namespace udn
