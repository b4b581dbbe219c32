#include "udn/rng.hpp"

namespace udn
{

Engine make_stream(std::uint64_t master_seed, std::uint64_t index,
                   StreamPurpose purpose)
{
    auto lo = [](std::uint64_t v) {
        return static_cast<std::uint32_t>(v & 0xffffffffu);
    };
    auto hi = [](std::uint64_t v) { return static_cast<std::uint32_t>(v >> 32); };
    std::seed_seq seq{lo(master_seed), hi(master_seed), lo(index), hi(index),
                      static_cast<std::uint32_t>(purpose)};
    return Engine{seq};
}

}  // namespace udn
