#pragma once

#include "dagbft/coin/coin_oracle.hpp"

#include <cstdint>

namespace dagbft::sim {

// Simulated time is integer ticks (fixed point) so schedules are bit-equal
// across platforms. One abstract delay unit = TICKS_PER_UNIT ticks.
using SimTime = int64_t;
inline constexpr SimTime TICKS_PER_UNIT = 1'000'000;

inline SimTime ticks_from_units(double units) {
    return static_cast<SimTime>(units * static_cast<double>(TICKS_PER_UNIT) + 0.5);
}

// Deterministic stream generator (splitmix64 walk). Distribution sampling is
// hand-rolled; the standard library's distributions are not bit-stable
// across implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        state_ += 0x9E3779B97F4A7C15ull;
        return splitmix64(state_);
    }

    // Uniform in [0, bound).
    uint64_t below(uint64_t bound) { return bound == 0 ? 0 : next() % bound; }

    // Uniform tick count in [lo, hi].
    SimTime ticks_between(SimTime lo, SimTime hi) {
        if (hi <= lo) return lo;
        return lo + static_cast<SimTime>(below(static_cast<uint64_t>(hi - lo + 1)));
    }

private:
    uint64_t state_;
};

}  // namespace dagbft::sim
