#pragma once

#include "dagbft/core/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dagbft {

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Global perfect coin as a seeded oracle. The leader of wave w is fixed by
// PRF(seed, w) mod n but stays hidden until f+1 distinct processes invoke
// choose_leader(w); adversary code gets no other access path (adversary_peek
// returns the leader only post-reveal), which enforces unpredictability
// structurally rather than cryptographically.
class CoinOracle {
public:
    CoinOracle(Params p, uint64_t seed);

    struct ChooseResult {
        std::optional<ProcessId> leader;  // empty while pending
        // Callers that were pending and are unblocked by this invocation.
        std::vector<ProcessId> resolved_waiters;
    };
    ChooseResult choose_leader(ProcessId caller, uint64_t wave);

    // The only coin access granted to adversary schedulers.
    std::optional<ProcessId> adversary_peek(uint64_t wave) const;

    // Post-reveal lookup used by the orderer when back-chaining waves it has
    // already invoked.
    std::optional<ProcessId> revealed_leader(uint64_t wave) const;

    uint32_t invocation_count(uint64_t wave) const;
    uint64_t max_revealed_wave() const { return max_revealed_wave_; }
    uint64_t seed() const { return seed_; }

    // Raw PRF value, exposed so tests can cross-check frequencies.
    ProcessId prf_leader(uint64_t wave) const;

private:
    struct WaveState {
        uint64_t invoked_mask = 0;
        bool revealed = false;
    };

    WaveState& wave_state(uint64_t wave);

    Params params_;
    uint64_t seed_;
    std::vector<WaveState> waves_;
    uint64_t max_revealed_wave_ = 0;
};

}  // namespace dagbft
