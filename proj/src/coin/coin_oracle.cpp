#include "dagbft/coin/coin_oracle.hpp"

#include <bit>

namespace dagbft {

CoinOracle::CoinOracle(Params p, uint64_t seed) : params_(p), seed_(seed) {}

CoinOracle::WaveState& CoinOracle::wave_state(uint64_t wave) {
    if (waves_.size() <= wave) waves_.resize(wave + 1);
    return waves_[wave];
}

ProcessId CoinOracle::prf_leader(uint64_t wave) const {
    return ProcessId{static_cast<uint32_t>(splitmix64(seed_ ^ splitmix64(wave)) % params_.n)};
}

CoinOracle::ChooseResult CoinOracle::choose_leader(ProcessId caller, uint64_t wave) {
    ChooseResult res;
    if (wave < 1 || caller.index >= params_.n) return res;
    WaveState& ws = wave_state(wave);
    if (ws.revealed) {
        res.leader = prf_leader(wave);
        return res;
    }
    const uint64_t bit = uint64_t{1} << caller.index;
    const uint64_t before = ws.invoked_mask;
    ws.invoked_mask |= bit;
    if (std::popcount(ws.invoked_mask) >= static_cast<int>(params_.small_quorum())) {
        ws.revealed = true;
        if (wave > max_revealed_wave_) max_revealed_wave_ = wave;
        res.leader = prf_leader(wave);
        // Everyone invoked before this call was left pending; wake them.
        uint64_t waiters = before;
        while (waiters) {
            const uint32_t i = static_cast<uint32_t>(std::countr_zero(waiters));
            waiters &= waiters - 1;
            if (i != caller.index) res.resolved_waiters.push_back(ProcessId{i});
        }
    }
    return res;
}

std::optional<ProcessId> CoinOracle::adversary_peek(uint64_t wave) const {
    return revealed_leader(wave);
}

std::optional<ProcessId> CoinOracle::revealed_leader(uint64_t wave) const {
    if (wave >= waves_.size() || !waves_[wave].revealed) return std::nullopt;
    return prf_leader(wave);
}

uint32_t CoinOracle::invocation_count(uint64_t wave) const {
    if (wave >= waves_.size()) return 0;
    return static_cast<uint32_t>(std::popcount(waves_[wave].invoked_mask));
}

}  // namespace dagbft
