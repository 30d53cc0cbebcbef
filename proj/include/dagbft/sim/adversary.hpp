#pragma once

#include "dagbft/sim/config.hpp"
#include "dagbft/sim/time.hpp"

#include <memory>
#include <string>
#include <vector>

namespace dagbft::sim {

// The only coin information an adversary scheduler ever sees: reveals of
// already-decided waves via adversary_peek.
struct CoinView {
    virtual ~CoinView() = default;
    virtual std::optional<ProcessId> peek(uint64_t wave) const = 0;
};

struct MsgMeta {
    ProcessId from;
    ProcessId to;
    SimTime sent_at = 0;
    bool from_faulty = false;
};

// A FullControl scheduling strategy: observes reveals through CoinView only
// and picks any finite delay per message.
class AdversaryStrategy {
public:
    virtual ~AdversaryStrategy() = default;
    virtual SimTime delay(const MsgMeta& m, const CoinView& coin, Rng& rng) = 0;
    virtual const char* name() const = 0;
};

std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name,
                                                 const ModelParams& mp, Params p);

// Per-message delay assignment for every model except RandomOrdering (which
// owns a global in-flight list and is driven by the scheduler directly).
class DelayModel {
public:
    DelayModel(ModelKind kind, ModelParams mp, Params p, uint64_t seed);

    SimTime pick_delay(const MsgMeta& m, const CoinView& coin);
    ModelKind kind() const { return kind_; }
    const ModelParams& params() const { return mp_; }

private:
    bool mobile_controls(ProcessId sender, const CoinView& coin);
    bool random_partial_controls(ProcessId sender, SimTime now);

    ModelKind kind_;
    ModelParams mp_;
    Params p_;
    Rng rng_;
    std::unique_ptr<AdversaryStrategy> strategy_;

    // MobilePartialControl: controlled set re-picked on every new reveal,
    // always the latest revealed leader plus deterministic fill, capped at
    // k-1 (strictly fewer than k at any instant).
    std::vector<uint32_t> mobile_set_;
    uint64_t mobile_seen_wave_ = 0;

    // RandomPartialControl: alternating control/cooldown episodes per process.
    struct Episode {
        SimTime control_until = -1;
        SimTime cooldown_until = 0;
    };
    std::vector<Episode> episodes_;
};

}  // namespace dagbft::sim
