#pragma once

#include "dagbft/protocol/node.hpp"
#include "dagbft/sim/time.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dagbft::sim {

enum class ModelKind {
    FullControl,
    RandomArrival,
    MobilePartialControl,
    RandomPartialControl,
    RandomOrdering,
};

const char* model_name(ModelKind m);
std::optional<ModelKind> model_from_name(const std::string& name);

// Delay sample space (uniform over [lo, hi] ticks).
struct DelayRange {
    SimTime lo = TICKS_PER_UNIT;      // 1 unit
    SimTime hi = 2 * TICKS_PER_UNIT;  // 2 units
};

struct ModelParams {
    DelayRange omega;        // RandomArrival / uncontrolled senders
    DelayRange omega1;       // RandomPartialControl: control episode length
    DelayRange omega2;       // RandomPartialControl: minimum cooldown
    DelayRange head_gap{TICKS_PER_UNIT / 100, TICKS_PER_UNIT / 20};  // RandomOrdering
    SimTime adversarial_delay = 8 * TICKS_PER_UNIT;  // finite ceiling for controlled traffic
    uint32_t k = 0;                       // partial-control budget (< k controlled)
    std::string strategy = "leader_suppressor";  // FullControl strategy
    std::optional<uint32_t> victim;       // targeted_suppressor victim
    SimTime repartition_period = 6 * TICKS_PER_UNIT;  // partitioner flip period
};

struct BehaviorSpec {
    uint32_t process = 0;
    ByzantineBehavior behavior;
};

struct RunConfig {
    uint32_t n = 4;
    uint32_t f = 1;
    uint64_t seed = 1;
    ModelKind model = ModelKind::RandomArrival;
    ModelParams model_params;
    std::vector<BehaviorSpec> behaviors;
    uint64_t horizon_rounds = 40;
    bool drain = true;
    uint32_t batch_size = 1;
    uint32_t tx_bytes = 8;
    uint64_t max_events = 40'000'000;
    uint64_t drain_round_slack = 400;  // extra rounds allowed past horizon

    // Throws std::invalid_argument naming the offending field.
    void validate() const;
    Params params() const { return Params{n, f}; }
};

}  // namespace dagbft::sim
