#pragma once

#include "dagbft/coin/coin_oracle.hpp"
#include "dagbft/protocol/node.hpp"
#include "dagbft/sim/adversary.hpp"
#include "dagbft/sim/config.hpp"
#include "dagbft/sim/trace.hpp"

#include <string>
#include <vector>

namespace dagbft::sim {

struct RunCounters {
    uint64_t msgs_sent = 0;            // by processes correct at send time
    uint64_t bits_sent = 0;
    uint64_t events_processed = 0;
    uint64_t rbc_misbehavior = 0;      // conflicting votes discarded
    uint64_t malformed_dropped = 0;    // vertices failing edge checks
    uint64_t below_threshold_dropped = 0;
    uint64_t max_rbc_deliveries_per_tag = 0;  // Integrity bound: must stay <= 1
};

struct RunFlags {
    bool reached_horizon = false;
    bool drained = false;          // drain phase entered
    bool drain_completed = false;  // every pre-drain block delivered everywhere
    bool quiescent = false;        // event queue emptied
    bool event_cap_hit = false;
};

struct RunResult {
    RunConfig config;
    std::vector<bool> correct;  // per process: never faulty during the run
    std::vector<DagStore> dags;
    std::vector<std::vector<DeliveryEntry>> logs;
    std::vector<std::vector<AbcastRecord>> abcasts;  // client a_bcasts per process
    std::vector<TraceEvent> trace;
    std::vector<std::pair<uint64_t, uint32_t>> coin_reveals;  // (wave, leader)
    std::vector<uint64_t> waves_completed;  // per process
    std::vector<uint64_t> commit_count;     // per process
    RunCounters counters;
    RunFlags flags;
    SimTime end_time = 0;
    SimTime time_unit_ticks = 0;  // max correct-to-correct delivery delay
};

// Executes one seeded run; fully deterministic in (config, seed).
RunResult run_simulation(const RunConfig& cfg);

// Canonical JSONL renderings; replay compares these byte-for-byte.
std::string trace_to_jsonl(const RunResult& r);
std::string delivery_log_to_jsonl(const RunResult& r, uint32_t process);
uint64_t trace_hash(const RunResult& r);

}  // namespace dagbft::sim
