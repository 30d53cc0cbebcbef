#pragma once

#include "dagbft/core/types.hpp"
#include "dagbft/protocol/orderer.hpp"
#include "dagbft/sim/time.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace dagbft::sim {

enum class TraceKind : uint8_t {
    VertexAdded = 1,
    RoundAdvance = 2,
    WaveReady = 3,
    CoinRevealed = 4,
    Commit = 5,
    Deliver = 6,
    Corrupted = 7,
};

// One structured trace record. refs/refs2 carry the wave-completion
// snapshots (round(w,1) / round(w,4)) for WaveReady and the leader chain /
// voters for Commit; the checker evaluates the lemmas against these
// at-completion snapshots rather than the final DAG contents.
struct TraceEvent {
    TraceKind kind;
    uint32_t process = 0;
    SimTime time = 0;
    uint64_t a = 0;  // round / wave / delivery idx
    uint64_t b = 0;  // vertex source / leader / seq
    uint64_t c = 0;  // vertex round / tx count
    std::vector<VertexRef> refs;
    std::vector<VertexRef> refs2;
};

struct AbcastRecord {
    uint64_t seq = 0;
    uint32_t tx_count = 0;
    SimTime time = 0;
};

const char* trace_kind_name(TraceKind k);

}  // namespace dagbft::sim
