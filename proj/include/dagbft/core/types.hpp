#pragma once

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace dagbft {

// Process identity: index in [0, n), n = 3f+1.
struct ProcessId {
    uint32_t index = 0;

    auto operator<=>(const ProcessId&) const = default;
};

// System-wide sizing. n = 3f+1 with f >= 1 is validated at construction.
struct Params {
    uint32_t n = 4;
    uint32_t f = 1;

    Params() = default;
    Params(uint32_t n_, uint32_t f_) : n(n_), f(f_) {
        if (f < 1) throw std::invalid_argument("f must be >= 1");
        if (n != 3 * f + 1) throw std::invalid_argument("n must equal 3f+1");
    }

    uint32_t quorum() const { return 2 * f + 1; }       // 2f+1
    uint32_t small_quorum() const { return f + 1; }     // f+1
};

// Reference to a vertex by (source, round); unique in any correct DAG.
struct VertexRef {
    ProcessId source;
    uint64_t round = 0;

    bool operator==(const VertexRef&) const = default;
    // Delivery order inside a causal history: ascending (round, source).
    bool operator<(const VertexRef& o) const {
        if (round != o.round) return round < o.round;
        return source.index < o.source.index;
    }
};

// A block of opaque transaction payloads. seq numbers from one correct
// proposer are consecutive starting at 1; a block with no transactions is a
// drain-phase filler and is never recorded as a client a_bcast.
struct Block {
    ProcessId proposer;
    uint64_t seq = 0;
    std::vector<std::string> txs;

    bool is_filler() const { return txs.empty(); }
};

// One reliably-broadcast DAG node. Strong edges point to round-1 vertices
// from pairwise-distinct sources; weak edges point to rounds <= round-2.
struct Vertex {
    uint64_t round = 0;
    ProcessId source;
    Block block;
    std::vector<VertexRef> strong_edges;
    std::vector<VertexRef> weak_edges;

    VertexRef ref() const { return VertexRef{source, round}; }
};

class DagError : public std::runtime_error {
public:
    enum class Kind {
        VertexAbsent,        // query for a vertex not in the store
        PredecessorsAbsent,  // insert before all referenced vertices present
        DuplicateVertex,     // second vertex for one (source, round)
        MalformedVertex,     // edge round constraints violated
    };

    DagError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}

    Kind kind;
};

}  // namespace dagbft
