#pragma once

#include "dagbft/core/dag_store.hpp"
#include "dagbft/core/types.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace dagbft {

// DAG construction: buffers rbc-delivered vertices until their predecessors
// are present, advances rounds at 2f+1 vertices, signals completed waves and
// creates this process's next vertex (strong edges to the whole previous
// round, weak edges to every otherwise-unreachable older vertex).
class DagBuilder {
public:
    DagBuilder(Params p, ProcessId self);

    DagStore& dag() { return dag_; }
    const DagStore& dag() const { return dag_; }

    void enqueue_block(Block b);
    size_t blocks_pending() const { return blocks_to_propose_.size(); }

    // Called by the simulator when the node needs a block and the queue is
    // empty; the callback may enqueue one (client model / drain filler) or
    // leave the queue empty, deferring vertex creation.
    void set_refill(std::function<void()> refill) { refill_ = std::move(refill); }

    // rbc deliver hook. Stamps round/source from rbc metadata, drops
    // vertices below the 2f+1 strong-edge threshold or with malformed edge
    // rounds, buffers the rest. Returns false when dropped.
    bool on_r_deliver(Vertex v, uint64_t round, ProcessId source);

    struct Progress {
        std::vector<VertexRef> inserted;       // buffer -> DAG, in order
        std::vector<uint64_t> rounds_advanced; // each new value of r
        std::vector<uint64_t> waves_ready;     // completed waves (round 4w)
        std::vector<Vertex> broadcasts;        // own new vertices to r_bcast
    };
    // Runs the Alg.-2 main-loop body to a fixpoint.
    Progress try_progress();

    uint64_t current_round() const { return round_; }
    size_t buffer_size() const { return buffer_.size(); }
    uint64_t malformed_dropped() const { return malformed_dropped_; }
    uint64_t below_threshold_dropped() const { return below_threshold_dropped_; }
    uint64_t last_broadcast_round() const { return last_broadcast_round_; }

private:
    bool predecessors_present(const Vertex& v) const;
    std::optional<Vertex> create_new_vertex(uint64_t round);
    void set_weak_edges(Vertex& v, uint64_t round) const;

    Params params_;
    ProcessId self_;
    DagStore dag_;
    uint64_t round_ = 0;
    std::vector<Vertex> buffer_;  // FIFO by arrival
    std::deque<Block> blocks_to_propose_;
    std::function<void()> refill_;
    uint64_t last_broadcast_round_ = 0;
    bool creation_deferred_ = false;
    uint64_t malformed_dropped_ = 0;
    uint64_t below_threshold_dropped_ = 0;
};

// round(w,k) = 4(w-1)+k for k in [1..4].
inline uint64_t wave_round(uint64_t wave, uint32_t k) { return 4 * (wave - 1) + k; }

}  // namespace dagbft
