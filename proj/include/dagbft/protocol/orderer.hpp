#pragma once

#include "dagbft/core/dag_store.hpp"
#include "dagbft/core/types.hpp"
#include "dagbft/protocol/dag_builder.hpp"

#include <deque>
#include <functional>
#include <optional>
#include <vector>

namespace dagbft {

// Coin access as seen by one process: choose_leader may be pending until f+1
// distinct processes have invoked the wave; revealed_leader answers only for
// already-revealed waves (used while back-chaining).
struct CoinPort {
    virtual ~CoinPort() = default;
    virtual std::optional<ProcessId> choose_leader(uint64_t wave) = 0;
    virtual std::optional<ProcessId> revealed_leader(uint64_t wave) const = 0;
};

struct DeliveryEntry {
    uint64_t round = 0;
    ProcessId source;
    uint64_t seq = 0;
    uint32_t tx_count = 0;
    bool filler = false;
    int64_t sim_time = 0;
};

struct CommitRecord {
    uint64_t wave = 0;
    VertexRef leader;
    std::vector<VertexRef> voters;       // round(w,4) vertices backing the commit
    std::vector<VertexRef> leader_chain; // leaders delivered, oldest first
};

// Wave interpretation of the local DAG: commit the wave leader when 2f+1
// fourth-round vertices have strong paths to it, back-chain through earlier
// undecided leaders with the stack, then a_deliver causal histories in
// ascending (round, source) order, skipping genesis.
class Orderer {
public:
    Orderer(Params p, ProcessId self, DagBuilder& builder);

    // BAB broadcast entry: asserts consecutive seq from the local client and
    // hands the block to the DAG layer.
    void a_bcast(Block b, uint64_t seq);

    struct WaveOutcome {
        bool coin_pending = false;
        std::vector<CommitRecord> commits;
        std::vector<DeliveryEntry> delivered;
        uint64_t waves_processed = 0;
    };

    // Signal from the DAG layer that wave w completed locally. Decisions for
    // queued waves are processed strictly in wave order; a pending coin
    // parks the queue until on_coin_revealed.
    WaveOutcome on_wave_ready(uint64_t w, CoinPort& coin, int64_t now);
    WaveOutcome on_coin_revealed(CoinPort& coin, int64_t now);

    uint64_t decided_wave() const { return decided_wave_; }
    uint64_t next_expected_seq() const { return next_seq_; }
    size_t delivered_count() const { return delivered_count_; }

private:
    WaveOutcome process_queue(CoinPort& coin, int64_t now);
    std::optional<VertexRef> wave_leader_vertex(uint64_t w, ProcessId leader) const;
    void order_vertices(std::vector<VertexRef>& stack, CommitRecord& rec,
                        std::vector<DeliveryEntry>& out, int64_t now);
    bool is_delivered(const VertexRef& r) const;
    void mark_delivered(const VertexRef& r);

    Params params_;
    ProcessId self_;
    DagBuilder& builder_;
    uint64_t decided_wave_ = 0;
    uint64_t next_seq_ = 1;
    std::deque<uint64_t> ready_waves_;
    std::vector<uint64_t> delivered_mask_;  // dense over store indices
    size_t delivered_count_ = 0;
};

}  // namespace dagbft
