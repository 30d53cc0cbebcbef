#pragma once

#include "dagbft/core/codec.hpp"
#include "dagbft/protocol/dag_builder.hpp"
#include "dagbft/protocol/orderer.hpp"
#include "dagbft/rbc/bracha.hpp"
#include "dagbft/sim/trace.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dagbft {

// Byzantine repertoire. A behavior replaces the process's protocol role at
// the few points where it can deviate; correct machinery is reused so the
// faulty traffic still parses.
struct ByzantineBehavior {
    enum class Kind {
        Correct,
        Silent,
        Equivocate,      // two vertex variants per round, INIT split across peers
        MalformedEdges,  // strips strong edges below 2f+1
        Withhold,        // sends nothing to the target set
        AdaptiveCorrupt, // correct until corrupt_at, then silent
    };
    Kind kind = Kind::Correct;
    std::vector<uint32_t> withhold_targets;
    sim::SimTime corrupt_at = 0;

    bool faulty_from_start() const {
        return kind != Kind::Correct && kind != Kind::AdaptiveCorrupt;
    }
};

// Everything a node needs from its host: the transport, the shared coin, and
// the run recorder. Implemented by the simulator.
struct NodeEnv {
    virtual ~NodeEnv() = default;
    // bytes are shared: one encoded message typically fans out to all n peers.
    virtual void send(ProcessId from, ProcessId to, std::shared_ptr<const std::string> bytes) = 0;
    virtual std::optional<ProcessId> coin_choose(ProcessId caller, uint64_t wave) = 0;
    virtual std::optional<ProcessId> coin_revealed(uint64_t wave) = 0;
    virtual void trace(sim::TraceEvent ev) = 0;
    virtual void record_abcast(ProcessId p, uint64_t seq, uint32_t tx_count) = 0;
    virtual void record_delivery(ProcessId p, const DeliveryEntry& e) = 0;
    virtual sim::SimTime now() const = 0;
};

// Client / drain phases. The client enqueues a fresh block whenever the DAG
// layer needs one (the protocol assumes an infinite stream); in Drain the
// queue refills with empty filler blocks, and in Flush creation stops so the
// run can quiesce.
enum class RunPhase { Main, Drain, Flush };

class Node : public CoinPort {
public:
    Node(Params p, ProcessId self, NodeEnv& env, ByzantineBehavior behavior,
         uint32_t batch_size, uint32_t tx_bytes);

    void on_start();
    void on_message(ProcessId from, const std::string& bytes);
    void on_coin_wakeup();
    void corrupt_now();  // adaptive corruption trigger

    void set_phase(RunPhase ph) { phase_ = ph; }
    RunPhase phase() const { return phase_; }

    bool currently_faulty() const;
    const ByzantineBehavior& behavior() const { return behavior_; }

    const DagStore& dag() const { return builder_.dag(); }
    const DagBuilder& builder() const { return builder_; }
    const Orderer& orderer() const { return orderer_; }
    const rbc::BrachaRbc& rbc_layer() const { return rbc_; }

    uint64_t waves_completed() const { return waves_completed_; }
    uint64_t commits() const { return commits_; }

    // CoinPort (used by the owned orderer).
    std::optional<ProcessId> choose_leader(uint64_t wave) override;
    std::optional<ProcessId> revealed_leader(uint64_t wave) const override;

private:
    void refill_queue();
    void drive_progress();
    void emit_outbound(const std::vector<rbc::Outbound>& msgs);
    void broadcast_vertex(Vertex v);
    void handle_wave_outcome(const Orderer::WaveOutcome& out);
    std::string fresh_tx_payload();

    Params params_;
    ProcessId self_;
    NodeEnv& env_;
    ByzantineBehavior behavior_;
    bool corrupted_ = false;
    RunPhase phase_ = RunPhase::Main;

    rbc::BrachaRbc rbc_;
    DagBuilder builder_;
    Orderer orderer_;

    uint32_t batch_size_;
    uint32_t tx_bytes_;
    uint64_t tx_counter_ = 0;
    uint64_t filler_seq_ = 0;  // continues the client seq during drain
    uint64_t waves_completed_ = 0;
    uint64_t commits_ = 0;
    uint64_t delivery_idx_ = 0;
};

}  // namespace dagbft
