#include "dagbft/protocol/node.hpp"

namespace dagbft {

Node::Node(Params p, ProcessId self, NodeEnv& env, ByzantineBehavior behavior,
           uint32_t batch_size, uint32_t tx_bytes)
    : params_(p),
      self_(self),
      env_(env),
      behavior_(behavior),
      rbc_(p, self),
      builder_(p, self),
      orderer_(p, self, builder_),
      batch_size_(batch_size),
      tx_bytes_(tx_bytes) {
    builder_.set_refill([this] { refill_queue(); });
}

bool Node::currently_faulty() const {
    if (behavior_.kind == ByzantineBehavior::Kind::AdaptiveCorrupt) return corrupted_;
    return behavior_.kind != ByzantineBehavior::Kind::Correct;
}

std::string Node::fresh_tx_payload() {
    std::string tx(tx_bytes_, '\0');
    uint64_t stream = splitmix64((uint64_t{self_.index} << 32) ^ ++tx_counter_);
    for (size_t i = 0; i < tx.size(); ++i) {
        if (i % 8 == 0) stream = splitmix64(stream);
        tx[i] = static_cast<char>((stream >> ((i % 8) * 8)) & 0xff);
    }
    return tx;
}

void Node::refill_queue() {
    if (phase_ == RunPhase::Flush) return;
    if (phase_ == RunPhase::Main) {
        const uint64_t seq = orderer_.next_expected_seq();
        Block b;
        b.proposer = self_;
        b.seq = seq;
        for (uint32_t i = 0; i < batch_size_; ++i) b.txs.push_back(fresh_tx_payload());
        orderer_.a_bcast(std::move(b), seq);
        env_.record_abcast(self_, seq, batch_size_);
        return;
    }
    // Drain: keep the DAG moving on empty filler blocks so every pre-drain
    // proposal reaches a committed causal history.
    if (filler_seq_ == 0) filler_seq_ = orderer_.next_expected_seq();
    Block b;
    b.proposer = self_;
    b.seq = filler_seq_++;
    builder_.enqueue_block(std::move(b));
}

void Node::emit_outbound(const std::vector<rbc::Outbound>& msgs) {
    // All outbounds of one batch carry the same message; encode once.
    std::shared_ptr<const std::string> bytes;
    for (const auto& m : msgs) {
        if (behavior_.kind == ByzantineBehavior::Kind::Withhold) {
            bool withheld = false;
            for (uint32_t t : behavior_.withhold_targets)
                if (t == m.to.index) {
                    withheld = true;
                    break;
                }
            if (withheld) continue;
        }
        if (!bytes) bytes = std::make_shared<const std::string>(encode_rbc(m.msg));
        env_.send(self_, m.to, bytes);
    }
}

void Node::broadcast_vertex(Vertex v) {
    const uint64_t round = v.round;
    switch (behavior_.kind) {
        case ByzantineBehavior::Kind::Equivocate: {
            Vertex alt = v;
            if (alt.block.txs.empty())
                alt.block.txs.push_back("equivocation");
            else
                alt.block.txs[0] = fresh_tx_payload();
            const rbc::Tag tag{self_, round};
            const auto bytes_a = std::make_shared<const std::string>(
                encode_rbc(rbc::RbcMessage{rbc::MsgKind::Init, tag, encode_vertex(v), self_}));
            const auto bytes_b = std::make_shared<const std::string>(
                encode_rbc(rbc::RbcMessage{rbc::MsgKind::Init, tag, encode_vertex(alt), self_}));
            for (uint32_t i = 0; i < params_.n; ++i)
                env_.send(self_, ProcessId{i}, (i < params_.n / 2) ? bytes_a : bytes_b);
            return;
        }
        case ByzantineBehavior::Kind::MalformedEdges: {
            // 2f strong edges: below the admission threshold everywhere.
            if (v.strong_edges.size() >= params_.quorum())
                v.strong_edges.resize(params_.quorum() - 1);
            break;
        }
        default:
            break;
    }
    emit_outbound(rbc_.broadcast(encode_vertex(v), round));
}

void Node::handle_wave_outcome(const Orderer::WaveOutcome& out) {
    for (const auto& rec : out.commits) {
        ++commits_;
        sim::TraceEvent ev;
        ev.kind = sim::TraceKind::Commit;
        ev.process = self_.index;
        ev.time = env_.now();
        ev.a = rec.wave;
        ev.b = rec.leader.source.index;
        ev.c = rec.leader.round;
        ev.refs = rec.voters;
        ev.refs2 = rec.leader_chain;
        env_.trace(std::move(ev));
    }
    for (const auto& d : out.delivered) {
        env_.record_delivery(self_, d);
        sim::TraceEvent ev;
        ev.kind = sim::TraceKind::Deliver;
        ev.process = self_.index;
        ev.time = env_.now();
        ev.a = delivery_idx_++;
        ev.b = (uint64_t{d.source.index} << 32) | d.tx_count;
        ev.c = d.round;
        env_.trace(std::move(ev));
    }
}

void Node::drive_progress() {
    DagBuilder::Progress prog = builder_.try_progress();

    for (const auto& r : prog.inserted) {
        sim::TraceEvent ev;
        ev.kind = sim::TraceKind::VertexAdded;
        ev.process = self_.index;
        ev.time = env_.now();
        ev.a = r.round;
        ev.b = r.source.index;
        env_.trace(std::move(ev));
    }
    for (uint64_t r : prog.rounds_advanced) {
        sim::TraceEvent ev;
        ev.kind = sim::TraceKind::RoundAdvance;
        ev.process = self_.index;
        ev.time = env_.now();
        ev.a = r;
        env_.trace(std::move(ev));
    }

    // Wave decisions run before this round's own broadcast goes out, so the
    // coin for wave w is always invoked before any round-(4w+1) vertex of
    // ours hits the network.
    for (uint64_t w : prog.waves_ready) {
        ++waves_completed_;
        sim::TraceEvent ev;
        ev.kind = sim::TraceKind::WaveReady;
        ev.process = self_.index;
        ev.time = env_.now();
        ev.a = w;
        ev.refs = builder_.dag().round_refs(wave_round(w, 1));
        ev.refs2 = builder_.dag().round_refs(wave_round(w, 4));
        env_.trace(std::move(ev));
        handle_wave_outcome(orderer_.on_wave_ready(w, *this, env_.now()));
    }

    for (auto& v : prog.broadcasts) broadcast_vertex(std::move(v));
}

void Node::on_start() {
    if (behavior_.kind == ByzantineBehavior::Kind::Silent) return;
    drive_progress();
}

void Node::on_message(ProcessId from, const std::string& bytes) {
    if (behavior_.kind == ByzantineBehavior::Kind::Silent || corrupted_) return;
    auto msg = rbc::decode_rbc(bytes);
    if (!msg) return;  // malformed transport payload
    msg->from = from;  // transport-authenticated

    auto res = rbc_.on_message(*msg);
    emit_outbound(res.out);
    if (res.delivered) {
        auto v = decode_vertex(res.delivered->payload);
        if (v) builder_.on_r_deliver(std::move(*v), res.delivered->tag.round,
                                     res.delivered->tag.sender);
        // Undecodable payloads are dropped like any malformed vertex.
    }
    drive_progress();
}

void Node::on_coin_wakeup() {
    if (behavior_.kind == ByzantineBehavior::Kind::Silent || corrupted_) return;
    handle_wave_outcome(orderer_.on_coin_revealed(*this, env_.now()));
}

void Node::corrupt_now() { corrupted_ = true; }

std::optional<ProcessId> Node::choose_leader(uint64_t wave) {
    return env_.coin_choose(self_, wave);
}

std::optional<ProcessId> Node::revealed_leader(uint64_t wave) const {
    return env_.coin_revealed(wave);
}

}  // namespace dagbft
