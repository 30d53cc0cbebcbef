#include "dagbft/protocol/orderer.hpp"

#include <stdexcept>

namespace dagbft {

Orderer::Orderer(Params p, ProcessId self, DagBuilder& builder)
    : params_(p), self_(self), builder_(builder) {}

void Orderer::a_bcast(Block b, uint64_t seq) {
    if (seq != next_seq_)
        throw std::logic_error("a_bcast seq must be consecutive: expected " +
                               std::to_string(next_seq_) + " got " + std::to_string(seq));
    ++next_seq_;
    builder_.enqueue_block(std::move(b));
}

bool Orderer::is_delivered(const VertexRef& r) const {
    const auto idx = builder_.dag().dense_index(r);
    if (!idx) return false;
    const size_t w = *idx / 64;
    if (delivered_mask_.size() <= w) return false;
    return (delivered_mask_[w] >> (*idx % 64)) & 1;
}

void Orderer::mark_delivered(const VertexRef& r) {
    const auto idx = builder_.dag().dense_index(r);
    const size_t w = *idx / 64;
    if (delivered_mask_.size() <= w) delivered_mask_.resize(w + 1, 0);
    delivered_mask_[w] |= uint64_t{1} << (*idx % 64);
    ++delivered_count_;
}

std::optional<VertexRef> Orderer::wave_leader_vertex(uint64_t w, ProcessId leader) const {
    const VertexRef ref{leader, wave_round(w, 1)};
    if (!builder_.dag().contains(ref)) return std::nullopt;
    return ref;  // at most one vertex per (source, round)
}

Orderer::WaveOutcome Orderer::on_wave_ready(uint64_t w, CoinPort& coin, int64_t now) {
    ready_waves_.push_back(w);
    return process_queue(coin, now);
}

Orderer::WaveOutcome Orderer::on_coin_revealed(CoinPort& coin, int64_t now) {
    return process_queue(coin, now);
}

Orderer::WaveOutcome Orderer::process_queue(CoinPort& coin, int64_t now) {
    WaveOutcome out;
    const DagStore& dag = builder_.dag();

    while (!ready_waves_.empty()) {
        const uint64_t w = ready_waves_.front();
        const auto leader = coin.choose_leader(w);
        if (!leader) {
            // Fewer than f+1 invocations so far; resume on reveal.
            out.coin_pending = true;
            return out;
        }
        ready_waves_.pop_front();
        ++out.waves_processed;

        const auto leader_ref = wave_leader_vertex(w, *leader);
        if (!leader_ref) continue;  // leader not delivered locally: no commit

        std::vector<VertexRef> voters;
        for (const auto& v4 : dag.round_refs(wave_round(w, 4)))
            if (dag.strong_path(v4, *leader_ref)) voters.push_back(v4);
        if (voters.size() < params_.quorum()) continue;  // no commit

        std::vector<VertexRef> stack;
        stack.push_back(*leader_ref);
        VertexRef chained = *leader_ref;
        for (uint64_t wp = w - 1; wp >= decided_wave_ + 1; --wp) {
            const auto earlier = coin.revealed_leader(wp);
            if (!earlier)
                throw std::logic_error("coin for wave " + std::to_string(wp) +
                                       " unrevealed during back-chaining");
            const auto earlier_ref = wave_leader_vertex(wp, *earlier);
            if (earlier_ref && dag.strong_path(chained, *earlier_ref)) {
                stack.push_back(*earlier_ref);
                chained = *earlier_ref;
            }
            if (wp == decided_wave_ + 1) break;
        }
        decided_wave_ = w;

        CommitRecord rec;
        rec.wave = w;
        rec.leader = *leader_ref;
        rec.voters = std::move(voters);
        order_vertices(stack, rec, out.delivered, now);
        out.commits.push_back(std::move(rec));
    }
    return out;
}

void Orderer::order_vertices(std::vector<VertexRef>& stack, CommitRecord& rec,
                             std::vector<DeliveryEntry>& out, int64_t now) {
    const DagStore& dag = builder_.dag();
    while (!stack.empty()) {
        const VertexRef leader = stack.back();
        stack.pop_back();
        rec.leader_chain.push_back(leader);
        for (const auto& u : dag.causal_history(leader)) {
            if (u.round == 0) continue;  // genesis blocks are empty placeholders
            if (is_delivered(u)) continue;
            mark_delivered(u);
            const Vertex& vu = dag.get(u);
            DeliveryEntry e;
            e.round = u.round;
            e.source = u.source;
            e.seq = vu.block.seq;
            e.tx_count = static_cast<uint32_t>(vu.block.txs.size());
            e.filler = vu.block.is_filler();
            e.sim_time = now;
            out.push_back(e);
        }
    }
}

}  // namespace dagbft
