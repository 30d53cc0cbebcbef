#include "dagbft/protocol/dag_builder.hpp"

#include <algorithm>

namespace dagbft {

DagBuilder::DagBuilder(Params p, ProcessId self) : params_(p), self_(self), dag_(p) {}

void DagBuilder::enqueue_block(Block b) { blocks_to_propose_.push_back(std::move(b)); }

bool DagBuilder::on_r_deliver(Vertex v, uint64_t round, ProcessId source) {
    // Round and source come from the reliable broadcast, not the payload.
    v.round = round;
    v.source = source;

    if (v.strong_edges.size() < params_.quorum()) {
        ++below_threshold_dropped_;
        return false;
    }
    if (round < 1 || source.index >= params_.n) {
        ++malformed_dropped_;
        return false;
    }
    uint64_t seen = 0;
    for (const auto& e : v.strong_edges) {
        if (e.round + 1 != round || e.source.index >= params_.n) {
            ++malformed_dropped_;
            return false;
        }
        const uint64_t bit = uint64_t{1} << e.source.index;
        if (seen & bit) {
            ++malformed_dropped_;
            return false;
        }
        seen |= bit;
    }
    for (const auto& e : v.weak_edges) {
        if (e.round + 2 > round || e.source.index >= params_.n) {
            ++malformed_dropped_;
            return false;
        }
    }
    buffer_.push_back(std::move(v));
    return true;
}

bool DagBuilder::predecessors_present(const Vertex& v) const {
    for (const auto& e : v.strong_edges)
        if (!dag_.contains(e)) return false;
    for (const auto& e : v.weak_edges)
        if (!dag_.contains(e)) return false;
    return true;
}

void DagBuilder::set_weak_edges(Vertex& v, uint64_t round) const {
    v.weak_edges.clear();
    if (round < 3) return;
    for (uint64_t r = round - 2; r >= 1; --r) {
        for (const auto& u : dag_.round_refs(r)) {
            if (!dag_.would_reach(v, u)) v.weak_edges.push_back(u);
        }
        if (r == 1) break;
    }
}

std::optional<Vertex> DagBuilder::create_new_vertex(uint64_t round) {
    if (blocks_to_propose_.empty() && refill_) refill_();
    if (blocks_to_propose_.empty()) return std::nullopt;  // creation deferred
    Vertex v;
    v.round = round;
    v.source = self_;
    v.block = std::move(blocks_to_propose_.front());
    blocks_to_propose_.pop_front();
    for (const auto& u : dag_.round_refs(round - 1)) v.strong_edges.push_back(u);
    set_weak_edges(v, round);
    return v;
}

DagBuilder::Progress DagBuilder::try_progress() {
    Progress out;
    for (;;) {
        bool changed = false;

        // Drain the buffer of everything whose causal history is present.
        for (;;) {
            bool moved = false;
            for (size_t i = 0; i < buffer_.size(); ++i) {
                if (!predecessors_present(buffer_[i])) continue;
                if (dag_.contains(buffer_[i].ref())) {
                    // rbc integrity makes this unreachable; drop defensively.
                    buffer_.erase(buffer_.begin() + static_cast<long>(i));
                    --i;
                    continue;
                }
                dag_.insert(buffer_[i]);
                out.inserted.push_back(buffer_[i].ref());
                buffer_.erase(buffer_.begin() + static_cast<long>(i));
                moved = true;
                changed = true;
                --i;
            }
            if (!moved) break;
        }

        // Deferred own vertex: a block may have arrived since.
        if (creation_deferred_ && last_broadcast_round_ < round_) {
            if (auto v = create_new_vertex(round_)) {
                creation_deferred_ = false;
                last_broadcast_round_ = round_;
                out.broadcasts.push_back(std::move(*v));
                changed = true;
            }
        }

        // Start a new round once the current one has 2f+1 vertices.
        if (dag_.round_size(round_) >= params_.quorum()) {
            if (round_ % 4 == 0 && round_ > 0) out.waves_ready.push_back(round_ / 4);
            ++round_;
            out.rounds_advanced.push_back(round_);
            if (auto v = create_new_vertex(round_)) {
                creation_deferred_ = false;
                last_broadcast_round_ = round_;
                out.broadcasts.push_back(std::move(*v));
            } else {
                creation_deferred_ = true;
            }
            changed = true;
        }

        if (!changed) break;
    }
    return out;
}

}  // namespace dagbft
