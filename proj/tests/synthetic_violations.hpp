#pragma once

// Purpose-built violating RunResults: each checker property must fail on its
// synthetic counterpart (the checker itself is under test).

#include "dagbft/sim/simulator.hpp"

namespace dagbft::testing {

inline DeliveryEntry entry(uint64_t round, uint32_t source, uint64_t seq, uint32_t txs = 1,
                           int64_t t = 0) {
    DeliveryEntry e;
    e.round = round;
    e.source = ProcessId{source};
    e.seq = seq;
    e.tx_count = txs;
    e.sim_time = t;
    return e;
}

inline sim::RunResult skeleton() {
    sim::RunResult r;
    r.config.n = 4;
    r.config.f = 1;
    r.config.seed = 999;
    r.config.behaviors.push_back(
        sim::BehaviorSpec{3, ByzantineBehavior{ByzantineBehavior::Kind::Silent, {}, 0}});
    r.correct = {true, true, true, false};
    for (int i = 0; i < 4; ++i) r.dags.emplace_back(Params(4, 1));
    r.logs.resize(4);
    r.abcasts.resize(4);
    r.waves_completed.assign(4, 0);
    r.commit_count.assign(4, 0);
    r.flags.reached_horizon = true;
    r.flags.drained = true;
    r.flags.drain_completed = true;
    r.flags.quiescent = true;
    r.counters.max_rbc_deliveries_per_tag = 1;
    r.time_unit_ticks = sim::TICKS_PER_UNIT;
    return r;
}

namespace detail {

inline Vertex vx(uint32_t source, uint64_t round, std::vector<VertexRef> strong) {
    Vertex v;
    v.round = round;
    v.source = ProcessId{source};
    v.block = Block{ProcessId{source}, round, {"t"}};
    v.strong_edges = std::move(strong);
    return v;
}

inline std::vector<VertexRef> refs(std::initializer_list<std::pair<uint32_t, uint64_t>> rs) {
    std::vector<VertexRef> out;
    for (auto [s, r] : rs) out.push_back(VertexRef{ProcessId{s}, r});
    return out;
}

// Rounds 2+ never reference p0's chain, so (0,1) is unreachable from every
// later vertex; round 5 exists with full edges into round 4.
inline void build_severed_dag(DagStore& dag) {
    const auto genesis = refs({{0, 0}, {1, 0}, {2, 0}});
    for (uint32_t s = 0; s < 4; ++s) dag.insert(vx(s, 1, genesis));
    for (uint64_t r = 2; r <= 4; ++r)
        for (uint32_t s = 0; s < 4; ++s)
            dag.insert(vx(s, r, refs({{1, r - 1}, {2, r - 1}, {3, r - 1}})));
    for (uint32_t s = 0; s < 4; ++s)
        dag.insert(vx(s, 5, refs({{0, 4}, {1, 4}, {2, 4}, {3, 4}})));
}

inline sim::TraceEvent commit_event(uint32_t process, uint64_t wave, VertexRef leader,
                                    std::vector<VertexRef> voters, int64_t t) {
    sim::TraceEvent ev;
    ev.kind = sim::TraceKind::Commit;
    ev.process = process;
    ev.time = t;
    ev.a = wave;
    ev.b = leader.source.index;
    ev.c = leader.round;
    ev.refs = std::move(voters);
    ev.refs2 = {leader};
    return ev;
}

inline sim::TraceEvent wave_ready_event(uint32_t process, uint64_t wave,
                                        std::vector<VertexRef> r1, std::vector<VertexRef> r4,
                                        int64_t t) {
    sim::TraceEvent ev;
    ev.kind = sim::TraceKind::WaveReady;
    ev.process = process;
    ev.time = t;
    ev.a = wave;
    ev.refs = std::move(r1);
    ev.refs2 = std::move(r4);
    return ev;
}

}  // namespace detail

inline sim::RunResult violate_total_order() {
    auto r = skeleton();
    r.logs[0] = {entry(1, 0, 1), entry(1, 1, 1)};
    r.logs[1] = {entry(1, 0, 1), entry(1, 2, 1)};
    r.logs[2] = {entry(1, 0, 1), entry(1, 1, 1)};
    return r;
}

inline sim::RunResult violate_integrity() {
    auto r = skeleton();
    for (int p = 0; p < 3; ++p) r.logs[p] = {entry(1, 0, 1), entry(1, 0, 1)};
    return r;
}

inline sim::RunResult violate_agreement() {
    auto r = skeleton();
    const auto genesis = detail::refs({{0, 0}, {1, 0}, {2, 0}});
    r.dags[0].insert(detail::vx(0, 1, genesis));  // only p0 holds this vertex
    return r;
}

inline sim::RunResult violate_validity() {
    auto r = skeleton();
    r.abcasts[0] = {sim::AbcastRecord{1, 1, 0}};
    // No log contains (proposer=0, seq=1).
    return r;
}

inline sim::RunResult violate_chain_quality() {
    auto r = skeleton();
    for (int p = 0; p < 3; ++p)
        r.logs[p] = {entry(1, 3, 1), entry(2, 3, 2), entry(3, 3, 3)};
    return r;
}

inline sim::RunResult violate_lemma1() {
    auto r = skeleton();
    for (int p = 0; p < 3; ++p) detail::build_severed_dag(r.dags[p]);
    r.coin_reveals = {{1, 0}, {2, 1}};  // wave 2 leader (1,5) exists in every DAG
    r.trace.push_back(detail::commit_event(
        0, 1, VertexRef{ProcessId{0}, 1},
        detail::refs({{0, 4}, {1, 4}, {2, 4}}), 10));  // forged: no quorum really reaches (0,1)
    return r;
}

inline sim::RunResult violate_lemma2() {
    auto r = skeleton();
    for (int p = 0; p < 3; ++p) detail::build_severed_dag(r.dags[p]);
    r.trace.push_back(detail::wave_ready_event(0, 1,
                                               detail::refs({{0, 1}, {1, 1}, {2, 1}}),
                                               detail::refs({{1, 4}, {2, 4}, {3, 4}}), 8));
    return r;
}

inline sim::RunResult violate_increasing_commit() {
    auto r = skeleton();
    detail::build_severed_dag(r.dags[0]);
    r.trace.push_back(detail::commit_event(0, 2, VertexRef{ProcessId{1}, 5},
                                           detail::refs({{1, 4}, {2, 4}, {3, 4}}), 5));
    r.trace.push_back(detail::commit_event(0, 1, VertexRef{ProcessId{1}, 1},
                                           detail::refs({{1, 4}, {2, 4}, {3, 4}}), 6));
    return r;
}

inline sim::RunResult violate_quorum_intersection() {
    auto r = skeleton();
    for (int p = 0; p < 3; ++p) detail::build_severed_dag(r.dags[p]);
    r.trace.push_back(detail::commit_event(0, 1, VertexRef{ProcessId{0}, 1},
                                           detail::refs({{0, 4}, {1, 4}, {2, 4}}), 10));
    // p1 completed wave 1 with a round-4 snapshot that cannot reach (0,1).
    r.trace.push_back(detail::wave_ready_event(1, 1,
                                               detail::refs({{0, 1}, {1, 1}, {2, 1}}),
                                               detail::refs({{1, 4}, {2, 4}, {3, 4}}), 9));
    return r;
}

inline sim::RunResult violate_no_equivocation() {
    auto r = skeleton();
    r.counters.max_rbc_deliveries_per_tag = 2;
    return r;
}

// Same (round, source) slot, different block content at two correct stores.
inline sim::RunResult violate_no_equivocation_content() {
    auto r = skeleton();
    const auto genesis = detail::refs({{0, 0}, {1, 0}, {2, 0}});
    Vertex a = detail::vx(1, 1, genesis);
    Vertex b = detail::vx(1, 1, genesis);
    b.block.txs = {"u"};
    r.dags[0].insert(a);
    r.dags[1].insert(b);
    r.dags[2].insert(a);
    return r;
}

}  // namespace dagbft::testing
