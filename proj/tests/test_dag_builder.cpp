#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dagbft/protocol/dag_builder.hpp"
#include "dagbft/sim/time.hpp"

#include <deque>

using namespace dagbft;

namespace {

Vertex delivered_vertex(uint32_t source, uint64_t round, std::vector<VertexRef> strong,
                        std::vector<VertexRef> weak = {}) {
    Vertex v;
    v.round = round;
    v.source = ProcessId{source};
    v.block = Block{ProcessId{source}, round, {"t"}};
    v.strong_edges = std::move(strong);
    v.weak_edges = std::move(weak);
    return v;
}

std::vector<VertexRef> refs(std::initializer_list<std::pair<uint32_t, uint64_t>> rs) {
    std::vector<VertexRef> out;
    for (auto [s, r] : rs) out.push_back(VertexRef{ProcessId{s}, r});
    return out;
}

// Closed-world builder pump: n builders deliver each other's broadcasts
// directly (no rbc), FIFO, with an optional per-source hold-back.
struct Pump {
    explicit Pump(Params p) : params(p) {
        for (uint32_t i = 0; i < p.n; ++i) {
            builders.emplace_back(p, ProcessId{i});
            seqs.push_back(1);
        }
        for (uint32_t i = 0; i < p.n; ++i) {
            const uint32_t idx = i;
            builders[i].set_refill([this, idx] {
                Block b{ProcessId{idx}, seqs[idx], {"x"}};
                ++seqs[idx];
                builders[idx].enqueue_block(std::move(b));
            });
        }
    }

    void start() {
        for (auto& b : builders) collect(b.try_progress());
    }

    void collect(const DagBuilder::Progress& prog) {
        for (const auto& v : prog.broadcasts) wire.push_back(v);
    }

    // Delivers queued broadcasts to every builder; returns when idle.
    void run(uint64_t round_limit) {
        while (!wire.empty()) {
            Vertex v = wire.front();
            wire.pop_front();
            for (auto& b : builders) {
                if (b.current_round() > round_limit) continue;
                Vertex copy = v;
                b.on_r_deliver(std::move(copy), v.round, v.source);
                collect(b.try_progress());
            }
            bool past = true;
            for (auto& b : builders)
                if (b.current_round() <= round_limit) past = false;
            if (past) break;
        }
    }

    Params params;
    std::vector<DagBuilder> builders;
    std::vector<uint64_t> seqs;
    std::deque<Vertex> wire;
};

}  // namespace

TEST_CASE("wave_round implements round(w,k) = 4(w-1)+k") {
    CHECK(wave_round(1, 1) == 1);
    CHECK(wave_round(1, 4) == 4);
    CHECK(wave_round(2, 4) == 8);
    CHECK(wave_round(3, 1) == 9);
}

TEST_CASE("vertices below the 2f+1 strong-edge threshold are dropped") {
    DagBuilder b(Params(4, 1), ProcessId{0});
    Vertex v = delivered_vertex(1, 1, refs({{0, 0}, {1, 0}}));  // 2 < 3
    CHECK_FALSE(b.on_r_deliver(std::move(v), 1, ProcessId{1}));
    CHECK(b.below_threshold_dropped() == 1);
    CHECK(b.buffer_size() == 0);
}

TEST_CASE("malformed edge rounds are dropped and counted") {
    DagBuilder b(Params(4, 1), ProcessId{0});
    // strong edges pointing two rounds back
    Vertex v = delivered_vertex(1, 2, refs({{0, 0}, {1, 0}, {2, 0}}));
    CHECK_FALSE(b.on_r_deliver(std::move(v), 2, ProcessId{1}));
    CHECK(b.malformed_dropped() == 1);

    Vertex w = delivered_vertex(1, 1, refs({{0, 0}, {1, 0}, {2, 0}}), refs({{2, 0}}));
    CHECK_FALSE(b.on_r_deliver(std::move(w), 1, ProcessId{1}));  // weak edge to round-1
    CHECK(b.malformed_dropped() == 2);
}

TEST_CASE("a vertex waits in the buffer until its predecessors arrive") {
    DagBuilder b(Params(4, 1), ProcessId{3});  // no refill: stays passive
    Vertex late = delivered_vertex(1, 2, refs({{0, 1}, {1, 1}, {2, 1}}));
    CHECK(b.on_r_deliver(std::move(late), 2, ProcessId{1}));
    auto prog = b.try_progress();
    CHECK(prog.inserted.empty());
    CHECK(b.buffer_size() == 1);

    const auto genesis = refs({{0, 0}, {1, 0}, {2, 0}});
    for (uint32_t s = 0; s < 3; ++s) {
        Vertex v = delivered_vertex(s, 1, genesis);
        CHECK(b.on_r_deliver(std::move(v), 1, ProcessId{s}));
    }
    prog = b.try_progress();
    CHECK(b.buffer_size() == 0);
    CHECK(prog.inserted.size() == 4);
    CHECK(b.dag().contains(VertexRef{ProcessId{1}, 2}));
}

TEST_CASE("first own vertex references all 2f+1 genesis vertices") {
    DagBuilder b(Params(4, 1), ProcessId{0});
    b.enqueue_block(Block{ProcessId{0}, 1, {"x"}});
    auto prog = b.try_progress();
    REQUIRE(prog.broadcasts.size() == 1);
    CHECK(prog.broadcasts[0].round == 1);
    CHECK(prog.broadcasts[0].strong_edges.size() == 3);
    CHECK(prog.rounds_advanced == std::vector<uint64_t>{1});
    CHECK(prog.waves_ready.empty());  // r=0 completion signals no wave
}

TEST_CASE("vertex creation is deferred without a block and resumes on enqueue") {
    DagBuilder b(Params(4, 1), ProcessId{0});  // no refill installed
    auto prog = b.try_progress();
    CHECK(b.current_round() == 1);  // the round still advances
    CHECK(prog.broadcasts.empty());
    b.enqueue_block(Block{ProcessId{0}, 1, {"x"}});
    prog = b.try_progress();
    REQUIRE(prog.broadcasts.size() == 1);
    CHECK(prog.broadcasts[0].round == 1);
    CHECK(b.last_broadcast_round() == 1);
}

TEST_CASE("fault-free pump: waves signal at rounds 4 and 8, buffers drain, edges are full") {
    Pump pump(Params(4, 1));
    pump.start();
    pump.run(9);

    std::vector<std::vector<uint64_t>> waves(pump.builders.size());
    for (uint32_t i = 0; i < 4; ++i) {
        const auto& b = pump.builders[i];
        CHECK(b.current_round() >= 9);
        CHECK(b.dag().round_size(4) >= 3);
        CHECK(b.buffer_size() == 0);
        CHECK(b.malformed_dropped() == 0);
    }

    // Re-drive one builder from scratch to observe the wave signals directly.
    Pump p2(Params(4, 1));
    p2.start();
    std::vector<uint64_t> seen;
    while (!p2.wire.empty()) {
        Vertex v = p2.wire.front();
        p2.wire.pop_front();
        for (uint32_t i = 0; i < 4; ++i) {
            if (p2.builders[i].current_round() > 9) continue;
            Vertex copy = v;
            p2.builders[i].on_r_deliver(std::move(copy), v.round, v.source);
            auto prog = p2.builders[i].try_progress();
            p2.collect(prog);
            if (i == 0)
                for (uint64_t w : prog.waves_ready) seen.push_back(w);
        }
    }
    REQUIRE(seen.size() >= 2);
    CHECK(seen[0] == 1);  // fires when round 4 completes
    CHECK(seen[1] == 2);  // fires when round 8 = round(2,4) completes

    // Every created vertex in a fault-free n=4 run carries 3 or 4 strong edges.
    for (const auto& b : pump.builders) {
        for (uint64_t r = 1; r <= 8; ++r) {
            for (const auto& ref : b.dag().round_refs(r)) {
                const auto& v = b.dag().get(ref);
                CHECK(v.strong_edges.size() >= 3);
                CHECK(v.strong_edges.size() <= 4);
            }
        }
    }
}

TEST_CASE("a held-back vertex gets a weak edge and the post-condition holds") {
    // Deliver rounds 1-3 to a lagging builder but hold back p3's round-1
    // vertex until after the builder created its round-2..3 vertices.
    Pump pump(Params(4, 1));
    pump.start();

    // Manually: builder 0 sees rounds progress without p3's round-1 vertex.
    DagBuilder& b = pump.builders[0];
    Vertex held = delivered_vertex(3, 1, refs({{0, 0}, {1, 0}, {2, 0}}));

    // rbc self-delivery: feed the builder's own broadcasts back to it.
    auto self_deliver = [&b](DagBuilder::Progress& prog) {
        while (!prog.broadcasts.empty()) {
            Vertex own = prog.broadcasts.front();
            prog.broadcasts.erase(prog.broadcasts.begin());
            b.on_r_deliver(Vertex{own}, own.round, own.source);
            auto next = b.try_progress();
            for (auto& nb : next.broadcasts) prog.broadcasts.push_back(nb);
        }
    };

    // Feed own round-1 plus two peers (not p3) -> round 2.
    const auto genesis = refs({{0, 0}, {1, 0}, {2, 0}});
    for (uint32_t s = 1; s <= 2; ++s) {
        Vertex v = delivered_vertex(s, 1, genesis);
        b.on_r_deliver(std::move(v), 1, ProcessId{s});
    }
    Vertex own1 = delivered_vertex(0, 1, genesis);
    b.on_r_deliver(std::move(own1), 1, ProcessId{0});
    auto prog = b.try_progress();
    self_deliver(prog);
    REQUIRE(b.current_round() == 2);

    // Round-2 vertices from peers referencing rounds they saw (without p3).
    const auto r1 = refs({{0, 1}, {1, 1}, {2, 1}});
    for (uint32_t s = 1; s <= 2; ++s) {
        Vertex v = delivered_vertex(s, 2, r1);
        b.on_r_deliver(std::move(v), 2, ProcessId{s});
    }
    prog = b.try_progress();
    self_deliver(prog);
    REQUIRE(b.current_round() == 3);

    // Now the straggler arrives; the next created vertex must weak-edge it.
    b.on_r_deliver(std::move(held), 1, ProcessId{3});
    const auto r2 = refs({{0, 2}, {1, 2}, {2, 2}});
    for (uint32_t s = 1; s <= 2; ++s) {
        Vertex v = delivered_vertex(s, 3, r2);
        b.on_r_deliver(std::move(v), 3, ProcessId{s});
    }
    prog = b.try_progress();
    REQUIRE(b.current_round() == 4);
    REQUIRE_FALSE(prog.broadcasts.empty());
    const Vertex& v4 = prog.broadcasts.back();
    CHECK(v4.round == 4);
    bool has_weak_to_straggler = false;
    for (const auto& w : v4.weak_edges)
        if (w == VertexRef{ProcessId{3}, 1}) has_weak_to_straggler = true;
    CHECK(has_weak_to_straggler);

    // Post-condition: the created vertex reaches every lower-round vertex.
    DagStore probe = b.dag();
    probe.insert(v4);
    for (uint64_t r = 1; r < v4.round; ++r)
        for (const auto& u : probe.round_refs(r)) CHECK(probe.path(v4.ref(), u));
}

TEST_CASE("created vertices reach all lower-round vertices across random pumps") {
    // 100 seeded shuffles of delivery order; the set_weak_edges post-condition
    // must hold for every vertex each builder creates.
    for (uint64_t seed = 1; seed <= 100; ++seed) {
        sim::Rng rng(seed);
        Pump pump(Params(4, 1));
        pump.start();
        std::vector<Vertex> wire;
        auto drain_wire = [&] {
            while (!pump.wire.empty()) {
                wire.push_back(pump.wire.front());
                pump.wire.pop_front();
            }
        };
        drain_wire();
        uint64_t steps = 0;
        while (!wire.empty() && ++steps < 400) {
            const size_t i = rng.below(wire.size());
            Vertex v = wire[i];
            wire.erase(wire.begin() + static_cast<long>(i));
            for (uint32_t b = 0; b < 4; ++b) {
                if (pump.builders[b].current_round() > 6) continue;
                Vertex copy = v;
                pump.builders[b].on_r_deliver(std::move(copy), v.round, v.source);
                auto prog = pump.builders[b].try_progress();
                for (const auto& nv : prog.broadcasts) {
                    DagStore probe = pump.builders[b].dag();
                    probe.insert(nv);
                    for (uint64_t r = 1; r < nv.round; ++r)
                        for (const auto& u : probe.round_refs(r))
                            CHECK(probe.path(nv.ref(), u));
                    pump.wire.push_back(nv);
                }
            }
            drain_wire();
        }
    }
}
