#pragma once

#include "dagbft/core/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace dagbft {

// Per-process DAG: round -> vertex set, genesis at round 0 with 2f+1
// predefined vertices (sources 0..2f, empty blocks, no edges).
//
// Reachability is answered from per-vertex ancestor bitmasks over dense
// insertion indices, filled at insert time. Closure (every edge target
// inserted first) makes the masks final once written, so path/strong_path
// are O(1) lookups. Semantics are pinned to the brute-force DFS oracle in
// the tests.
class DagStore {
public:
    explicit DagStore(Params p);

    const Params& params() const { return params_; }

    bool contains(const VertexRef& r) const;
    const Vertex& get(const VertexRef& r) const;  // throws VertexAbsent

    // Inserts v. Throws DuplicateVertex ("equivocation at store" — cannot
    // happen when fed through rbc), PredecessorsAbsent if closure would
    // break, MalformedVertex on edge round violations.
    void insert(const Vertex& v);

    // True iff a directed edge sequence (strong or weak) leads v -> u.
    bool path(const VertexRef& v, const VertexRef& u) const;
    // True iff a strong-edges-only sequence leads v -> u.
    bool strong_path(const VertexRef& v, const VertexRef& u) const;

    // All vertices reachable from v (v included), ascending (round, source).
    std::vector<VertexRef> causal_history(const VertexRef& v) const;

    uint64_t max_round() const;
    size_t round_size(uint64_t round) const;
    // Refs present in a round, in insertion order.
    std::vector<VertexRef> round_refs(uint64_t round) const;
    size_t size() const { return verts_.size(); }
    const Vertex& at(size_t dense_idx) const { return verts_[dense_idx]; }

    // Dense insertion index of a stored vertex (stable for this store).
    std::optional<uint32_t> dense_index(const VertexRef& r) const;

    // Reachability from a vertex not yet inserted, following its edge lists.
    bool would_reach(const Vertex& pending, const VertexRef& u) const;

private:
    using Mask = std::vector<uint64_t>;

    static void set_bit(Mask& m, uint32_t i);
    static bool test_bit(const Mask& m, uint32_t i);
    static void or_into(Mask& dst, const Mask& src);

    int64_t lookup(const VertexRef& r) const;  // dense idx or -1
    void validate_edges(const Vertex& v) const;

    Params params_;
    std::vector<Vertex> verts_;         // dense, insertion order
    std::vector<Mask> ancestors_;       // per vertex: reachable via any edges
    std::vector<Mask> strong_ancestors_;
    std::vector<int32_t> index_;        // (round * n + source) -> dense idx + 1
    std::vector<std::vector<uint32_t>> rounds_;  // round -> dense idxs
};

}  // namespace dagbft
