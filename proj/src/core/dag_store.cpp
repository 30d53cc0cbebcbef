#include "dagbft/core/dag_store.hpp"

#include <algorithm>

namespace dagbft {

DagStore::DagStore(Params p) : params_(p) {
    // Genesis: 2f+1 hardcoded vertices, sources 0..2f, round 0, no edges.
    for (uint32_t i = 0; i < params_.quorum(); ++i) {
        Vertex g;
        g.round = 0;
        g.source = ProcessId{i};
        g.block = Block{ProcessId{i}, 0, {}};
        const uint32_t idx = static_cast<uint32_t>(verts_.size());
        verts_.push_back(std::move(g));
        ancestors_.emplace_back();
        strong_ancestors_.emplace_back();
        if (index_.size() < params_.n) index_.resize(params_.n, 0);
        index_[i] = static_cast<int32_t>(idx) + 1;
        if (rounds_.empty()) rounds_.emplace_back();
        rounds_[0].push_back(idx);
    }
}

void DagStore::set_bit(Mask& m, uint32_t i) {
    const size_t w = i / 64;
    if (m.size() <= w) m.resize(w + 1, 0);
    m[w] |= (uint64_t{1} << (i % 64));
}

bool DagStore::test_bit(const Mask& m, uint32_t i) {
    const size_t w = i / 64;
    if (m.size() <= w) return false;
    return (m[w] >> (i % 64)) & 1;
}

void DagStore::or_into(Mask& dst, const Mask& src) {
    if (dst.size() < src.size()) dst.resize(src.size(), 0);
    for (size_t i = 0; i < src.size(); ++i) dst[i] |= src[i];
}

int64_t DagStore::lookup(const VertexRef& r) const {
    if (r.source.index >= params_.n) return -1;
    const uint64_t slot = r.round * params_.n + r.source.index;
    if (slot >= index_.size()) return -1;
    const int32_t v = index_[slot];
    return v == 0 ? -1 : v - 1;
}

bool DagStore::contains(const VertexRef& r) const { return lookup(r) >= 0; }

const Vertex& DagStore::get(const VertexRef& r) const {
    const int64_t i = lookup(r);
    if (i < 0)
        throw DagError(DagError::Kind::VertexAbsent,
                       "vertex absent: (source=" + std::to_string(r.source.index) +
                           ", round=" + std::to_string(r.round) + ")");
    return verts_[static_cast<size_t>(i)];
}

std::optional<uint32_t> DagStore::dense_index(const VertexRef& r) const {
    const int64_t i = lookup(r);
    if (i < 0) return std::nullopt;
    return static_cast<uint32_t>(i);
}

void DagStore::validate_edges(const Vertex& v) const {
    if (v.round < 1)
        throw DagError(DagError::Kind::MalformedVertex, "inserted vertex must have round >= 1");
    if (v.source.index >= params_.n)
        throw DagError(DagError::Kind::MalformedVertex, "vertex source out of range");
    uint64_t seen_sources = 0;
    for (const auto& e : v.strong_edges) {
        if (e.round + 1 != v.round)
            throw DagError(DagError::Kind::MalformedVertex, "strong edge must target round-1");
        const uint64_t bit = uint64_t{1} << e.source.index;
        if (seen_sources & bit)
            throw DagError(DagError::Kind::MalformedVertex, "strong edge sources must be distinct");
        seen_sources |= bit;
    }
    for (const auto& e : v.weak_edges) {
        if (e.round + 2 > v.round)
            throw DagError(DagError::Kind::MalformedVertex, "weak edge must target round <= round-2");
    }
}

void DagStore::insert(const Vertex& v) {
    validate_edges(v);
    if (contains(v.ref()))
        throw DagError(DagError::Kind::DuplicateVertex,
                       "equivocation at store: duplicate (source=" +
                           std::to_string(v.source.index) + ", round=" + std::to_string(v.round) + ")");

    Mask anc, sanc;
    for (const auto& e : v.strong_edges) {
        const int64_t t = lookup(e);
        if (t < 0) throw DagError(DagError::Kind::PredecessorsAbsent, "predecessors absent");
        set_bit(anc, static_cast<uint32_t>(t));
        set_bit(sanc, static_cast<uint32_t>(t));
        or_into(anc, ancestors_[static_cast<size_t>(t)]);
        or_into(sanc, strong_ancestors_[static_cast<size_t>(t)]);
    }
    for (const auto& e : v.weak_edges) {
        const int64_t t = lookup(e);
        if (t < 0) throw DagError(DagError::Kind::PredecessorsAbsent, "predecessors absent");
        set_bit(anc, static_cast<uint32_t>(t));
        or_into(anc, ancestors_[static_cast<size_t>(t)]);
    }

    const uint32_t idx = static_cast<uint32_t>(verts_.size());
    verts_.push_back(v);
    ancestors_.push_back(std::move(anc));
    strong_ancestors_.push_back(std::move(sanc));

    const uint64_t slot = v.round * params_.n + v.source.index;
    if (index_.size() <= slot) index_.resize(slot + 1, 0);
    index_[slot] = static_cast<int32_t>(idx) + 1;
    if (rounds_.size() <= v.round) rounds_.resize(v.round + 1);
    rounds_[v.round].push_back(idx);
}

bool DagStore::path(const VertexRef& v, const VertexRef& u) const {
    const int64_t vi = lookup(v);
    const int64_t ui = lookup(u);
    if (vi < 0 || ui < 0) throw DagError(DagError::Kind::VertexAbsent, "vertex absent in path query");
    if (vi == ui) return true;  // k=1 sequence
    return test_bit(ancestors_[static_cast<size_t>(vi)], static_cast<uint32_t>(ui));
}

bool DagStore::strong_path(const VertexRef& v, const VertexRef& u) const {
    const int64_t vi = lookup(v);
    const int64_t ui = lookup(u);
    if (vi < 0 || ui < 0)
        throw DagError(DagError::Kind::VertexAbsent, "vertex absent in strong_path query");
    if (vi == ui) return true;
    return test_bit(strong_ancestors_[static_cast<size_t>(vi)], static_cast<uint32_t>(ui));
}

bool DagStore::would_reach(const Vertex& pending, const VertexRef& u) const {
    const int64_t ui = lookup(u);
    if (ui < 0) throw DagError(DagError::Kind::VertexAbsent, "vertex absent in would_reach query");
    for (const auto& e : pending.strong_edges) {
        const int64_t t = lookup(e);
        if (t < 0) continue;
        if (t == ui || test_bit(ancestors_[static_cast<size_t>(t)], static_cast<uint32_t>(ui)))
            return true;
    }
    for (const auto& e : pending.weak_edges) {
        const int64_t t = lookup(e);
        if (t < 0) continue;
        if (t == ui || test_bit(ancestors_[static_cast<size_t>(t)], static_cast<uint32_t>(ui)))
            return true;
    }
    return false;
}

std::vector<VertexRef> DagStore::causal_history(const VertexRef& v) const {
    const int64_t vi = lookup(v);
    if (vi < 0) throw DagError(DagError::Kind::VertexAbsent, "vertex absent in causal_history");
    std::vector<VertexRef> out;
    const Mask& anc = ancestors_[static_cast<size_t>(vi)];
    for (size_t w = 0; w < anc.size(); ++w) {
        uint64_t bits = anc[w];
        while (bits) {
            const uint32_t b = static_cast<uint32_t>(__builtin_ctzll(bits));
            bits &= bits - 1;
            out.push_back(verts_[w * 64 + b].ref());
        }
    }
    out.push_back(verts_[static_cast<size_t>(vi)].ref());
    std::sort(out.begin(), out.end());
    return out;
}

uint64_t DagStore::max_round() const { return rounds_.empty() ? 0 : rounds_.size() - 1; }

size_t DagStore::round_size(uint64_t round) const {
    if (round >= rounds_.size()) return 0;
    return rounds_[round].size();
}

std::vector<VertexRef> DagStore::round_refs(uint64_t round) const {
    std::vector<VertexRef> out;
    if (round >= rounds_.size()) return out;
    out.reserve(rounds_[round].size());
    for (uint32_t idx : rounds_[round]) out.push_back(verts_[idx].ref());
    return out;
}

}  // namespace dagbft
