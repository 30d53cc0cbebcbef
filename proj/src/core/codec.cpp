#include "dagbft/core/codec.hpp"

namespace dagbft {

namespace codec {

void put_u8(std::string& out, uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u32(std::string& out, uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void put_u64(std::string& out, uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

bool get_u8(const std::string& in, size_t& pos, uint8_t& v) {
    if (pos + 1 > in.size()) return false;
    v = static_cast<uint8_t>(in[pos++]);
    return true;
}

bool get_u32(const std::string& in, size_t& pos, uint32_t& v) {
    if (pos + 4 > in.size()) return false;
    v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(static_cast<uint8_t>(in[pos++])) << (8 * i);
    return true;
}

bool get_u64(const std::string& in, size_t& pos, uint64_t& v) {
    if (pos + 8 > in.size()) return false;
    v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(static_cast<uint8_t>(in[pos++])) << (8 * i);
    return true;
}

}  // namespace codec

std::string encode_vertex(const Vertex& v) {
    using namespace codec;
    std::string body;
    put_u64(body, v.round);
    put_u32(body, v.source.index);
    put_u32(body, static_cast<uint32_t>(v.strong_edges.size()));
    put_u32(body, static_cast<uint32_t>(v.weak_edges.size()));
    for (const auto& e : v.strong_edges) {
        put_u32(body, e.source.index);
        put_u64(body, e.round);
    }
    for (const auto& e : v.weak_edges) {
        put_u32(body, e.source.index);
        put_u64(body, e.round);
    }
    put_u32(body, v.block.proposer.index);
    put_u64(body, v.block.seq);
    const uint32_t tx_size =
        v.block.txs.empty() ? 0 : static_cast<uint32_t>(v.block.txs.front().size());
    for (const auto& tx : v.block.txs)
        if (tx.size() != tx_size)
            throw std::logic_error("block wire format requires fixed-size transaction records");
    put_u32(body, tx_size);
    put_u32(body, static_cast<uint32_t>(v.block.txs.size()));
    for (const auto& tx : v.block.txs) body.append(tx);
    std::string out;
    put_u32(out, static_cast<uint32_t>(body.size()));
    out.append(body);
    return out;
}

std::optional<Vertex> decode_vertex(const std::string& bytes) {
    using namespace codec;
    size_t pos = 0;
    uint32_t total = 0;
    if (!get_u32(bytes, pos, total)) return std::nullopt;
    if (bytes.size() != pos + total) return std::nullopt;

    Vertex v;
    uint32_t src = 0, ns = 0, nw = 0;
    if (!get_u64(bytes, pos, v.round)) return std::nullopt;
    if (!get_u32(bytes, pos, src)) return std::nullopt;
    v.source = ProcessId{src};
    if (!get_u32(bytes, pos, ns) || !get_u32(bytes, pos, nw)) return std::nullopt;
    if (static_cast<uint64_t>(ns) + nw > 4096) return std::nullopt;  // sanity bound
    auto read_refs = [&](std::vector<VertexRef>& out, uint32_t count) {
        out.reserve(count);
        for (uint32_t i = 0; i < count; ++i) {
            uint32_t s = 0;
            uint64_t r = 0;
            if (!get_u32(bytes, pos, s) || !get_u64(bytes, pos, r)) return false;
            out.push_back(VertexRef{ProcessId{s}, r});
        }
        return true;
    };
    if (!read_refs(v.strong_edges, ns) || !read_refs(v.weak_edges, nw)) return std::nullopt;

    uint32_t prop = 0, tx_size = 0, ntx = 0;
    if (!get_u32(bytes, pos, prop)) return std::nullopt;
    v.block.proposer = ProcessId{prop};
    if (!get_u64(bytes, pos, v.block.seq)) return std::nullopt;
    if (!get_u32(bytes, pos, tx_size) || !get_u32(bytes, pos, ntx)) return std::nullopt;
    if (ntx > 1u << 20 || tx_size > 1u << 20) return std::nullopt;
    if (pos + static_cast<uint64_t>(ntx) * tx_size != bytes.size()) return std::nullopt;
    v.block.txs.reserve(ntx);
    for (uint32_t i = 0; i < ntx; ++i) {
        v.block.txs.emplace_back(bytes.substr(pos, tx_size));
        pos += tx_size;
    }
    return v;
}

}  // namespace dagbft
