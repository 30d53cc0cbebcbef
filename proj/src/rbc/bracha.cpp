#include "dagbft/rbc/bracha.hpp"

#include "dagbft/core/codec.hpp"

#include <algorithm>
#include <bit>

namespace dagbft::rbc {

std::string encode_rbc(const RbcMessage& m) {
    using namespace codec;
    std::string out;
    put_u8(out, static_cast<uint8_t>(m.kind));
    put_u32(out, m.tag.sender.index);
    put_u64(out, m.tag.round);
    put_u32(out, static_cast<uint32_t>(m.payload.size()));
    out.append(m.payload);
    return out;
}

std::optional<RbcMessage> decode_rbc(const std::string& bytes) {
    using namespace codec;
    size_t pos = 0;
    uint8_t kind = 0;
    uint32_t sender = 0, len = 0;
    uint64_t round = 0;
    if (!get_u8(bytes, pos, kind)) return std::nullopt;
    if (kind < 1 || kind > 3) return std::nullopt;
    if (!get_u32(bytes, pos, sender)) return std::nullopt;
    if (!get_u64(bytes, pos, round)) return std::nullopt;
    if (!get_u32(bytes, pos, len)) return std::nullopt;
    if (pos + len != bytes.size()) return std::nullopt;
    RbcMessage m;
    m.kind = static_cast<MsgKind>(kind);
    m.tag = Tag{ProcessId{sender}, round};
    m.payload = bytes.substr(pos, len);
    return m;
}

BrachaRbc::BrachaRbc(Params p, ProcessId self) : params_(p), self_(self) {}

BrachaRbc::Instance& BrachaRbc::instance(const Tag& t) {
    const size_t slot = t.round * params_.n + t.sender.index;
    if (instances_.size() <= slot) instances_.resize(slot + 1);
    return instances_[slot];
}

const BrachaRbc::Instance* BrachaRbc::find_instance(const Tag& t) const {
    const size_t slot = t.round * params_.n + t.sender.index;
    if (instances_.size() <= slot) return nullptr;
    return &instances_[slot];
}

BrachaRbc::PayloadVotes& BrachaRbc::votes_for(Instance& ins, const std::string& payload) {
    for (auto& pv : ins.votes)
        if (pv.payload == payload) return pv;
    ins.votes.push_back(PayloadVotes{payload, 0, 0});
    return ins.votes.back();
}

std::vector<Outbound> BrachaRbc::to_all(MsgKind kind, const Tag& tag,
                                        const std::string& payload) const {
    std::vector<Outbound> out;
    out.reserve(params_.n);
    for (uint32_t i = 0; i < params_.n; ++i)
        out.push_back(Outbound{ProcessId{i}, RbcMessage{kind, tag, payload, self_}});
    return out;
}

std::vector<Outbound> BrachaRbc::broadcast(std::string payload, uint64_t round) {
    const Tag tag{self_, round};
    Instance& ins = instance(tag);
    if (ins.broadcast_started)
        throw std::logic_error("double broadcast for tag round " + std::to_string(round));
    ins.broadcast_started = true;
    return to_all(MsgKind::Init, tag, payload);
}

BrachaRbc::Result BrachaRbc::on_message(const RbcMessage& m) {
    Result res;
    if (m.tag.sender.index >= params_.n || m.from.index >= params_.n) {
        ++misbehavior_drops_;
        return res;
    }
    Instance& ins = instance(m.tag);
    const uint64_t from_bit = uint64_t{1} << m.from.index;

    switch (m.kind) {
        case MsgKind::Init: {
            // Only the tag's sender may INIT; echo the first payload seen.
            if (m.from != m.tag.sender) {
                ++misbehavior_drops_;
                return res;
            }
            if (ins.sent_echo) return res;
            ins.sent_echo = true;
            res.out = to_all(MsgKind::Echo, m.tag, m.payload);
            return res;
        }
        case MsgKind::Echo: {
            if (ins.any_echo_mask & from_bit) {
                // Second echo from one peer: no-op if same payload, else misbehavior.
                auto& pv = votes_for(ins, m.payload);
                if (!(pv.echo_mask & from_bit)) ++misbehavior_drops_;
                return res;
            }
            ins.any_echo_mask |= from_bit;
            auto& pv = votes_for(ins, m.payload);
            pv.echo_mask |= from_bit;
            if (!ins.sent_ready &&
                std::popcount(pv.echo_mask) >= static_cast<int>(params_.quorum())) {
                ins.sent_ready = true;
                res.out = to_all(MsgKind::Ready, m.tag, m.payload);
            }
            return res;
        }
        case MsgKind::Ready: {
            if (ins.any_ready_mask & from_bit) {
                auto& pv = votes_for(ins, m.payload);
                if (!(pv.ready_mask & from_bit)) ++misbehavior_drops_;
                return res;
            }
            ins.any_ready_mask |= from_bit;
            auto& pv = votes_for(ins, m.payload);
            pv.ready_mask |= from_bit;
            const int readies = std::popcount(pv.ready_mask);
            if (!ins.sent_ready && readies >= static_cast<int>(params_.small_quorum())) {
                ins.sent_ready = true;
                res.out = to_all(MsgKind::Ready, m.tag, m.payload);
            }
            if (!ins.delivered && readies >= static_cast<int>(params_.quorum())) {
                ins.delivered = true;
                ++ins.deliveries;
                ++total_deliveries_;
                max_deliveries_per_tag_ = std::max<uint64_t>(max_deliveries_per_tag_, ins.deliveries);
                res.delivered = Delivery{m.tag, pv.payload};
            }
            return res;
        }
    }
    return res;
}

uint32_t BrachaRbc::delivery_count(const Tag& t) const {
    const Instance* ins = find_instance(t);
    return ins ? ins->deliveries : 0;
}

}  // namespace dagbft::rbc
