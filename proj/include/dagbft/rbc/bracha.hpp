#pragma once

#include "dagbft/core/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace dagbft::rbc {

enum class MsgKind : uint8_t { Init = 1, Echo = 2, Ready = 3 };

// One broadcast instance is identified by (sender, round).
struct Tag {
    ProcessId sender;
    uint64_t round = 0;

    bool operator==(const Tag&) const = default;
};

struct RbcMessage {
    MsgKind kind = MsgKind::Init;
    Tag tag;
    std::string payload;
    // Transport-authenticated origin, stamped by the receiving node from the
    // simulated link; never trusted from the encoded bytes.
    ProcessId from;
};

// Wire format: u8 kind | u32 sender | u64 round | u32 len | payload bytes.
std::string encode_rbc(const RbcMessage& m);
std::optional<RbcMessage> decode_rbc(const std::string& bytes);

struct Outbound {
    ProcessId to;
    RbcMessage msg;
};

struct Delivery {
    Tag tag;
    std::string payload;
};

// Bracha reliable broadcast: ECHO after INIT; READY after 2f+1 ECHO or f+1
// READY; deliver after 2f+1 READY, once per tag. Conflicting payloads from
// one peer under one tag are discarded and counted.
class BrachaRbc {
public:
    BrachaRbc(Params p, ProcessId self);

    // INIT to all n processes, self included (self-delivery takes the same
    // three-phase path as everyone else's). Throws on a duplicate tag from
    // this caller.
    std::vector<Outbound> broadcast(std::string payload, uint64_t round);

    struct Result {
        std::vector<Outbound> out;
        std::optional<Delivery> delivered;
    };
    Result on_message(const RbcMessage& m);

    uint64_t misbehavior_drops() const { return misbehavior_drops_; }
    // Times a deliver fired for this tag (Integrity bounds it at 1; the
    // checker asserts that from these counters).
    uint32_t delivery_count(const Tag& t) const;
    uint64_t total_deliveries() const { return total_deliveries_; }
    uint64_t max_deliveries_per_tag() const { return max_deliveries_per_tag_; }

private:
    struct PayloadVotes {
        std::string payload;
        uint64_t echo_mask = 0;
        uint64_t ready_mask = 0;
    };
    struct Instance {
        bool sent_echo = false;
        bool sent_ready = false;
        bool delivered = false;
        bool broadcast_started = false;
        uint64_t any_echo_mask = 0;   // peers that echoed this tag (any payload)
        uint64_t any_ready_mask = 0;  // peers that readied this tag
        std::vector<PayloadVotes> votes;
        uint32_t deliveries = 0;
    };

    Instance& instance(const Tag& t);
    const Instance* find_instance(const Tag& t) const;
    PayloadVotes& votes_for(Instance& ins, const std::string& payload);
    std::vector<Outbound> to_all(MsgKind kind, const Tag& tag, const std::string& payload) const;

    Params params_;
    ProcessId self_;
    std::vector<Instance> instances_;  // dense: round * n + sender
    uint64_t misbehavior_drops_ = 0;
    uint64_t total_deliveries_ = 0;
    uint64_t max_deliveries_per_tag_ = 0;
};

}  // namespace dagbft::rbc
