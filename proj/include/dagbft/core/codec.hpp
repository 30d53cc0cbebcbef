#pragma once

#include "dagbft/core/types.hpp"

#include <optional>
#include <string>

namespace dagbft {

// Length-prefixed little-endian vertex record, used as the rbc payload and
// in trace files:
//   u32 total_len | u64 round | u32 source | u32 n_strong | u32 n_weak |
//   refs (u32 source, u64 round) ... | u32 proposer | u64 seq |
//   u32 tx_size | u32 tx_count | tx_count * tx_size payload bytes
// Blocks batch fixed-size transaction records, so the size is stored once;
// encoding a ragged block throws.
std::string encode_vertex(const Vertex& v);

// Returns nothing if the record is truncated or inconsistent.
std::optional<Vertex> decode_vertex(const std::string& bytes);

namespace codec {
void put_u8(std::string& out, uint8_t v);
void put_u32(std::string& out, uint32_t v);
void put_u64(std::string& out, uint64_t v);
bool get_u8(const std::string& in, size_t& pos, uint8_t& v);
bool get_u32(const std::string& in, size_t& pos, uint32_t& v);
bool get_u64(const std::string& in, size_t& pos, uint64_t& v);
}  // namespace codec

}  // namespace dagbft
