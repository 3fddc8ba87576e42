#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <variant>

#include "fs3a/wire/bytes.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::wire {

inline constexpr std::size_t kHeaderSize = 5;
// Cap on the length field (msg_type byte + body).
inline constexpr std::uint32_t kMaxFrameLength = 16u * 1024u * 1024u;

// length(4, big-endian) || msg_type(1) || canonical body.
// Throws Error{InvariantViolation} when a field breaks its type invariant.
Bytes encode_frame(const Message& msg);

struct Decoded {
    Message msg;
    std::size_t consumed = 0;
};
struct NeedMoreBytes {
    std::size_t needed = 0; // additional bytes required
};
struct Malformed {
    std::string reason;
};
using DecodeResult = std::variant<Decoded, NeedMoreBytes, Malformed>;

// Total over arbitrary input; never throws.
DecodeResult decode_frame(std::span<const std::uint8_t> data);

// Total frame size announced by a header, if the first 4 bytes are present.
std::optional<std::size_t> peek_frame_size(std::span<const std::uint8_t> data);

// Checks the per-type invariants; returns an empty string when the message is
// well formed, otherwise a description of the first violation.
std::string check_invariants(const Message& msg);

} // namespace fs3a::wire
