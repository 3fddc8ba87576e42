#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "fs3a/wire/messages.hpp"

namespace fs3a::cellular {

using SecretKey = std::array<std::uint8_t, 32>;

inline constexpr std::uint64_t kSqnMask = (std::uint64_t{1} << 48) - 1;
// How far ahead of the last accepted sqn the UE still accepts a challenge.
inline constexpr std::uint64_t kSqnWindow = 32;

struct SimCredential {
    std::string imsi;
    SecretKey k{};
    std::uint64_t sqn = 0; // highest sqn accepted so far (48 bits)
};

// 6-byte big-endian encoding of a 48-bit sequence number.
std::array<std::uint8_t, 6> sqn_bytes(std::uint64_t sqn);

Res8 compute_res(const SecretKey& k, const Rand16& rand);
Autn16 compute_autn(const SecretKey& k, const Rand16& rand, std::uint64_t sqn);
AuthVector make_vector(const SecretKey& k, const Rand16& rand, std::uint64_t sqn);

// Verifies autn against the sqn window and returns res. Advances cred.sqn.
// Throws Error{NetworkAuthFailure}.
Res8 ue_answer_challenge(SimCredential& cred, const Rand16& rand, const Autn16& autn);

} // namespace fs3a::cellular
