#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace fs3a::crypto {

using Mac = std::array<std::uint8_t, 32>;

// The project-wide keyed hash: HMAC-SHA256.
Mac mac(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data);

// Constant-time comparison of equal-length byte ranges.
bool equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b);

} // namespace fs3a::crypto
