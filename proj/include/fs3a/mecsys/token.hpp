#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>

#include "fs3a/crypto/mac.hpp"
#include "fs3a/wire/bytes.hpp"

namespace fs3a::mecsys {

// Federation-shared signing key per app id.
using AppKeys = std::map<std::string, Bytes>;

// Text form: v1.<issuer>.<subject>.<audience>.<iat>.<exp>.<nonce>.<sig>
// with iat/exp as 16 hex digits, nonce 32 hex digits, sig 64 hex digits.
struct AccessToken {
    std::string issuer;
    std::string subject;  // imsi
    std::string audience; // app id
    std::uint64_t issued_at_ms = 0;
    std::uint64_t expires_at_ms = 0;
    std::array<std::uint8_t, 16> nonce{};
    crypto::Mac signature{};

    std::string signing_input() const;
    std::string encode() const;
    static std::optional<AccessToken> decode(std::string_view text);

    bool operator==(const AccessToken&) const = default;
};

std::array<std::uint8_t, 16> random_nonce(std::mt19937_64& rng);

AccessToken issue_token(std::string issuer, std::string subject, std::string audience, double now_ms,
                        std::uint64_t lifetime_ms, const std::array<std::uint8_t, 16>& nonce, const Bytes& key);

// Checks signature (under the key of the claimed audience), expiry and
// audience. Returns the decoded token. Throws Error{BadSignature | Expired |
// AudienceMismatch}. The subject/IP binding is checked by the caller.
AccessToken check_token(std::string_view text, const std::string& app_id, const AppKeys& keys, double now_ms);

} // namespace fs3a::mecsys
