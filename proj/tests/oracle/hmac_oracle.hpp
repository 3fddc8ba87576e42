#pragma once
// Second, independent keyed-hash implementation (libsodium) used to check
// AKA vectors and token signatures produced by the library (OpenSSL).

#include <sodium.h>

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

namespace fs3a::oracle {

inline std::array<std::uint8_t, 32> hmac_sha256(const std::vector<std::uint8_t>& key,
                                               const std::vector<std::uint8_t>& data) {
    crypto_auth_hmacsha256_state st;
    crypto_auth_hmacsha256_init(&st, key.data(), key.size());
    crypto_auth_hmacsha256_update(&st, data.data(), data.size());
    std::array<std::uint8_t, 32> out{};
    crypto_auth_hmacsha256_final(&st, out.data());
    return out;
}

inline std::vector<std::uint8_t> concat(std::initializer_list<std::vector<std::uint8_t>> parts) {
    std::vector<std::uint8_t> out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

inline std::vector<std::uint8_t> text(std::string_view s) { return {s.begin(), s.end()}; }

// xres: first 8 bytes of MAC(k, rand || "res")
inline std::vector<std::uint8_t> xres(const std::vector<std::uint8_t>& k, const std::vector<std::uint8_t>& rand) {
    auto m = hmac_sha256(k, concat({rand, text("res")}));
    return {m.begin(), m.begin() + 8};
}

// autn: first 16 bytes of MAC(k, rand || sqn(48-bit BE) || "autn")
inline std::vector<std::uint8_t> autn(const std::vector<std::uint8_t>& k, const std::vector<std::uint8_t>& rand,
                                      std::uint64_t sqn) {
    std::vector<std::uint8_t> s;
    for (int i = 5; i >= 0; --i) s.push_back(static_cast<std::uint8_t>(sqn >> (8 * i)));
    auto m = hmac_sha256(k, concat({rand, s, text("autn")}));
    return {m.begin(), m.begin() + 16};
}

} // namespace fs3a::oracle
