#include "fs3a/crypto/mac.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "fs3a/error.hpp"

namespace fs3a::crypto {

Mac mac(std::span<const std::uint8_t> key, std::span<const std::uint8_t> data) {
    Mac out{};
    unsigned int len = 0;
    static const std::uint8_t kEmpty = 0;
    const std::uint8_t* d = data.empty() ? &kEmpty : data.data();
    if (HMAC(EVP_sha256(), key.data(), static_cast<int>(key.size()), d, data.size(), out.data(), &len) == nullptr ||
        len != out.size()) {
        throw Error(Errc::InvariantViolation, "HMAC failed");
    }
    return out;
}

bool equal(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) return false;
    if (a.empty()) return true;
    return CRYPTO_memcmp(a.data(), b.data(), a.size()) == 0;
}

} // namespace fs3a::crypto
