#include "fs3a/cellular/aka.hpp"

#include <algorithm>

#include "fs3a/crypto/mac.hpp"
#include "fs3a/error.hpp"

namespace fs3a::cellular {

std::array<std::uint8_t, 6> sqn_bytes(std::uint64_t sqn) {
    std::array<std::uint8_t, 6> out{};
    for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(sqn >> (8 * (5 - i)));
    return out;
}

Res8 compute_res(const SecretKey& k, const Rand16& rand) {
    Bytes data(rand.begin(), rand.end());
    for (char c : std::string_view("res")) data.push_back(static_cast<std::uint8_t>(c));
    auto m = crypto::mac(k, data);
    Res8 out{};
    std::copy_n(m.begin(), out.size(), out.begin());
    return out;
}

Autn16 compute_autn(const SecretKey& k, const Rand16& rand, std::uint64_t sqn) {
    Bytes data(rand.begin(), rand.end());
    auto s = sqn_bytes(sqn & kSqnMask);
    data.insert(data.end(), s.begin(), s.end());
    for (char c : std::string_view("autn")) data.push_back(static_cast<std::uint8_t>(c));
    auto m = crypto::mac(k, data);
    Autn16 out{};
    std::copy_n(m.begin(), out.size(), out.begin());
    return out;
}

AuthVector make_vector(const SecretKey& k, const Rand16& rand, std::uint64_t sqn) {
    return AuthVector{rand, compute_res(k, rand), compute_autn(k, rand, sqn)};
}

Res8 ue_answer_challenge(SimCredential& cred, const Rand16& rand, const Autn16& autn) {
    for (std::uint64_t s = cred.sqn + 1; s <= cred.sqn + kSqnWindow && s <= kSqnMask; ++s) {
        auto expect = compute_autn(cred.k, rand, s);
        if (crypto::equal(expect, autn)) {
            cred.sqn = s;
            return compute_res(cred.k, rand);
        }
    }
    throw Error(Errc::NetworkAuthFailure, "autn does not verify for " + cred.imsi);
}

} // namespace fs3a::cellular
