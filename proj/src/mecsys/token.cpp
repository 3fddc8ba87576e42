#include "fs3a/mecsys/token.hpp"

#include <cmath>
#include <cstdio>
#include <vector>

#include "fs3a/error.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::mecsys {

namespace {

std::string hex16(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::optional<std::uint64_t> parse_hex16(std::string_view s) {
    if (s.size() != 16) return std::nullopt;
    auto b = from_hex(s);
    if (!b) return std::nullopt;
    std::uint64_t v = 0;
    for (auto x : *b) v = (v << 8) | x;
    return v;
}

std::vector<std::string_view> split_dots(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == '.') {
            out.push_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

} // namespace

std::string AccessToken::signing_input() const {
    return "v1." + issuer + "." + subject + "." + audience + "." + hex16(issued_at_ms) + "." + hex16(expires_at_ms) +
           "." + to_hex(nonce);
}

std::string AccessToken::encode() const { return signing_input() + "." + to_hex(signature); }

std::optional<AccessToken> AccessToken::decode(std::string_view text) {
    auto parts = split_dots(text);
    if (parts.size() != 8 || parts[0] != "v1") return std::nullopt;
    AccessToken t;
    t.issuer = std::string(parts[1]);
    t.subject = std::string(parts[2]);
    t.audience = std::string(parts[3]);
    if (!valid_id(t.issuer) || !valid_imsi(t.subject) || !valid_id(t.audience)) return std::nullopt;
    auto iat = parse_hex16(parts[4]);
    auto exp = parse_hex16(parts[5]);
    auto nonce = from_hex(parts[6]);
    auto sig = from_hex(parts[7]);
    if (!iat || !exp || !nonce || nonce->size() != 16 || !sig || sig->size() != 32) return std::nullopt;
    t.issued_at_ms = *iat;
    t.expires_at_ms = *exp;
    std::copy(nonce->begin(), nonce->end(), t.nonce.begin());
    std::copy(sig->begin(), sig->end(), t.signature.begin());
    return t;
}

std::array<std::uint8_t, 16> random_nonce(std::mt19937_64& rng) {
    std::array<std::uint8_t, 16> n{};
    for (std::size_t i = 0; i < n.size(); i += 8) {
        auto r = rng();
        for (std::size_t b = 0; b < 8; ++b) n[i + b] = static_cast<std::uint8_t>(r >> (8 * b));
    }
    return n;
}

AccessToken issue_token(std::string issuer, std::string subject, std::string audience, double now_ms,
                        std::uint64_t lifetime_ms, const std::array<std::uint8_t, 16>& nonce, const Bytes& key) {
    AccessToken t;
    t.issuer = std::move(issuer);
    t.subject = std::move(subject);
    t.audience = std::move(audience);
    t.issued_at_ms = static_cast<std::uint64_t>(std::floor(now_ms));
    t.expires_at_ms = t.issued_at_ms + lifetime_ms;
    t.nonce = nonce;
    t.signature = crypto::mac(key, as_bytes(t.signing_input()));
    return t;
}

AccessToken check_token(std::string_view text, const std::string& app_id, const AppKeys& keys, double now_ms) {
    auto t = AccessToken::decode(text);
    if (!t) throw Error(Errc::BadSignature, "undecodable token");
    auto key = keys.find(t->audience);
    if (key == keys.end()) throw Error(Errc::BadSignature, "no key for " + t->audience);
    auto expect = crypto::mac(key->second, as_bytes(t->signing_input()));
    if (!crypto::equal(expect, t->signature)) throw Error(Errc::BadSignature, "signature mismatch");
    if (now_ms >= static_cast<double>(t->expires_at_ms)) throw Error(Errc::Expired, "token expired");
    if (t->audience != app_id) throw Error(Errc::AudienceMismatch, t->audience + " != " + app_id);
    return *t;
}

} // namespace fs3a::mecsys
