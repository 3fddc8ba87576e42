#pragma once

// Random well-formed protocol messages for round-trip properties.

#include <random>
#include <string>

#include "fs3a/error.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::testing {

class MessageGen {
public:
    explicit MessageGen(std::uint64_t seed) : rng_(seed) {}

    Message any() { return make(pick(std::variant_size_v<Message>)); }

    Message make(std::size_t index) {
        switch (index) {
        case 0: return s1::InitialUEMessage{enb_id(), imsi()};
        case 1: return s1::AuthenticationRequest{enb_id(), arr<16>(), arr<16>()};
        case 2: return s1::AuthenticationResponse{enb_id(), arr<8>()};
        case 3: return s1::InitialContextSetupRequest{enb_id(), nonzero32(), Ipv4{u32()}};
        case 4: return s1::InitialContextSetupResponse{enb_id()};
        case 5: return s1::UEContextRelease{enb_id(), text(12)};
        case 6: return s1::UEContextModification{enb_id(), nonzero32(), Ipv4{u32()}};
        case 7: return s6a::AIR{corr(), imsi(), plmn()};
        case 8: {
            s6a::AIA m{corr(), {}, {}};
            if (coin(5)) {
                m.error = error();
            } else {
                auto n = 1 + pick(12);
                for (std::size_t i = 0; i < n; ++i) m.vectors.push_back({arr<16>(), arr<8>(), arr<16>()});
            }
            return m;
        }
        case 9: return s6a::ULR{corr(), imsi(), id()};
        case 10: {
            s6a::ULA m{corr(), {}, {}};
            if (coin(4)) m.error = error(); else m.subscription = record();
            return m;
        }
        case 11: return fed::SubscriptionFetchReq{header(), imsi()};
        case 12: {
            fed::SubscriptionFetchResp m{header(), {}, {}};
            if (coin(4)) m.error = error(); else m.record = record();
            return m;
        }
        case 13: return fed::MobilityAdvertise{header(), imsi(), id(), id(), text(10) + "p"};
        case 14: return fed::WatchRequest{header(), imsi(), text(8) + "x"};
        case 15: return fed::UEArrivalNotice{header(), imsi(), id()};
        case 16: return fed::StateFetchReq{header(), imsi(), id()};
        case 17: {
            fed::StateFetchResp m{header(), {}, {}};
            if (coin(4)) m.error = error(); else m.state = state();
            return m;
        }
        case 18: return fed::NetworkRegister{header(), id(), plmn(), id() + "/proxy"};
        case 19: return fed::ContextSync{header(), imsi(), nonzero32(), Ipv4{u32()}, plmn(), coin(2)};
        case 20: return app::LoginStart{id()};
        case 21: return app::AuthRedirect{id() + "/oidc", id()};
        case 22: return app::OidcAuthRequest{id(), text(16)};
        case 23: return coin(3) ? app::OidcAuthResponse{{}, error()} : app::OidcAuthResponse{text(40) + "t", {}};
        case 24: return app::TokenPresent{text(60) + "t"};
        case 25: return app::LoginOk{hex_id()};
        case 26: return app::Resume{hex_id()};
        case 27: return app::Data{blob(200)};
        case 28: return app::AppError{id(), error()};
        case 29: return app::TokenValidateReq{corr(), id(), text(50) + "t", Ipv4{u32()}};
        case 30: return coin(3) ? app::TokenValidateResp{corr(), {}, error()} : app::TokenValidateResp{corr(), imsi(), {}};
        case 31: return app::IdentityQuery{corr(), id(), Ipv4{u32()}};
        case 32: return coin(3) ? app::IdentityAssert{corr(), {}, error()} : app::IdentityAssert{corr(), imsi(), {}};
        default: return app::StateUpload{state()};
        }
    }

private:
    std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }
    bool coin(int one_in) { return pick(static_cast<std::size_t>(one_in)) == 0; }
    std::uint32_t u32() { return static_cast<std::uint32_t>(rng_()); }
    std::uint32_t nonzero32() { return u32() | 1u; }
    std::uint32_t enb_id() { return coin(4) ? 0 : nonzero32(); }

    template <std::size_t N>
    std::array<std::uint8_t, N> arr() {
        std::array<std::uint8_t, N> a{};
        for (auto& b : a) b = static_cast<std::uint8_t>(rng_());
        return a;
    }
    Bytes blob(std::size_t max) {
        Bytes b(pick(max + 1));
        for (auto& x : b) x = static_cast<std::uint8_t>(rng_());
        return b;
    }
    std::string digits(std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) s.push_back(static_cast<char>('0' + pick(10)));
        return s;
    }
    std::string imsi() { return digits(15); }
    std::string plmn() { return digits(coin(2) ? 5 : 6); }
    std::string id() {
        static constexpr char kAlpha[] = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789_-";
        std::string s;
        auto n = 1 + pick(12);
        for (std::size_t i = 0; i < n; ++i) s.push_back(kAlpha[pick(sizeof kAlpha - 1)]);
        return s;
    }
    std::string hex_id() {
        static constexpr char kHex[] = "0123456789abcdef";
        std::string s;
        for (int i = 0; i < 16; ++i) s.push_back(kHex[pick(16)]);
        return s;
    }
    // Printable ASCII plus control characters, '%', '=' and some multibyte
    // UTF-8 so escaping is exercised.
    std::string text(std::size_t max) {
        static const char* kPieces[] = {"a", "Z", "0", " ", "=", "%", "\n", "\t", "\x01", "\x7f", "\xc3\xa9",
                                        "\xe2\x82\xac", "\xf0\x9f\x93\xb6", "/", ".", "%41"};
        std::string s;
        auto n = pick(max + 1);
        for (std::size_t i = 0; i < n; ++i) s += kPieces[pick(sizeof kPieces / sizeof *kPieces)];
        return s;
    }
    std::string corr() { return id() + ":" + hex_id(); }
    std::string error() { return std::string(errc_name(static_cast<Errc>(pick(27)))); }
    fed::Header header() { return {id(), id(), corr()}; }
    SubscriptionRecord record() {
        SubscriptionRecord r{imsi(), plmn(), coin(2), {}};
        auto n = pick(4);
        static const char* kKeys[] = {"apn", "qos_tier", "slice", "x9"};
        for (std::size_t i = 0; i < n; ++i) r.profile[kKeys[pick(4)]] = text(8);
        return r;
    }
    AppState state() { return {imsi(), id(), rng_(), blob(300), rng_()}; }

    std::mt19937_64 rng_;
};

} // namespace fs3a::testing
