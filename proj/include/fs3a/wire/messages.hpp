#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fs3a/wire/bytes.hpp"

namespace fs3a {

using Rand16 = std::array<std::uint8_t, 16>;
using Autn16 = std::array<std::uint8_t, 16>;
using Res8 = std::array<std::uint8_t, 8>;

struct SubscriptionRecord {
    std::string imsi;
    std::string home_plmn;
    bool mec_entitlement = false;
    std::map<std::string, std::string> profile; // apn, qos_tier, ...

    bool operator==(const SubscriptionRecord&) const = default;
};

struct AuthVector {
    Rand16 rand{};
    Res8 xres{};
    Autn16 autn{};

    bool operator==(const AuthVector&) const = default;
};

struct AppState {
    std::string user_id;
    std::string app_id;
    std::uint64_t version = 0;
    Bytes blob;
    std::uint64_t updated_at_ms = 0;

    bool operator==(const AppState&) const = default;
};

// S1AP-lite. `enb_ue_id` stands in for the eNB UE S1AP id; zero means "not
// yet assigned" and is omitted on the wire.
namespace s1 {
struct InitialUEMessage {
    std::uint32_t enb_ue_id = 0;
    std::string imsi;
    bool operator==(const InitialUEMessage&) const = default;
};
struct AuthenticationRequest {
    std::uint32_t enb_ue_id = 0;
    Rand16 rand{};
    Autn16 autn{};
    bool operator==(const AuthenticationRequest&) const = default;
};
struct AuthenticationResponse {
    std::uint32_t enb_ue_id = 0;
    Res8 res{};
    bool operator==(const AuthenticationResponse&) const = default;
};
struct InitialContextSetupRequest {
    std::uint32_t enb_ue_id = 0;
    std::uint32_t teid = 0;
    Ipv4 ue_ip;
    bool operator==(const InitialContextSetupRequest&) const = default;
};
struct InitialContextSetupResponse {
    std::uint32_t enb_ue_id = 0;
    bool operator==(const InitialContextSetupResponse&) const = default;
};
struct UEContextRelease {
    std::uint32_t enb_ue_id = 0;
    std::string reason;
    bool operator==(const UEContextRelease&) const = default;
};
// Carries the periodic IP change the MEC tap has to follow.
struct UEContextModification {
    std::uint32_t enb_ue_id = 0;
    std::uint32_t teid = 0;
    Ipv4 ue_ip;
    bool operator==(const UEContextModification&) const = default;
};
} // namespace s1

// S6a-lite. `corr` is the requester-chosen hop id the proxy matches
// responses against.
namespace s6a {
struct AIR {
    std::string corr;
    std::string imsi;
    std::string visited_plmn;
    bool operator==(const AIR&) const = default;
};
struct AIA {
    std::string corr;
    std::vector<AuthVector> vectors;
    std::string error;
    bool operator==(const AIA&) const = default;
};
struct ULR {
    std::string corr;
    std::string imsi;
    std::string mme_id;
    bool operator==(const ULR&) const = default;
};
struct ULA {
    std::string corr;
    std::optional<SubscriptionRecord> subscription;
    std::string error;
    bool operator==(const ULA&) const = default;
};
} // namespace s6a

// Federation messages between MEC entities; the header drives proxy routing.
namespace fed {
struct Header {
    std::string src_net;
    std::string dst_net;
    std::string corr;
    bool operator==(const Header&) const = default;
};
struct SubscriptionFetchReq {
    Header hdr;
    std::string imsi;
    bool operator==(const SubscriptionFetchReq&) const = default;
};
struct SubscriptionFetchResp {
    Header hdr;
    std::optional<SubscriptionRecord> record;
    std::string error;
    bool operator==(const SubscriptionFetchResp&) const = default;
};
struct MobilityAdvertise {
    Header hdr;
    std::string user_id;
    std::string app_id;
    std::string source_network;
    std::string source_platform;
    bool operator==(const MobilityAdvertise&) const = default;
};
struct WatchRequest {
    Header hdr;
    std::string user_id;
    std::string requester;
    bool operator==(const WatchRequest&) const = default;
};
struct UEArrivalNotice {
    Header hdr;
    std::string user_id;
    std::string platform;
    bool operator==(const UEArrivalNotice&) const = default;
};
struct StateFetchReq {
    Header hdr;
    std::string user_id;
    std::string app_id;
    bool operator==(const StateFetchReq&) const = default;
};
struct StateFetchResp {
    Header hdr;
    std::optional<AppState> state;
    std::string error;
    bool operator==(const StateFetchResp&) const = default;
};
struct NetworkRegister {
    Header hdr;
    std::string network_id;
    std::string plmn_prefix;
    std::string address;
    bool operator==(const NetworkRegister&) const = default;
};
// MEC Manager -> OIDC module / app servers: current IP <-> IMSI binding.
struct ContextSync {
    Header hdr;
    std::string imsi;
    std::uint32_t teid = 0;
    Ipv4 ue_ip;
    std::string home_plmn;
    bool active = false;
    bool operator==(const ContextSync&) const = default;
};
} // namespace fed

// Application layer, including the cellular-OIDC exchanges.
namespace app {
struct LoginStart {
    std::string app_id;
    bool operator==(const LoginStart&) const = default;
};
struct AuthRedirect {
    std::string idp;
    std::string client_id;
    bool operator==(const AuthRedirect&) const = default;
};
struct OidcAuthRequest {
    std::string client_id;
    std::string redirect_ref;
    bool operator==(const OidcAuthRequest&) const = default;
};
struct OidcAuthResponse {
    std::string token;
    std::string error;
    bool operator==(const OidcAuthResponse&) const = default;
};
struct TokenPresent {
    std::string token;
    bool operator==(const TokenPresent&) const = default;
};
struct LoginOk {
    std::string session_id;
    bool operator==(const LoginOk&) const = default;
};
struct Resume {
    std::string session_id;
    bool operator==(const Resume&) const = default;
};
struct Data {
    Bytes payload;
    bool operator==(const Data&) const = default;
};
struct AppError {
    std::string context;
    std::string code;
    bool operator==(const AppError&) const = default;
};
struct TokenValidateReq {
    std::string corr;
    std::string app_id;
    std::string token;
    Ipv4 ue_ip;
    bool operator==(const TokenValidateReq&) const = default;
};
struct TokenValidateResp {
    std::string corr;
    std::string subject;
    std::string error;
    bool operator==(const TokenValidateResp&) const = default;
};
struct IdentityQuery {
    std::string corr;
    std::string app_id;
    Ipv4 ue_ip;
    bool operator==(const IdentityQuery&) const = default;
};
struct IdentityAssert {
    std::string corr;
    std::string imsi;
    std::string error;
    bool operator==(const IdentityAssert&) const = default;
};
struct StateUpload {
    AppState state;
    bool operator==(const StateUpload&) const = default;
};
} // namespace app

using Message = std::variant<
    s1::InitialUEMessage, s1::AuthenticationRequest, s1::AuthenticationResponse, s1::InitialContextSetupRequest,
    s1::InitialContextSetupResponse, s1::UEContextRelease, s1::UEContextModification,
    s6a::AIR, s6a::AIA, s6a::ULR, s6a::ULA,
    fed::SubscriptionFetchReq, fed::SubscriptionFetchResp, fed::MobilityAdvertise, fed::WatchRequest,
    fed::UEArrivalNotice, fed::StateFetchReq, fed::StateFetchResp, fed::NetworkRegister, fed::ContextSync,
    app::LoginStart, app::AuthRedirect, app::OidcAuthRequest, app::OidcAuthResponse, app::TokenPresent,
    app::LoginOk, app::Resume, app::Data, app::AppError, app::TokenValidateReq, app::TokenValidateResp,
    app::IdentityQuery, app::IdentityAssert, app::StateUpload>;

std::uint8_t msg_type(const Message& msg);
std::string_view msg_name(const Message& msg);
// Name for a type code, or empty when the code is unassigned.
std::string_view msg_type_name(std::uint8_t code);

bool valid_imsi(std::string_view imsi);
// Network, app and platform ids: [A-Za-z0-9_-]{1,32}.
bool valid_id(std::string_view id);
// First five IMSI digits select the home network.
inline std::string plmn_of(std::string_view imsi) { return std::string(imsi.substr(0, 5)); }

} // namespace fs3a
