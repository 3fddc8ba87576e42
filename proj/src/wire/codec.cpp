#include "fs3a/wire/codec.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "fs3a/error.hpp"
#include "fs3a/wire/fields.hpp"

namespace fs3a {

namespace {

struct TypeInfo {
    std::uint8_t code;
    std::string_view name;
};

// Indexed by Message alternative. Codes are grouped by interface:
// 0x1x S1, 0x2x S6a, 0x3x federation, 0x4x application.
constexpr std::array<TypeInfo, std::variant_size_v<Message>> kTypes{{
    {0x10, "InitialUEMessage"},
    {0x11, "AuthenticationRequest"},
    {0x12, "AuthenticationResponse"},
    {0x13, "InitialContextSetupRequest"},
    {0x14, "InitialContextSetupResponse"},
    {0x15, "UEContextRelease"},
    {0x16, "UEContextModification"},
    {0x20, "AIR"},
    {0x21, "AIA"},
    {0x22, "ULR"},
    {0x23, "ULA"},
    {0x30, "SubscriptionFetchReq"},
    {0x31, "SubscriptionFetchResp"},
    {0x32, "MobilityAdvertise"},
    {0x33, "WatchRequest"},
    {0x34, "UEArrivalNotice"},
    {0x35, "StateFetchReq"},
    {0x36, "StateFetchResp"},
    {0x37, "NetworkRegister"},
    {0x38, "ContextSync"},
    {0x40, "LoginStart"},
    {0x41, "AuthRedirect"},
    {0x42, "OidcAuthRequest"},
    {0x43, "OidcAuthResponse"},
    {0x44, "TokenPresent"},
    {0x45, "LoginOk"},
    {0x46, "Resume"},
    {0x47, "Data"},
    {0x48, "AppError"},
    {0x49, "TokenValidateReq"},
    {0x4a, "TokenValidateResp"},
    {0x4b, "IdentityQuery"},
    {0x4c, "IdentityAssert"},
    {0x4d, "StateUpload"},
}};

} // namespace

std::uint8_t msg_type(const Message& msg) { return kTypes[msg.index()].code; }
std::string_view msg_name(const Message& msg) { return kTypes[msg.index()].name; }
std::string_view msg_type_name(std::uint8_t code) {
    for (const auto& t : kTypes) {
        if (t.code == code) return t.name;
    }
    return {};
}

bool valid_imsi(std::string_view imsi) {
    return imsi.size() == 15 && std::all_of(imsi.begin(), imsi.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool valid_id(std::string_view id) {
    if (id.empty() || id.size() > 32) return false;
    return std::all_of(id.begin(), id.end(), [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
    });
}

namespace wire {

namespace {

using FE = FieldError;

void require(bool ok, const char* what) {
    if (!ok) throw FE{what};
}

bool valid_plmn(std::string_view p) {
    return (p.size() == 5 || p.size() == 6) &&
           std::all_of(p.begin(), p.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool valid_error(std::string_view e) { return e.empty() || errc_from_name(e).has_value(); }

bool valid_profile_key(std::string_view k) {
    return !k.empty() && k.find('.') == std::string_view::npos && valid_key(k);
}

// Optional strings are omitted when empty; a present-but-empty value is not
// canonical.
void put_opt(FieldWriter& w, const std::string& key, const std::string& v) {
    if (!v.empty()) w.str(key, v);
}
std::string get_opt(FieldReader& r, const std::string& key) {
    if (!r.has(key)) return {};
    auto v = r.str(key);
    require(!v.empty(), "empty optional field");
    return v;
}

void put_enb_id(FieldWriter& w, std::uint32_t id) {
    if (id != 0) w.u32("enb_ue_id", id);
}
std::uint32_t get_enb_id(FieldReader& r) {
    if (!r.has("enb_ue_id")) return 0;
    auto id = r.u32("enb_ue_id");
    require(id != 0, "explicit zero enb_ue_id");
    return id;
}

// --- nested records -------------------------------------------------------

void check(const SubscriptionRecord& s) {
    require(valid_imsi(s.imsi), "subscription imsi must be 15 digits");
    require(valid_plmn(s.home_plmn), "home_plmn must be 5-6 digits");
    for (const auto& [k, v] : s.profile) require(valid_profile_key(k), "bad profile key");
}
void put(FieldWriter& w, const std::string& p, const SubscriptionRecord& s) {
    w.str(p + ".imsi", s.imsi);
    w.str(p + ".home_plmn", s.home_plmn);
    w.flag(p + ".mec_entitlement", s.mec_entitlement);
    for (const auto& [k, v] : s.profile) w.str(p + ".profile." + k, v);
}
SubscriptionRecord get_record(FieldReader& r, const std::string& p) {
    SubscriptionRecord s;
    s.imsi = r.str(p + ".imsi");
    s.home_plmn = r.str(p + ".home_plmn");
    s.mec_entitlement = r.flag(p + ".mec_entitlement");
    for (auto& [k, v] : r.take_prefixed(p + ".profile")) s.profile.emplace(k, v);
    check(s);
    return s;
}

void check(const AppState& s) {
    require(valid_imsi(s.user_id), "state user_id must be an imsi");
    require(valid_id(s.app_id), "bad state app_id");
}
void put(FieldWriter& w, const std::string& p, const AppState& s) {
    w.str(p + ".user_id", s.user_id);
    w.str(p + ".app_id", s.app_id);
    w.u64(p + ".version", s.version);
    w.bytes(p + ".blob", s.blob);
    w.u64(p + ".updated_at_ms", s.updated_at_ms);
}
AppState get_state(FieldReader& r, const std::string& p) {
    AppState s;
    s.user_id = r.str(p + ".user_id");
    s.app_id = r.str(p + ".app_id");
    s.version = r.u64(p + ".version");
    s.blob = r.bytes(p + ".blob");
    s.updated_at_ms = r.u64(p + ".updated_at_ms");
    check(s);
    return s;
}

void check(const fed::Header& h) {
    require(valid_id(h.src_net) && valid_id(h.dst_net), "bad network header");
    require(!h.corr.empty(), "missing corr");
}
void put(FieldWriter& w, const fed::Header& h) {
    w.str("hdr.corr", h.corr);
    w.str("hdr.dst_net", h.dst_net);
    w.str("hdr.src_net", h.src_net);
}
fed::Header get_header(FieldReader& r) {
    fed::Header h;
    h.corr = r.str("hdr.corr");
    h.dst_net = r.str("hdr.dst_net");
    h.src_net = r.str("hdr.src_net");
    check(h);
    return h;
}

// --- per-message layout ---------------------------------------------------
// Each message has check (invariants), put (to fields) and get (from fields;
// get re-runs check so decoded messages always satisfy invariants).

void check(const s1::InitialUEMessage& m) { require(valid_imsi(m.imsi), "imsi must be 15 digits"); }
void put(FieldWriter& w, const s1::InitialUEMessage& m) {
    put_enb_id(w, m.enb_ue_id);
    w.str("imsi", m.imsi);
}
void get(FieldReader& r, s1::InitialUEMessage& m) {
    m.enb_ue_id = get_enb_id(r);
    m.imsi = r.str("imsi");
}

void check(const s1::AuthenticationRequest&) {}
void put(FieldWriter& w, const s1::AuthenticationRequest& m) {
    put_enb_id(w, m.enb_ue_id);
    w.hex("rand", m.rand);
    w.hex("autn", m.autn);
}
void get(FieldReader& r, s1::AuthenticationRequest& m) {
    m.enb_ue_id = get_enb_id(r);
    m.rand = r.hex<16>("rand");
    m.autn = r.hex<16>("autn");
}

void check(const s1::AuthenticationResponse&) {}
void put(FieldWriter& w, const s1::AuthenticationResponse& m) {
    put_enb_id(w, m.enb_ue_id);
    w.hex("res", m.res);
}
void get(FieldReader& r, s1::AuthenticationResponse& m) {
    m.enb_ue_id = get_enb_id(r);
    m.res = r.hex<8>("res");
}

void check(const s1::InitialContextSetupRequest& m) { require(m.teid != 0, "teid must be nonzero"); }
void put(FieldWriter& w, const s1::InitialContextSetupRequest& m) {
    put_enb_id(w, m.enb_ue_id);
    w.u32("teid", m.teid);
    w.ip("ue_ip", m.ue_ip);
}
void get(FieldReader& r, s1::InitialContextSetupRequest& m) {
    m.enb_ue_id = get_enb_id(r);
    m.teid = r.u32("teid");
    m.ue_ip = r.ip("ue_ip");
}

void check(const s1::InitialContextSetupResponse&) {}
void put(FieldWriter& w, const s1::InitialContextSetupResponse& m) { put_enb_id(w, m.enb_ue_id); }
void get(FieldReader& r, s1::InitialContextSetupResponse& m) { m.enb_ue_id = get_enb_id(r); }

void check(const s1::UEContextRelease&) {}
void put(FieldWriter& w, const s1::UEContextRelease& m) {
    put_enb_id(w, m.enb_ue_id);
    w.str("reason", m.reason);
}
void get(FieldReader& r, s1::UEContextRelease& m) {
    m.enb_ue_id = get_enb_id(r);
    m.reason = r.str("reason");
}

void check(const s1::UEContextModification& m) { require(m.teid != 0, "teid must be nonzero"); }
void put(FieldWriter& w, const s1::UEContextModification& m) {
    put_enb_id(w, m.enb_ue_id);
    w.u32("teid", m.teid);
    w.ip("ue_ip", m.ue_ip);
}
void get(FieldReader& r, s1::UEContextModification& m) {
    m.enb_ue_id = get_enb_id(r);
    m.teid = r.u32("teid");
    m.ue_ip = r.ip("ue_ip");
}

void check(const s6a::AIR& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_imsi(m.imsi), "imsi must be 15 digits");
    require(valid_plmn(m.visited_plmn), "visited_plmn must be 5-6 digits");
}
void put(FieldWriter& w, const s6a::AIR& m) {
    w.str("corr", m.corr);
    w.str("imsi", m.imsi);
    w.str("visited_plmn", m.visited_plmn);
}
void get(FieldReader& r, s6a::AIR& m) {
    m.corr = r.str("corr");
    m.imsi = r.str("imsi");
    m.visited_plmn = r.str("visited_plmn");
}

void check(const s6a::AIA& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_error(m.error), "unknown error code");
    require(m.error.empty() ? !m.vectors.empty() : m.vectors.empty(),
            "AIA carries either >=1 vector or an error");
}
void put(FieldWriter& w, const s6a::AIA& m) {
    w.str("corr", m.corr);
    put_opt(w, "error", m.error);
    for (std::size_t i = 0; i < m.vectors.size(); ++i) {
        auto p = "vector." + std::to_string(i);
        w.hex(p + ".autn", m.vectors[i].autn);
        w.hex(p + ".rand", m.vectors[i].rand);
        w.hex(p + ".xres", m.vectors[i].xres);
    }
}
void get(FieldReader& r, s6a::AIA& m) {
    m.corr = r.str("corr");
    m.error = get_opt(r, "error");
    for (std::size_t i = 0;; ++i) {
        auto p = "vector." + std::to_string(i);
        if (!r.has(p + ".rand")) break;
        AuthVector v;
        v.autn = r.hex<16>(p + ".autn");
        v.rand = r.hex<16>(p + ".rand");
        v.xres = r.hex<8>(p + ".xres");
        m.vectors.push_back(v);
    }
}

void check(const s6a::ULR& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_imsi(m.imsi), "imsi must be 15 digits");
    require(!m.mme_id.empty(), "missing mme_id");
}
void put(FieldWriter& w, const s6a::ULR& m) {
    w.str("corr", m.corr);
    w.str("imsi", m.imsi);
    w.str("mme_id", m.mme_id);
}
void get(FieldReader& r, s6a::ULR& m) {
    m.corr = r.str("corr");
    m.imsi = r.str("imsi");
    m.mme_id = r.str("mme_id");
}

void check(const s6a::ULA& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_error(m.error), "unknown error code");
    require(m.subscription.has_value() != !m.error.empty(), "ULA carries exactly one record or an error");
    if (m.subscription) check(*m.subscription);
}
void put(FieldWriter& w, const s6a::ULA& m) {
    w.str("corr", m.corr);
    put_opt(w, "error", m.error);
    if (m.subscription) put(w, "sub", *m.subscription);
}
void get(FieldReader& r, s6a::ULA& m) {
    m.corr = r.str("corr");
    m.error = get_opt(r, "error");
    if (r.has("sub.imsi")) m.subscription = get_record(r, "sub");
}

void check(const fed::SubscriptionFetchReq& m) {
    check(m.hdr);
    require(valid_imsi(m.imsi), "imsi must be 15 digits");
}
void put(FieldWriter& w, const fed::SubscriptionFetchReq& m) {
    put(w, m.hdr);
    w.str("imsi", m.imsi);
}
void get(FieldReader& r, fed::SubscriptionFetchReq& m) {
    m.hdr = get_header(r);
    m.imsi = r.str("imsi");
}

void check(const fed::SubscriptionFetchResp& m) {
    check(m.hdr);
    require(valid_error(m.error), "unknown error code");
    require(m.record.has_value() != !m.error.empty(), "response carries exactly one record or an error");
    if (m.record) check(*m.record);
}
void put(FieldWriter& w, const fed::SubscriptionFetchResp& m) {
    put(w, m.hdr);
    put_opt(w, "error", m.error);
    if (m.record) put(w, "record", *m.record);
}
void get(FieldReader& r, fed::SubscriptionFetchResp& m) {
    m.hdr = get_header(r);
    m.error = get_opt(r, "error");
    if (r.has("record.imsi")) m.record = get_record(r, "record");
}

void check(const fed::MobilityAdvertise& m) {
    check(m.hdr);
    require(valid_imsi(m.user_id), "user_id must be an imsi");
    require(valid_id(m.app_id) && valid_id(m.source_network), "bad ids");
    require(!m.source_platform.empty(), "missing source_platform");
}
void put(FieldWriter& w, const fed::MobilityAdvertise& m) {
    put(w, m.hdr);
    w.str("app_id", m.app_id);
    w.str("source_network", m.source_network);
    w.str("source_platform", m.source_platform);
    w.str("user_id", m.user_id);
}
void get(FieldReader& r, fed::MobilityAdvertise& m) {
    m.hdr = get_header(r);
    m.app_id = r.str("app_id");
    m.source_network = r.str("source_network");
    m.source_platform = r.str("source_platform");
    m.user_id = r.str("user_id");
}

void check(const fed::WatchRequest& m) {
    check(m.hdr);
    require(valid_imsi(m.user_id), "user_id must be an imsi");
    require(!m.requester.empty(), "missing requester");
}
void put(FieldWriter& w, const fed::WatchRequest& m) {
    put(w, m.hdr);
    w.str("requester", m.requester);
    w.str("user_id", m.user_id);
}
void get(FieldReader& r, fed::WatchRequest& m) {
    m.hdr = get_header(r);
    m.requester = r.str("requester");
    m.user_id = r.str("user_id");
}

void check(const fed::UEArrivalNotice& m) {
    check(m.hdr);
    require(valid_imsi(m.user_id), "user_id must be an imsi");
    require(!m.platform.empty(), "missing platform");
}
void put(FieldWriter& w, const fed::UEArrivalNotice& m) {
    put(w, m.hdr);
    w.str("platform", m.platform);
    w.str("user_id", m.user_id);
}
void get(FieldReader& r, fed::UEArrivalNotice& m) {
    m.hdr = get_header(r);
    m.platform = r.str("platform");
    m.user_id = r.str("user_id");
}

void check(const fed::StateFetchReq& m) {
    check(m.hdr);
    require(valid_imsi(m.user_id), "user_id must be an imsi");
    require(valid_id(m.app_id), "bad app_id");
}
void put(FieldWriter& w, const fed::StateFetchReq& m) {
    put(w, m.hdr);
    w.str("app_id", m.app_id);
    w.str("user_id", m.user_id);
}
void get(FieldReader& r, fed::StateFetchReq& m) {
    m.hdr = get_header(r);
    m.app_id = r.str("app_id");
    m.user_id = r.str("user_id");
}

void check(const fed::StateFetchResp& m) {
    check(m.hdr);
    require(valid_error(m.error), "unknown error code");
    require(m.state.has_value() != !m.error.empty(), "response carries exactly one state or an error");
    if (m.state) check(*m.state);
}
void put(FieldWriter& w, const fed::StateFetchResp& m) {
    put(w, m.hdr);
    put_opt(w, "error", m.error);
    if (m.state) put(w, "state", *m.state);
}
void get(FieldReader& r, fed::StateFetchResp& m) {
    m.hdr = get_header(r);
    m.error = get_opt(r, "error");
    if (r.has("state.user_id")) m.state = get_state(r, "state");
}

void check(const fed::NetworkRegister& m) {
    check(m.hdr);
    require(valid_id(m.network_id), "bad network_id");
    require(valid_plmn(m.plmn_prefix), "plmn_prefix must be 5-6 digits");
    require(!m.address.empty(), "missing address");
}
void put(FieldWriter& w, const fed::NetworkRegister& m) {
    put(w, m.hdr);
    w.str("address", m.address);
    w.str("network_id", m.network_id);
    w.str("plmn_prefix", m.plmn_prefix);
}
void get(FieldReader& r, fed::NetworkRegister& m) {
    m.hdr = get_header(r);
    m.address = r.str("address");
    m.network_id = r.str("network_id");
    m.plmn_prefix = r.str("plmn_prefix");
}

void check(const fed::ContextSync& m) {
    check(m.hdr);
    require(valid_imsi(m.imsi), "imsi must be 15 digits");
    require(valid_plmn(m.home_plmn), "home_plmn must be 5-6 digits");
    require(m.teid != 0, "teid must be nonzero");
}
void put(FieldWriter& w, const fed::ContextSync& m) {
    put(w, m.hdr);
    w.flag("active", m.active);
    w.str("home_plmn", m.home_plmn);
    w.str("imsi", m.imsi);
    w.u32("teid", m.teid);
    w.ip("ue_ip", m.ue_ip);
}
void get(FieldReader& r, fed::ContextSync& m) {
    m.hdr = get_header(r);
    m.active = r.flag("active");
    m.home_plmn = r.str("home_plmn");
    m.imsi = r.str("imsi");
    m.teid = r.u32("teid");
    m.ue_ip = r.ip("ue_ip");
}

void check(const app::LoginStart& m) { require(valid_id(m.app_id), "bad app_id"); }
void put(FieldWriter& w, const app::LoginStart& m) { w.str("app_id", m.app_id); }
void get(FieldReader& r, app::LoginStart& m) { m.app_id = r.str("app_id"); }

void check(const app::AuthRedirect& m) {
    require(!m.idp.empty(), "missing idp");
    require(valid_id(m.client_id), "bad client_id");
}
void put(FieldWriter& w, const app::AuthRedirect& m) {
    w.str("client_id", m.client_id);
    w.str("idp", m.idp);
}
void get(FieldReader& r, app::AuthRedirect& m) {
    m.client_id = r.str("client_id");
    m.idp = r.str("idp");
}

void check(const app::OidcAuthRequest& m) { require(valid_id(m.client_id), "bad client_id"); }
void put(FieldWriter& w, const app::OidcAuthRequest& m) {
    w.str("client_id", m.client_id);
    w.str("redirect_ref", m.redirect_ref);
}
void get(FieldReader& r, app::OidcAuthRequest& m) {
    m.client_id = r.str("client_id");
    m.redirect_ref = r.str("redirect_ref");
}

void check(const app::OidcAuthResponse& m) {
    require(valid_error(m.error), "unknown error code");
    require(m.token.empty() != m.error.empty(), "carries exactly one token or an error");
}
void put(FieldWriter& w, const app::OidcAuthResponse& m) {
    put_opt(w, "error", m.error);
    put_opt(w, "token", m.token);
}
void get(FieldReader& r, app::OidcAuthResponse& m) {
    m.error = get_opt(r, "error");
    m.token = get_opt(r, "token");
}

void check(const app::TokenPresent& m) { require(!m.token.empty(), "missing token"); }
void put(FieldWriter& w, const app::TokenPresent& m) { w.str("token", m.token); }
void get(FieldReader& r, app::TokenPresent& m) { m.token = r.str("token"); }

void check(const app::LoginOk& m) { require(!m.session_id.empty(), "missing session_id"); }
void put(FieldWriter& w, const app::LoginOk& m) { w.str("session_id", m.session_id); }
void get(FieldReader& r, app::LoginOk& m) { m.session_id = r.str("session_id"); }

void check(const app::Resume& m) { require(!m.session_id.empty(), "missing session_id"); }
void put(FieldWriter& w, const app::Resume& m) { w.str("session_id", m.session_id); }
void get(FieldReader& r, app::Resume& m) { m.session_id = r.str("session_id"); }

void check(const app::Data&) {}
void put(FieldWriter& w, const app::Data& m) { w.bytes("payload", m.payload); }
void get(FieldReader& r, app::Data& m) { m.payload = r.bytes("payload"); }

void check(const app::AppError& m) {
    require(!m.context.empty(), "missing context");
    require(!m.code.empty() && valid_error(m.code), "unknown error code");
}
void put(FieldWriter& w, const app::AppError& m) {
    w.str("code", m.code);
    w.str("context", m.context);
}
void get(FieldReader& r, app::AppError& m) {
    m.code = r.str("code");
    m.context = r.str("context");
}

void check(const app::TokenValidateReq& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_id(m.app_id), "bad app_id");
    require(!m.token.empty(), "missing token");
}
void put(FieldWriter& w, const app::TokenValidateReq& m) {
    w.str("app_id", m.app_id);
    w.str("corr", m.corr);
    w.str("token", m.token);
    w.ip("ue_ip", m.ue_ip);
}
void get(FieldReader& r, app::TokenValidateReq& m) {
    m.app_id = r.str("app_id");
    m.corr = r.str("corr");
    m.token = r.str("token");
    m.ue_ip = r.ip("ue_ip");
}

void check(const app::TokenValidateResp& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_error(m.error), "unknown error code");
    require(m.subject.empty() != m.error.empty(), "carries exactly one subject or an error");
    if (!m.subject.empty()) require(valid_imsi(m.subject), "subject must be an imsi");
}
void put(FieldWriter& w, const app::TokenValidateResp& m) {
    w.str("corr", m.corr);
    put_opt(w, "error", m.error);
    put_opt(w, "subject", m.subject);
}
void get(FieldReader& r, app::TokenValidateResp& m) {
    m.corr = r.str("corr");
    m.error = get_opt(r, "error");
    m.subject = get_opt(r, "subject");
}

void check(const app::IdentityQuery& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_id(m.app_id), "bad app_id");
}
void put(FieldWriter& w, const app::IdentityQuery& m) {
    w.str("app_id", m.app_id);
    w.str("corr", m.corr);
    w.ip("ue_ip", m.ue_ip);
}
void get(FieldReader& r, app::IdentityQuery& m) {
    m.app_id = r.str("app_id");
    m.corr = r.str("corr");
    m.ue_ip = r.ip("ue_ip");
}

void check(const app::IdentityAssert& m) {
    require(!m.corr.empty(), "missing corr");
    require(valid_error(m.error), "unknown error code");
    require(m.imsi.empty() != m.error.empty(), "carries exactly one imsi or an error");
    if (!m.imsi.empty()) require(valid_imsi(m.imsi), "imsi must be 15 digits");
}
void put(FieldWriter& w, const app::IdentityAssert& m) {
    w.str("corr", m.corr);
    put_opt(w, "error", m.error);
    put_opt(w, "imsi", m.imsi);
}
void get(FieldReader& r, app::IdentityAssert& m) {
    m.corr = r.str("corr");
    m.error = get_opt(r, "error");
    m.imsi = get_opt(r, "imsi");
}

void check(const app::StateUpload& m) { check(m.state); }
void put(FieldWriter& w, const app::StateUpload& m) { put(w, "state", m.state); }
void get(FieldReader& r, app::StateUpload& m) { m.state = get_state(r, "state"); }

template <std::size_t I>
Message decode_alternative(FieldReader& r) {
    std::variant_alternative_t<I, Message> m;
    get(r, m);
    check(m);
    r.finish();
    return Message{std::in_place_index<I>, std::move(m)};
}

template <std::size_t... Is>
constexpr auto make_decoders(std::index_sequence<Is...>) {
    return std::array<Message (*)(FieldReader&), sizeof...(Is)>{&decode_alternative<Is>...};
}

constexpr auto kDecoders = make_decoders(std::make_index_sequence<std::variant_size_v<Message>>{});

std::uint32_t read_be32(std::span<const std::uint8_t> d) {
    return (std::uint32_t{d[0]} << 24) | (std::uint32_t{d[1]} << 16) | (std::uint32_t{d[2]} << 8) | d[3];
}

} // namespace

std::string check_invariants(const Message& msg) {
    try {
        std::visit([](const auto& m) { check(m); }, msg);
    } catch (const FieldError& e) {
        return e.what;
    }
    return {};
}

Bytes encode_frame(const Message& msg) {
    FieldWriter w;
    try {
        std::visit(
            [&](const auto& m) {
                check(m);
                put(w, m);
            },
            msg);
    } catch (const FieldError& e) {
        throw Error(Errc::InvariantViolation, std::string(msg_name(msg)) + ": " + e.what);
    }
    for (const auto& [key, value] : w.fields()) {
        if (!valid_utf8(value)) throw Error(Errc::InvariantViolation, std::string(msg_name(msg)) + ": " + key + " is not UTF-8");
    }
    std::string body = encode_body(w.fields());
    std::uint64_t length = body.size() + 1;
    if (length > kMaxFrameLength) throw Error(Errc::InvariantViolation, "frame exceeds 16 MiB cap");
    Bytes out;
    out.reserve(kHeaderSize + body.size());
    out.push_back(static_cast<std::uint8_t>(length >> 24));
    out.push_back(static_cast<std::uint8_t>(length >> 16));
    out.push_back(static_cast<std::uint8_t>(length >> 8));
    out.push_back(static_cast<std::uint8_t>(length));
    out.push_back(msg_type(msg));
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

std::optional<std::size_t> peek_frame_size(std::span<const std::uint8_t> data) {
    if (data.size() < 4) return std::nullopt;
    return std::size_t{4} + read_be32(data);
}

DecodeResult decode_frame(std::span<const std::uint8_t> data) {
    if (data.size() < kHeaderSize) {
        // With 4 length bytes we can already reject an impossible length.
        if (data.size() >= 4) {
            auto len = read_be32(data);
            if (len == 0 || len > kMaxFrameLength) return Malformed{"bad length field"};
        }
        return NeedMoreBytes{kHeaderSize - data.size()};
    }
    std::uint32_t length = read_be32(data);
    if (length == 0 || length > kMaxFrameLength) return Malformed{"bad length field"};
    std::uint8_t code = data[4];
    std::size_t index = kTypes.size();
    for (std::size_t i = 0; i < kTypes.size(); ++i) {
        if (kTypes[i].code == code) {
            index = i;
            break;
        }
    }
    if (index == kTypes.size()) return Malformed{"unknown msg_type"};
    std::size_t total = std::size_t{4} + length;
    if (data.size() < total) return NeedMoreBytes{total - data.size()};
    std::string_view body(reinterpret_cast<const char*>(data.data() + kHeaderSize), length - 1);
    auto fields = decode_body(body);
    if (!fields) return Malformed{"non-canonical body"};
    try {
        FieldReader r(*fields);
        return Decoded{kDecoders[index](r), total};
    } catch (const FieldError& e) {
        return Malformed{e.what};
    }
}

} // namespace wire
} // namespace fs3a
