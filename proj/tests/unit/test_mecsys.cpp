#include <doctest.h>

#include "../oracle/hmac_oracle.hpp"
#include "../support/fixture.hpp"
#include "fs3a/harness/federation.hpp"
#include "fs3a/harness/scenarios.hpp"
#include "fs3a/mecsys/token.hpp"
#include "fs3a/wire/codec.hpp"

using namespace fs3a;
using namespace fs3a::mecsys;
using fs3a::testing::code_of;
using fs3a::testing::count;
using harness::Federation;
using harness::Toggles;

namespace {

const std::string kUe = "001010000000001";
const std::string kOther = "001010000000002";
const std::string kApp = "arapp";

harness::ScenarioConfig quiet_config() {
    auto cfg = harness::default_config();
    cfg.processing_ms.clear();
    return cfg;
}

SubscriptionRecord record_of(const harness::ScenarioConfig& cfg, const std::string& imsi) {
    for (const auto& s : cfg.subscribers)
        if (s.imsi == imsi) return SubscriptionRecord{s.imsi, plmn_of(s.imsi), s.mec_entitlement, s.profile};
    FAIL("no subscriber " << imsi);
    return {};
}

// Attach at `net` and log in to the app there; returns the session id.
std::string login_at(Federation& fed, const std::string& imsi, const std::string& net, bool resume = false) {
    fed.agent(imsi).set_plan(UePlan{harness::ep::app(net, kApp), kApp, true, {}, resume, 0.0});
    fed.attach(imsi, net);
    return fed.agent(imsi).session_id();
}

void move_to(Federation& fed, const std::string& imsi, const std::string& net, const std::string& token = {}) {
    auto& ue = fed.ue(imsi);
    fed.agent(imsi).reset_outcome();
    fed.agent(imsi).set_plan(UePlan{harness::ep::app(net, kApp), kApp, true, token, true, 0.0});
    ue.detach();
    ue.attach(net, harness::ep::enb(net));
    fed.run();
}

bool has_error(const UeAgent& a, const std::string& code) {
    for (const auto& e : a.errors())
        if (e.code == code) return true;
    return false;
}

std::vector<netsim::TraceRecord> since(Federation& fed, std::size_t from) {
    auto t = fed.net().trace();
    t.erase(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(std::min(from, t.size())));
    return t;
}

struct Probe : netsim::Node {
    std::vector<Message> got;
    void on_frame(const netsim::Delivery& d) override {
        got.push_back(std::get<wire::Decoded>(wire::decode_frame(d.frame)).msg);
    }
};

} // namespace

TEST_CASE("token encoding is canonical and signed over every field") {
    Bytes key(32, 0x11);
    std::array<std::uint8_t, 16> nonce{};
    nonce[0] = 1;
    auto t = issue_token("A", kUe, kApp, 1000.7, 300000, nonce, key);
    CHECK(t.issued_at_ms == 1000);
    CHECK(t.expires_at_ms - t.issued_at_ms == 300000);
    auto text = t.encode();
    auto back = AccessToken::decode(text);
    REQUIRE(back.has_value());
    CHECK(*back == t);
    CHECK(back->encode() == text);
    auto input = t.signing_input();
    auto mac = oracle::hmac_sha256(key, Bytes(input.begin(), input.end()));
    CHECK(std::equal(mac.begin(), mac.end(), t.signature.begin()));
    CHECK_FALSE(AccessToken::decode("v1.garbage").has_value());
}

TEST_CASE("s1 tap builds an active context and fans it out") {
    Federation fed(quiet_config(), Toggles{});
    fed.attach(kUe, "A");
    auto& ue = fed.ue(kUe);
    auto ctx = fed.network("A").mgr->context(kUe);
    REQUIRE(ctx.has_value());
    CHECK(ctx->active);
    CHECK(ctx->teid == ue.result()->teid);
    CHECK(ctx->ue_ip == ue.ip());
    CHECK(ctx->home_plmn == "00101");
    const auto* seen = fed.network("A").oidc->view().by_ip(ue.ip());
    REQUIRE(seen != nullptr);
    CHECK(seen->imsi == kUe);
}

TEST_CASE("setup request without a prior initial message is an orphan") {
    Federation fed(quiet_config(), Toggles{});
    fed.net().send_message("A/enb", "A/mgr", s1::InitialContextSetupRequest{99, 7, Ipv4::from_octets(10, 1, 0, 9)});
    fed.net().send_message("A/enb", "A/mgr", s1::UEContextRelease{55, "gone"});
    fed.run();
    CHECK(fed.network("A").mgr->orphans() == 1);
    CHECK(fed.network("A").mgr->contexts().empty());
}

TEST_CASE("token checks") {
    auto cfg = quiet_config();
    Federation fed(cfg, Toggles{});
    fed.attach(kUe, "A");
    fed.attach(kOther, "A");
    auto& oidc = *fed.network("A").oidc;
    const Ipv4 ip = fed.ue(kUe).ip();
    const Ipv4 other_ip = fed.ue(kOther).ip();
    const auto rec = record_of(cfg, kUe);

    auto token = oidc.authenticate(kApp, ip, rec);
    CHECK(token.subject == kUe);
    CHECK(token.audience == kApp);
    CHECK(token.issuer == "A");
    CHECK(token.expires_at_ms - token.issued_at_ms == cfg.token_lifetime_ms);
    const auto text = token.encode();
    CHECK(oidc.validate(kApp, text, ip) == kUe);

    SUBCASE("spoofed source address") {
        CHECK(code_of([&] { oidc.authenticate(kApp, Ipv4::from_octets(10, 9, 9, 9), rec); }) == Errc::UnknownSourceIP);
    }
    SUBCASE("pending and not entitled") {
        CHECK(code_of([&] { oidc.authenticate(kApp, ip, std::nullopt); }) == Errc::SubscriptionPending);
        auto denied = rec;
        denied.mec_entitlement = false;
        CHECK(code_of([&] { oidc.authenticate(kApp, ip, denied); }) == Errc::NotEntitled);
    }
    SUBCASE("tampered signature") {
        auto bad = text;
        bad.back() = bad.back() == '0' ? '1' : '0';
        CHECK(code_of([&] { oidc.validate(kApp, bad, ip); }) == Errc::BadSignature);
        auto forged = token;
        forged.subject = kOther;
        CHECK(code_of([&] { oidc.validate(kApp, forged.encode(), other_ip); }) == Errc::BadSignature);
    }
    SUBCASE("expired") {
        const auto& key = cfg.app().key;
        std::mt19937_64 rng(1);
        auto old = issue_token("A", kUe, kApp, 0.0, 1, random_nonce(rng), key);
        fed.net().defer(5.0, [] {});
        fed.run();
        CHECK(code_of([&] { oidc.validate(kApp, old.encode(), ip); }) == Errc::Expired);
    }
    SUBCASE("audience mismatch") {
        CHECK(code_of([&] { oidc.validate("otherapp", text, ip); }) == Errc::AudienceMismatch);
    }
    SUBCASE("replayed from another ue's address") {
        CHECK(code_of([&] { oidc.validate(kApp, text, other_ip); }) == Errc::SubjectIpMismatch);
    }
}

TEST_CASE("spoofed OIDC request on the wire gets UnknownSourceIP") {
    Federation fed(quiet_config(), Toggles{});
    Probe evil;
    fed.net().attach("ue/evil", &evil);
    fed.net().set_address("ue/evil", Ipv4::from_octets(10, 1, 0, 200));
    fed.net().topology().add_link("ue/evil", "A/oidc", 3, 100);
    fed.net().send_message("ue/evil", "A/oidc", app::OidcAuthRequest{kApp, "A/app.arapp"});
    fed.run();
    REQUIRE(evil.got.size() == 1);
    CHECK(std::get<app::OidcAuthResponse>(evil.got[0]).error == "UnknownSourceIP");
    CHECK(fed.network("A").oidc->issued().empty());
}

TEST_CASE("another ue presenting a stolen token is refused") {
    Federation fed(quiet_config(), Toggles{});
    login_at(fed, kUe, "A");
    const auto stolen = fed.agent(kUe).token();
    REQUIRE_FALSE(stolen.empty());
    fed.agent(kOther).set_plan(UePlan{"A/app.arapp", kApp, true, stolen, false, 0.0});
    fed.attach(kOther, "A");
    CHECK(has_error(fed.agent(kOther), "SubjectIpMismatch"));
    CHECK(fed.agent(kOther).session_id().empty());
}

TEST_CASE("token issued at home is accepted in the visited network") {
    Federation fed(quiet_config(), harness::toggles_for_code("MUT"));
    fed.network("A").apps.at(kApp)->update_state(login_at(fed, kUe, "A"), Bytes{7});
    const auto token = fed.agent(kUe).token();
    const auto before = fed.net().trace().size();
    move_to(fed, kUe, "B", token);
    CHECK(fed.agent(kUe).errors().empty());
    CHECK_FALSE(fed.agent(kUe).session_id().empty());
    CHECK(AccessToken::decode(token)->issuer == "A");
    auto t = since(fed, before);
    CHECK(count<app::OidcAuthRequest>(t) == 0);
    CHECK(count<app::OidcAuthResponse>(t) == 0);
    CHECK(fed.network("B").oidc->issued().empty());
}

TEST_CASE("oidc frames per scenario: none with reuse, one exchange without") {
    auto cfg = quiet_config();
    for (const char* code : {"MUA", "MPA", "CUA"}) {
        auto r = harness::run_auth_scenario(code, cfg);
        CHECK(count<app::OidcAuthRequest>(r.trace) == 1);
        CHECK(count<app::OidcAuthResponse>(r.trace) == 1);
    }
    for (const char* code : {"MUT", "MPT", "CPT"}) {
        auto r = harness::run_auth_scenario(code, cfg);
        CHECK(count<app::OidcAuthRequest>(r.trace) == 0);
        CHECK(count<app::OidcAuthResponse>(r.trace) == 0);
    }
}

TEST_CASE("reuse and full login yield the same session capabilities") {
    auto cfg = quiet_config();
    auto a = harness::run_auth_scenario("MUA", cfg);
    auto t = harness::run_auth_scenario("MUT", cfg);
    REQUIRE(a.outcome.session);
    REQUIRE(t.outcome.session);
    auto sa = *a.outcome.session, st = *t.outcome.session;
    sa.session_id = st.session_id = "";
    CHECK(sa == st);
}

TEST_CASE("ip rotation is tracked by the identity checks") {
    auto cfg = quiet_config();
    Federation fed(cfg, Toggles{});
    fed.attach(kUe, "A");
    auto& oidc = *fed.network("A").oidc;
    const Ipv4 old = fed.ue(kUe).ip();
    const auto rec = record_of(cfg, kUe);
    const auto token = oidc.authenticate(kApp, old, rec).encode();
    const Ipv4 fresh = fed.network("A").mme->rotate_ip(kUe);
    fed.run();
    CHECK(oidc.authenticate(kApp, fresh, rec).subject == kUe);
    CHECK(code_of([&] { oidc.authenticate(kApp, old, rec); }) == Errc::UnknownSourceIP);
    CHECK(oidc.validate(kApp, token, fresh) == kUe);
    CHECK(code_of([&] { oidc.validate(kApp, token, old); }) == Errc::SubjectIpMismatch);
}

TEST_CASE("datastore: coalescing, local imsi and provenance") {
    Federation fed(quiet_config(), Toggles{});
    fed.attach(kUe, "B");
    const auto before = fed.net().trace().size();
    fed.net().send_message("B/oidc", "B/ds", fed::SubscriptionFetchReq{{"B", "B", "t:1"}, kUe});
    fed.net().send_message("B/oidc", "B/ds", fed::SubscriptionFetchReq{{"B", "B", "t:2"}, kUe});
    fed.run();
    auto t = since(fed, before);
    CHECK(count<fed::SubscriptionFetchReq>(t, "B/ds", "B/proxy") == 1);
    CHECK(count<fed::SubscriptionFetchResp>(t, "B/ds", "B/oidc") == 2);
    auto& ds = *fed.network("B").ds;
    CHECK(ds.upstream_requests() == 1);
    REQUIRE(ds.entry(kUe).has_value());
    CHECK(ds.entry(kUe)->source == SubscriberEntry::Source::HomeMecViaProxy);
    CHECK(ds.entry(kUe)->record.mec_entitlement);

    const auto mark = fed.net().trace().size();
    fed.net().send_message("A/oidc", "A/ds", fed::SubscriptionFetchReq{{"A", "A", "t:3"}, kOther});
    fed.run();
    for (const auto& r : since(fed, mark)) {
        CHECK(r.to.find("proxy") == std::string::npos);
        CHECK(r.from.find("proxy") == std::string::npos);
    }
    REQUIRE(fed.network("A").ds->entry(kOther).has_value());
    CHECK(fed.network("A").ds->entry(kOther)->source == SubscriberEntry::Source::LocalHss);
}

TEST_CASE("datastore: unknown subscriber and unreachable home") {
    Federation fed(quiet_config(), Toggles{});
    Probe asker;
    fed.net().attach("t/asker", &asker);
    fed.net().topology().add_link("t/asker", "B/ds", 1, 100);
    fed.net().send_message("t/asker", "B/ds", fed::SubscriptionFetchReq{{"B", "B", "t:1"}, "001010000000077"});
    fed.net().send_message("t/asker", "B/ds", fed::SubscriptionFetchReq{{"B", "B", "t:2"}, "009990000000001"});
    fed.run();
    REQUIRE(asker.got.size() == 2);
    std::set<std::string> errors;
    for (const auto& m : asker.got) errors.insert(std::get<fed::SubscriptionFetchResp>(m).error);
    CHECK(errors == std::set<std::string>{"UnknownSubscriber", "HomeUnreachable"});
}

TEST_CASE("subscription prefetch starts at context setup") {
    for (const char* code : {"MPA", "MPT"}) {
        auto r = harness::run_auth_scenario(code, harness::default_config());
        REQUIRE(r.stages.contains("M1"));
        REQUIRE(r.instants.contains("entitlement_query"));
        CHECK(r.stages["M1"].end_ms <= r.instants["entitlement_query"]);
        CHECK(r.stages["M1"].start_ms <= r.instants["context_setup"] + 1.0);
        CHECK(r.stages["M1"].start_ms < r.stages["U1"].end_ms);
    }
    auto u = harness::run_auth_scenario("MUA", harness::default_config());
    CHECK(u.stages["M1"].start_ms >= u.instants["entitlement_query"]);
    CHECK(u.stages["M1"].start_ms >= u.stages["U2"].start_ms);
    CHECK(u.stages["M1"].end_ms <= u.stages["U2"].end_ms);
}

TEST_CASE("advertise installs one watch per neighbour through the proxy") {
    auto cfg = quiet_config();
    cfg.watch_ttl_ms = 10'000;
    Federation fed(cfg, Toggles{});
    const auto before = fed.net().trace().size();
    login_at(fed, kUe, "A");
    auto t = since(fed, before);
    CHECK(count<fed::MobilityAdvertise>(t, "A/proxy", "B/proxy") == 1);
    CHECK(count<fed::MobilityAdvertise>(t, "B/proxy", "A/proxy") == 0);
    auto& ams = *fed.network("B").ams;
    REQUIRE(ams.watches().size() == 1);
    CHECK(ams.watches()[0].source_network == "A");
    CHECK(fed.network("B").mgr->watchers(kUe).contains("B/ams"));
    const double first = ams.watches()[0].created_at_ms;

    // Log in again: the watch is replaced, not duplicated.
    fed.ue(kUe).send("A/app.arapp", app::TokenPresent{fed.agent(kUe).token()});
    fed.run();
    REQUIRE(ams.watches().size() == 1);
    CHECK(ams.watches()[0].created_at_ms > first);

    fed.net().defer(cfg.watch_ttl_ms + 1.0, [] {});
    fed.run();
    CHECK(ams.watches().empty());
}

TEST_CASE("resume without a watch is StaleWatch") {
    Federation fed(quiet_config(), Toggles{});
    fed.agent(kUe).set_plan(UePlan{"A/app.arapp", kApp, false, {}, false, 0.0});
    fed.attach(kUe, "A");
    move_to(fed, kUe, "B");
    CHECK(has_error(fed.agent(kUe), "StaleWatch"));
    CHECK_FALSE(fed.agent(kUe).data().has_value());
}

TEST_CASE("state evicted at the source is SourceStateGone") {
    Federation fed(quiet_config(), Toggles{});
    const auto sid = login_at(fed, kUe, "A");
    fed.network("A").apps.at(kApp)->update_state(sid, Bytes{1, 2, 3});
    fed.network("A").apps.at(kApp)->evict(kUe);
    move_to(fed, kUe, "B");
    CHECK(has_error(fed.agent(kUe), "SourceStateGone"));
}

TEST_CASE("handover delivers the highest version byte for byte") {
    for (bool prefetch : {false, true}) {
        CAPTURE(prefetch);
        Toggles t;
        t.state_prefetch = prefetch;
        Federation fed(quiet_config(), t);
        const auto sid = login_at(fed, kUe, "A");
        auto& home = *fed.network("A").apps.at(kApp);
        CHECK(home.update_state(sid, Bytes{9, 9}) == 1);
        const Bytes latest{0, 1, 2, 0xff, 0x0a, 0x3d};
        CHECK(home.update_state(sid, latest) == 2);
        move_to(fed, kUe, "B");
        REQUIRE(fed.agent(kUe).errors().empty());
        REQUIRE(fed.agent(kUe).data().has_value());
        auto st = fed.network("B").apps.at(kApp)->state(kUe);
        REQUIRE(st.has_value());
        CHECK(st->version == 2);
        CHECK(st->blob == latest);
        CHECK(fed.network("B").ams->remote_fetches() == 1);
    }
}

TEST_CASE("empty state is legal") {
    Federation fed(quiet_config(), Toggles{});
    const auto sid = login_at(fed, kUe, "A");
    CHECK(fed.network("A").apps.at(kApp)->update_state(sid, Bytes{}) == 1);
    move_to(fed, kUe, "B");
    auto st = fed.network("B").apps.at(kApp)->state(kUe);
    REQUIRE(st.has_value());
    CHECK(st->version == 1);
    CHECK(st->blob.empty());
}

TEST_CASE("session freezes on detach") {
    Federation fed(quiet_config(), Toggles{});
    const auto sid = login_at(fed, kUe, "A");
    auto& app = *fed.network("A").apps.at(kApp);
    CHECK(app.update_state(sid, Bytes{1}) == 1);
    fed.ue(kUe).detach();
    fed.run();
    CHECK(app.session(sid)->frozen);
    CHECK(code_of([&] { app.update_state(sid, Bytes{2}); }) == Errc::NoSession);
    CHECK(code_of([&] { app.update_state("nope", Bytes{2}); }) == Errc::NoSession);
}

TEST_CASE("cloud state path pulls the latest version through the cloud store") {
    Toggles t = harness::interruption_toggles(1);
    Federation fed(quiet_config(), t);
    const auto sid = login_at(fed, kUe, "A");
    auto& home = *fed.network("A").apps.at(kApp);
    home.update_state(sid, Bytes{1});
    home.update_state(sid, Bytes{2, 2});
    const auto before = fed.net().trace().size();
    move_to(fed, kUe, "B");
    REQUIRE(fed.agent(kUe).errors().empty());
    auto tr = since(fed, before);
    CHECK(count<fed::StateFetchReq>(tr, "cloud/store", "A/app.arapp") == 1);
    CHECK(count<fed::StateFetchResp>(tr, "cloud/store", "B/app.arapp") == 1);
    CHECK(count<fed::StateFetchReq>(tr, "B/ams") == 0);
    CHECK(fed.cloud_store().stored(kUe, kApp)->version == 2);
    CHECK(fed.network("B").apps.at(kApp)->state(kUe)->blob == Bytes{2, 2});
}

TEST_CASE("empty neighbour list is only a warning") {
    netsim::Scheduler s;
    Amc amc(s, "A/amc", AmcConfig{"A", "A/proxy", "A/ams", {}});
    s.topology().add_link("A/ams", "A/amc", 1, 100);
    s.send_message("A/ams", "A/amc", fed::MobilityAdvertise{{"A", "A", "x:1"}, kUe, kApp, "A", "A"});
    s.run_until_idle();
    CHECK(amc.advertised() == 0);
    REQUIRE(amc.audit().size() == 1);
    CHECK(amc.audit()[0].what.find("NoNeighbors") != std::string::npos);
}
