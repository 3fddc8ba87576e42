#pragma once

#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fs3a/cellular/entities.hpp"
#include "fs3a/error.hpp"
#include "fs3a/mecsys/token.hpp"
#include "fs3a/netsim/entity.hpp"

namespace fs3a::mecsys {

using netsim::Delivery;
using netsim::EndpointId;
using netsim::Transport;

struct UEContext {
    std::string imsi;
    std::uint32_t teid = 0;
    Ipv4 ue_ip;
    std::string home_plmn;
    bool active = false;
    double attached_at_ms = 0.0;

    bool operator==(const UEContext&) const = default;
};

// Live IP -> context view, fed by ContextSync from the manager.
class ContextView {
public:
    void apply(const fed::ContextSync& sync, double now_ms);
    // Active context bound to `ip`, if any.
    const UEContext* by_ip(Ipv4 ip) const;
    const UEContext* by_imsi(const std::string& imsi) const;
    std::vector<UEContext> all() const;

private:
    std::map<std::string, UEContext> by_imsi_;
};

struct ManagerConfig {
    std::string network_id;
    std::string plmn;
    EndpointId ds;
    EndpointId oidc;
    std::vector<EndpointId> apps;
    bool prefetch_subscription = false;
};

// S1 tap: builds UE contexts, fans them out, fires prefetch and arrival
// triggers at InitialContextSetupRequest.
class Manager final : public netsim::Entity {
public:
    Manager(Transport& net, EndpointId id, ManagerConfig cfg);

    std::optional<UEContext> context(const std::string& imsi) const;
    std::vector<UEContext> contexts() const;
    std::size_t orphans() const { return orphans_; }
    // Requesters currently waiting for `imsi` to show up.
    std::set<EndpointId> watchers(const std::string& imsi) const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    void sync(const UEContext& ctx);

    ManagerConfig cfg_;
    std::map<std::uint32_t, std::string> pending_;    // enb_ue_id -> imsi
    std::map<std::uint32_t, std::string> by_enb_id_;  // enb_ue_id -> imsi
    std::map<std::string, UEContext> contexts_;
    std::map<std::string, std::set<EndpointId>> watch_;
    std::size_t orphans_ = 0;
};

struct SubscriberEntry {
    enum class Source { LocalHss, HomeMecViaProxy };
    std::string imsi;
    SubscriptionRecord record;
    Source source = Source::LocalHss;
    double fetched_at_ms = 0.0;

    bool operator==(const SubscriberEntry&) const = default;
};

struct DatastoreConfig {
    std::string network_id;
    std::string plmn;
    EndpointId hss;
    EndpointId proxy;
    std::map<std::string, std::string> home_of_plmn; // plmn prefix -> network id
};

// One logical subscriber store per MEC system. Concurrent fetches for the same
// IMSI share one upstream request.
class Datastore final : public netsim::Entity {
public:
    Datastore(Transport& net, EndpointId id, DatastoreConfig cfg);

    std::optional<SubscriberEntry> entry(const std::string& imsi) const;
    std::vector<SubscriberEntry> entries() const;
    std::size_t upstream_requests() const { return upstream_; }

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    struct Waiter {
        EndpointId reply_to;
        fed::Header hdr;
    };
    void request(const Delivery& d, const fed::SubscriptionFetchReq& req);
    void complete(const std::string& imsi, const fed::SubscriptionFetchResp& resp, bool remote);
    void reply(const Waiter& w, const std::optional<SubscriptionRecord>& rec, std::string_view error);

    DatastoreConfig cfg_;
    std::map<std::string, SubscriberEntry> entries_;
    std::map<std::string, std::vector<Waiter>> waiters_; // by imsi
    std::map<std::string, std::string> inflight_;        // corr -> imsi
    std::size_t upstream_ = 0;
};

struct IssuedToken {
    AccessToken token;
    Ipv4 from_ip;
    double at_ms = 0.0;
};

struct OidcConfig {
    std::string network_id;
    EndpointId ds;
    AppKeys keys;
    std::uint64_t token_lifetime_ms = 300'000;
    std::uint64_t seed = 0;
};

// Cellular OIDC: asserts identity from the source IP of the request.
class OidcModule final : public netsim::Entity {
public:
    OidcModule(Transport& net, EndpointId id, OidcConfig cfg);

    // Decision core. `sub` is the datastore's answer, absent while the entry is
    // still being fetched. Throws Error{UnknownSourceIP | SubscriptionPending |
    // NotEntitled}.
    AccessToken authenticate(const std::string& app_id, Ipv4 source_ip, const std::optional<SubscriptionRecord>& sub);
    // Signature, expiry, audience, then IP binding. Returns the subject.
    // Throws Error{BadSignature | Expired | AudienceMismatch | SubjectIpMismatch}.
    std::string validate(const std::string& app_id, std::string_view token, Ipv4 source_ip) const;

    const ContextView& view() const { return view_; }
    std::vector<IssuedToken> issued() const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    enum class Kind { Auth, Validate, Identity };
    struct Pending {
        Kind kind;
        EndpointId reply_to;
        std::string app_id;
        Ipv4 ip;
        std::string reply_corr;
        std::string imsi;
    };
    // A request can overtake the ContextSync for its address when the
    // transport does not order them; such requests wait this long for the
    // sync before being refused.
    static constexpr double kUnknownIpHoldMs = 50.0;
    struct Held {
        Delivery d;
        Message msg;
        Ipv4 ip;
    };
    void dispatch(const Delivery& d, const Message& msg, bool final);
    void hold(const Delivery& d, const Message& msg, Ipv4 ip);
    void ask_datastore(Pending p);
    void finish(const Pending& p, const fed::SubscriptionFetchResp& resp);
    std::string resolve(Ipv4 ip) const;

    OidcConfig cfg_;
    ContextView view_;
    std::mt19937_64 rng_;
    std::map<std::string, Pending> pending_;
    std::vector<IssuedToken> issued_;
    std::map<std::uint64_t, Held> held_;
    std::uint64_t next_hold_ = 0;
};

struct Session {
    std::string session_id;
    std::string imsi;
    std::string app_id;
    std::string network_id;
    bool frozen = false;

    bool operator==(const Session&) const = default;
};

struct AppServerConfig {
    std::string network_id;
    std::string app_id;
    EndpointId idp;          // N/oidc or cloud/auth
    EndpointId ams;
    EndpointId state_source; // ams, or cloud/store for the cloud path
    EndpointId cloud_store;  // uploads go here when non-empty
    bool advertise_on_login = false;
    std::size_t response_bytes = 64;
};

class AppServer final : public netsim::Entity {
public:
    AppServer(Transport& net, EndpointId id, AppServerConfig cfg);

    // Throws Error{NoSession} for unknown or frozen sessions.
    std::uint64_t update_state(const std::string& session_id, Bytes blob);
    std::optional<AppState> state(const std::string& imsi) const;
    std::optional<Session> session(const std::string& session_id) const;
    std::vector<Session> sessions() const;
    // Drops the held state so that later fetches see SourceStateGone.
    void evict(const std::string& imsi);
    const AppServerConfig& config() const { return cfg_; }

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    struct PendingFetch {
        std::string imsi;
        std::vector<EndpointId> waiting;
    };
    void serve(const EndpointId& ue);
    void advertise(const std::string& imsi);

    AppServerConfig cfg_;
    ContextView view_;
    std::map<std::string, Session> sessions_;
    std::map<std::string, AppState> states_;      // by imsi
    std::set<std::string> ready_;                  // imsis whose state is usable here
    std::map<std::string, EndpointId> logins_;     // validate corr -> UE
    std::map<std::string, PendingFetch> fetches_;  // fetch corr -> waiting UEs
    std::map<std::string, std::string> fetch_of_;  // imsi -> fetch corr
    std::uint64_t next_session_ = 0;
};

struct MobilityWatch {
    std::string user_id;
    std::string app_id;
    std::string source_network;
    std::string source_platform;
    double created_at_ms = 0.0;

    bool operator==(const MobilityWatch&) const = default;
};

struct AmsConfig {
    std::string network_id;
    EndpointId amc;
    EndpointId mgr;
    std::map<std::string, EndpointId> apps; // app id -> app server
    bool prefetch = false;
    double watch_ttl_ms = 24.0 * 3600.0 * 1000.0;
};

class Ams final : public netsim::Entity {
public:
    Ams(Transport& net, EndpointId id, AmsConfig cfg);

    std::vector<MobilityWatch> watches() const;
    std::optional<AppState> cached(const std::string& user_id, const std::string& app_id) const;
    std::size_t remote_fetches() const { return remote_fetches_; }

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    using Key = std::pair<std::string, std::string>; // user, app
    struct Waiter {
        EndpointId reply_to;
        fed::Header hdr;
    };
    struct Fetch {
        Key key;
        std::vector<Waiter> waiters;
    };
    void expire();
    bool start_fetch(const Key& key);
    void reply(const Waiter& w, const std::optional<AppState>& st, std::string_view error);

    AmsConfig cfg_;
    std::map<Key, MobilityWatch> watches_;
    std::map<Key, MobilityWatch> arrived_;  // watches consumed by an arrival
    std::map<Key, AppState> cache_;
    std::map<std::string, Fetch> fetches_;  // remote corr -> fetch
    std::map<Key, std::string> fetch_of_;
    std::map<std::string, Waiter> serving_; // app corr -> remote requester
    std::size_t remote_fetches_ = 0;
};

struct AmcConfig {
    std::string network_id;
    EndpointId proxy;
    EndpointId ams;
    std::vector<std::string> neighbors; // network ids
};

// System-level relay between the local AMS and the proxy.
class Amc final : public netsim::Entity {
public:
    Amc(Transport& net, EndpointId id, AmcConfig cfg);

    std::size_t advertised() const { return advertised_; }

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    AmcConfig cfg_;
    std::map<std::string, EndpointId> pending_; // corr -> reply_to
    std::size_t advertised_ = 0;
};

struct CloudPool {
    Ipv4 base;
    std::uint32_t size = 0;
    std::string network_id;
    EndpointId oidc;
};

struct CloudAuthConfig {
    std::vector<CloudPool> pools;
    AppKeys keys;
    std::uint64_t token_lifetime_ms = 300'000;
    std::uint64_t seed = 0;
};

// Third-party identity provider outside the federation. Asks the serving
// network's OIDC module who owns an address.
class CloudAuth final : public netsim::Entity {
public:
    CloudAuth(Transport& net, EndpointId id, CloudAuthConfig cfg);

    std::vector<IssuedToken> issued() const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    struct Pending {
        bool validate = false;
        EndpointId reply_to;
        std::string app_id;
        Ipv4 ip;
        std::string reply_corr;
        std::string subject;
    };
    const CloudPool* pool_of(Ipv4 ip) const;

    CloudAuthConfig cfg_;
    std::mt19937_64 rng_;
    std::map<std::string, Pending> pending_;
    std::vector<IssuedToken> issued_;
};

class CloudStore final : public netsim::Entity {
public:
    CloudStore(Transport& net, EndpointId id);

    std::optional<AppState> stored(const std::string& user_id, const std::string& app_id) const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    using Key = std::pair<std::string, std::string>; // user, app
    struct Pull {
        Key key;
        std::vector<std::pair<EndpointId, fed::Header>> waiting;
    };
    void answer(const EndpointId& to, const fed::Header& req, const fed::StateFetchResp& resp);

    std::map<Key, AppState> states_;
    std::map<Key, EndpointId> holders_;
    std::map<std::string, Pull> pulls_; // by corr
    std::map<Key, std::string> pull_of_;
};

struct UePlan {
    EndpointId app;
    std::string app_id;
    bool login = true;
    std::string token; // presented directly when non-empty
    bool resume = false;
    double resume_delay_ms = 0.0;
};

// Application side of a UE: login through redirect or token, then resume.
class UeAgent final : public cellular::AppClient {
public:
    void set_plan(UePlan plan) { plan_ = std::move(plan); }
    const UePlan& plan() const { return plan_; }

    void on_attached(cellular::Ue& ue) override;
    void on_app_message(cellular::Ue& ue, const Delivery& d, const Message& msg) override;

    const std::string& token() const { return token_; }
    const std::string& session_id() const { return session_; }
    const std::optional<Bytes>& data() const { return data_; }
    const std::vector<app::AppError>& errors() const { return errors_; }
    void reset_outcome();

private:
    void login(cellular::Ue& ue);

    UePlan plan_;
    std::string token_;
    std::string session_;
    std::optional<Bytes> data_;
    std::vector<app::AppError> errors_;
};

} // namespace fs3a::mecsys
