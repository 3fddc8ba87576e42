#pragma once

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fs3a/cellular/aka.hpp"
#include "fs3a/error.hpp"
#include "fs3a/netsim/entity.hpp"

namespace fs3a::cellular {

using netsim::Delivery;
using netsim::EndpointId;
using netsim::Transport;

class Hss final : public netsim::Entity {
public:
    Hss(Transport& net, EndpointId id, std::string plmn, std::uint64_t seed);

    void provision(const std::string& imsi, const SecretKey& k, std::uint64_t sqn, SubscriptionRecord record);
    // Throws Error{UnknownSubscriber}.
    std::vector<AuthVector> generate_vectors(const std::string& imsi, std::size_t count);
    std::optional<SubscriptionRecord> subscription(const std::string& imsi) const;
    std::uint64_t sqn_of(const std::string& imsi) const;
    std::string serving_mme(const std::string& imsi) const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    struct Subscriber {
        SecretKey k{};
        std::uint64_t sqn = 0;
        SubscriptionRecord record;
        std::string mme;
    };
    std::string plmn_;
    std::mt19937_64 rng_;
    std::map<std::string, Subscriber> subs_;
};

struct MmeConfig {
    std::string network_id;
    std::string plmn;
    EndpointId enb;
    EndpointId hss;
    EndpointId proxy;
    Ipv4 pool_base;
    std::uint32_t pool_size = 65534;
};

class Mme final : public netsim::Entity {
public:
    struct UeRecord {
        std::string imsi;
        std::uint32_t enb_ue_id = 0;
        std::uint32_t teid = 0;
        Ipv4 ue_ip;
        std::optional<SubscriptionRecord> subscription;
    };

    Mme(Transport& net, EndpointId id, MmeConfig cfg);

    // Assigns a fresh address to an attached UE and tells the eNB.
    // Throws Error{NotAttached}.
    Ipv4 rotate_ip(const std::string& imsi);
    std::optional<UeRecord> find(const std::string& imsi) const;
    std::vector<UeRecord> active() const;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    enum class Phase { AuthInfo, Challenge, UpdateLocation, Active };
    struct Context {
        UeRecord rec;
        Phase phase = Phase::AuthInfo;
        Res8 xres{};
    };

    EndpointId s6a_target(const std::string& imsi) const;
    void release(std::uint32_t enb_ue_id, std::string_view reason);
    void drop(std::uint32_t enb_ue_id);
    Ipv4 allocate_ip();

    MmeConfig cfg_;
    std::map<std::uint32_t, Context> ctx_;       // by enb_ue_id
    std::map<std::string, std::uint32_t> corr_;  // S6a corr -> enb_ue_id
    std::set<std::uint32_t> used_ips_;
    std::uint32_t next_teid_ = 1;
};

// Relays UE <-> MME and mirrors every S1 frame to the MEC Manager tap.
class Enb final : public netsim::Entity {
public:
    Enb(Transport& net, EndpointId id, EndpointId mme, EndpointId mgr);

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    EndpointId mme_;
    EndpointId mgr_;
    std::uint32_t next_id_ = 0;
    std::map<std::uint32_t, EndpointId> ue_of_;
    std::map<EndpointId, std::uint32_t> id_of_;
};

struct TimelineEntry {
    std::string stage;
    double start_ms = 0.0;
    double end_ms = 0.0;
};

struct AttachResult {
    std::string imsi;
    std::uint32_t teid = 0;
    Ipv4 ue_ip;
    std::string serving_network;
    std::vector<TimelineEntry> timeline;
};

class Ue;

// Application-level behaviour layered on top of the UE's radio side.
class AppClient {
public:
    virtual ~AppClient() = default;
    virtual void on_attached(Ue& ue) = 0;
    virtual void on_app_message(Ue& ue, const Delivery& d, const Message& msg) = 0;
};

class Ue final : public netsim::Entity {
public:
    Ue(Transport& net, SimCredential cred);

    // Starts an attach through `enb`; completion is observed via result().
    void attach(const std::string& network_id, const EndpointId& enb);
    // Throws Error{NotAttached}.
    void detach();

    bool attached() const { return attached_; }
    const std::optional<AttachResult>& result() const { return result_; }
    std::optional<Errc> failure() const { return failure_; }
    const std::string& imsi() const { return cred_.imsi; }
    SimCredential& credential() { return cred_; }
    Ipv4 ip() const { return ip_; }
    const std::string& serving_network() const { return network_; }

    void set_app_client(AppClient* client) { client_ = client; }
    void send(const EndpointId& to, const Message& msg) { emit(to, msg); }
    void after(double delay_ms, std::function<void()> fn) { net_.defer(delay_ms, std::move(fn)); }
    using netsim::Entity::mark;
    using netsim::Entity::now;

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    SimCredential cred_;
    AppClient* client_ = nullptr;
    std::string network_;
    EndpointId enb_;
    bool attaching_ = false;
    bool attached_ = false;
    double attach_start_ = 0.0;
    Ipv4 ip_;
    std::optional<AttachResult> result_;
    std::optional<Errc> failure_;
};

} // namespace fs3a::cellular
