#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fs3a/cellular/aka.hpp"
#include "fs3a/wire/bytes.hpp"

namespace fs3a::harness {

struct LinkSpec {
    double latency_ms = 1.0;
    double bandwidth_mbps = 100.0;
    bool operator==(const LinkSpec&) const = default;
};

// Link classes. Every physical link in a built federation belongs to one.
inline constexpr const char* kLinkClasses[] = {
    "ue_enb",       // radio
    "enb_epc",      // eNB <-> MME
    "enb_mec",      // eNB <-> MEC Manager tap
    "epc_internal", // MME <-> HSS
    "mec_internal", // between MEC entities of one system
    "mec_epc",      // datastore <-> HSS
    "epc_proxy",    // MME/HSS <-> proxy
    "mec_proxy",    // datastore/AMC <-> proxy
    "proxy_proxy",  // inter-proxy mesh
    "cloud",        // anything <-> cloud
};

struct NetworkSpec {
    std::string id;
    std::string plmn;
    Ipv4 pool_base;
    std::uint32_t pool_size = 65534;
};

struct SubscriberSpec {
    std::string imsi;
    cellular::SecretKey k{};
    std::uint64_t sqn = 0;
    std::string home; // network id
    bool mec_entitlement = true;
    std::map<std::string, std::string> profile;
};

struct AppSpec {
    std::string id;
    Bytes key;
    std::size_t state_size_bytes = 1 << 20;
    std::size_t response_bytes = 1024;
};

enum class AuthPlace { Cloud, Mec };
enum class SubscriptionFetch { OnDemand, Prefetch };
enum class StateFetch { OnArrival, Prefetch };
enum class AuthMode { Reauth, TokenReuse };
enum class StatePath { Cloud, Proxy };

struct ScenarioConfig {
    std::vector<NetworkSpec> networks;
    std::map<std::string, LinkSpec> links;
    // role -> message name (or "*") -> ms
    std::map<std::string, std::map<std::string, double>> processing_ms;
    std::vector<SubscriberSpec> subscribers;
    std::vector<AppSpec> apps;

    AuthPlace auth_server_location = AuthPlace::Mec;
    SubscriptionFetch subscription_fetch = SubscriptionFetch::OnDemand;
    StateFetch state_fetch = StateFetch::OnArrival;
    AuthMode auth_mode = AuthMode::Reauth;
    StatePath state_path = StatePath::Proxy;

    std::uint64_t seed = 1;
    std::uint64_t token_lifetime_ms = 300'000;
    double watch_ttl_ms = 24.0 * 3600.0 * 1000.0;

    // Who moves where. Empty picks the first subscriber, its home network,
    // the first other network and the first app.
    std::string move_subscriber;
    std::string move_to;
    std::string move_app;

    std::vector<std::size_t> sweep_sizes{10 * 1024, 1 << 20, 10 << 20};
    // Time the UE spends between login and resuming in the sweep.
    double sweep_resume_delay_ms = 0.0;
    // Infrastructure links start connected (persistent sockets).
    bool prewarm = true;
    std::uint16_t loopback_base_port = 0;

    LinkSpec link(const std::string& cls) const;
    const SubscriberSpec& subscriber() const;
    const NetworkSpec& home() const;
    const NetworkSpec& visited() const;
    const AppSpec& app() const;
    const NetworkSpec& network(const std::string& id) const;
};

// Throws Error{ConfigError}.
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
const std::string& default_config_text();
ScenarioConfig default_config();
std::string dump_config(const ScenarioConfig& cfg);

} // namespace fs3a::harness
