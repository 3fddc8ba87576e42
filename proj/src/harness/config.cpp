#include "fs3a/harness/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fs3a/error.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::harness {

using nlohmann::json;

namespace {

const std::string kDefault = R"({
  "networks": [
    {"id": "A", "plmn": "00101", "pool": "10.1.0.0", "pool_size": 65534},
    {"id": "B", "plmn": "00102", "pool": "10.2.0.0", "pool_size": 65534}
  ],
  "links": {
    "ue_enb":       {"latency_ms": 2,   "bandwidth_mbps": 100},
    "enb_epc":      {"latency_ms": 2,   "bandwidth_mbps": 100},
    "enb_mec":      {"latency_ms": 1,   "bandwidth_mbps": 100},
    "epc_internal": {"latency_ms": 0.5, "bandwidth_mbps": 100},
    "mec_internal": {"latency_ms": 0.5, "bandwidth_mbps": 100},
    "mec_epc":      {"latency_ms": 2,   "bandwidth_mbps": 100},
    "epc_proxy":    {"latency_ms": 2,   "bandwidth_mbps": 100},
    "mec_proxy":    {"latency_ms": 2,   "bandwidth_mbps": 100},
    "proxy_proxy":  {"latency_ms": 10,  "bandwidth_mbps": 100},
    "cloud":        {"latency_ms": 40,  "bandwidth_mbps": 20}
  },
  "processing_ms": {
    "ue":  {"InitialContextSetupRequest": 900},
    "app": {"Resume": 15}
  },
  "subscribers": [
    {"imsi": "001010000000001", "home": "A", "sqn": 0, "mec_entitlement": true,
     "k": "000102030405060708090a0b0c0d0e0f101112131415161718191a1b1c1d1e1f",
     "profile": {"apn": "mec", "qos_tier": "gold"}},
    {"imsi": "001010000000002", "home": "A", "sqn": 0, "mec_entitlement": true,
     "k": "1f1e1d1c1b1a191817161514131211100f0e0d0c0b0a09080706050403020100",
     "profile": {"apn": "mec", "qos_tier": "silver"}},
    {"imsi": "001020000000001", "home": "B", "sqn": 0, "mec_entitlement": true,
     "k": "a0a1a2a3a4a5a6a7a8a9aaabacadaeafb0b1b2b3b4b5b6b7b8b9babbbcbdbebf",
     "profile": {"apn": "mec", "qos_tier": "gold"}}
  ],
  "apps": [
    {"id": "arapp", "key": "6172617070206665646572617465642073696e67206b6579203030303030303031",
     "state_size_bytes": 1048576, "response_bytes": 1024}
  ],
  "auth_server_location": "mec",
  "subscription_fetch": "on_demand",
  "state_fetch": "on_arrival",
  "auth_mode": "reauth",
  "state_path": "proxy",
  "seed": 1,
  "token_lifetime_ms": 300000,
  "watch_ttl_ms": 86400000,
  "move": {"subscriber": "001010000000001", "to": "B", "app": "arapp"},
  "sweep": {"sizes": [10240, 1048576, 10485760], "resume_delay_ms": 8000},
  "prewarm": true,
  "loopback": {"base_port": 0}
}
)";

[[noreturn]] void bad(const std::string& what) { throw Error(Errc::ConfigError, what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        bad(std::string("field ") + key + ": " + e.what());
    }
}

template <class E>
E parse_enum(const json& j, const char* key, E fallback, std::initializer_list<std::pair<const char*, E>> names) {
    if (!j.contains(key)) return fallback;
    auto s = get_or<std::string>(j, key, "");
    for (const auto& [n, v] : names)
        if (s == n) return v;
    bad(std::string("field ") + key + ": unknown value '" + s + "'");
}

template <class E>
const char* enum_name(E v, std::initializer_list<std::pair<const char*, E>> names) {
    for (const auto& [n, x] : names)
        if (x == v) return n;
    return "?";
}

constexpr auto kAuthPlaces = {std::pair{"cloud", AuthPlace::Cloud}, std::pair{"mec", AuthPlace::Mec}};
constexpr auto kSubFetch = {std::pair{"on_demand", SubscriptionFetch::OnDemand},
                            std::pair{"prefetch", SubscriptionFetch::Prefetch}};
constexpr auto kStateFetch = {std::pair{"on_arrival", StateFetch::OnArrival}, std::pair{"prefetch", StateFetch::Prefetch}};
constexpr auto kAuthMode = {std::pair{"reauth", AuthMode::Reauth}, std::pair{"token_reuse", AuthMode::TokenReuse}};
constexpr auto kStatePath = {std::pair{"cloud", StatePath::Cloud}, std::pair{"proxy", StatePath::Proxy}};

Bytes hex_field(const json& j, const char* key, const std::string& ctx) {
    auto s = get_or<std::string>(j, key, "");
    auto b = from_hex(s);
    if (!b || b->empty()) bad(ctx + ": " + key + " must be non-empty lowercase hex");
    return *b;
}

void validate(ScenarioConfig& c) {
    if (c.networks.size() < 2) bad("at least two networks are required");
    std::set<std::string> ids, plmns;
    for (const auto& n : c.networks) {
        if (!valid_id(n.id) || n.id == "cloud" || n.id == "ue") bad("bad network id '" + n.id + "'");
        if (n.plmn.size() != 5 || !std::all_of(n.plmn.begin(), n.plmn.end(), ::isdigit))
            bad("network " + n.id + ": plmn must be 5 digits");
        if (!ids.insert(n.id).second) bad("duplicate network " + n.id);
        if (!plmns.insert(n.plmn).second) bad("duplicate plmn " + n.plmn);
        if (n.pool_size == 0 || n.pool_size > 65534) bad("network " + n.id + ": pool_size out of range");
    }
    for (const auto& a : c.networks)
        for (const auto& b : c.networks)
            if (&a != &b && a.pool_base.value <= b.pool_base.value &&
                b.pool_base.value < a.pool_base.value + a.pool_size + 2)
                bad("address pools of " + a.id + " and " + b.id + " overlap");
    for (const auto& [cls, l] : c.links) {
        if (std::find_if(std::begin(kLinkClasses), std::end(kLinkClasses),
                         [&](const char* k) { return cls == k; }) == std::end(kLinkClasses))
            bad("unknown link class " + cls);
        if (!(l.latency_ms >= 0.0) || !(l.bandwidth_mbps > 0.0)) bad("link " + cls + ": bad latency/bandwidth");
    }
    std::set<std::string> imsis;
    for (const auto& s : c.subscribers) {
        if (!valid_imsi(s.imsi)) bad("bad imsi " + s.imsi);
        if (!imsis.insert(s.imsi).second) bad("duplicate imsi " + s.imsi);
        if (!ids.contains(s.home)) bad("subscriber " + s.imsi + ": unknown home " + s.home);
        if (plmn_of(s.imsi) != c.network(s.home).plmn) bad("subscriber " + s.imsi + ": imsi prefix differs from home plmn");
    }
    std::set<std::string> apps;
    for (const auto& a : c.apps) {
        if (!valid_id(a.id) || a.id.find('.') != std::string::npos) bad("bad app id " + a.id);
        if (!apps.insert(a.id).second) bad("duplicate app " + a.id);
    }
    if (c.subscribers.empty()) bad("no subscribers");
    if (c.apps.empty()) bad("no apps");
    if (c.move_subscriber.empty()) c.move_subscriber = c.subscribers.front().imsi;
    if (!imsis.contains(c.move_subscriber)) bad("move.subscriber unknown");
    if (c.move_app.empty()) c.move_app = c.apps.front().id;
    if (!apps.contains(c.move_app)) bad("move.app unknown");
    if (c.move_to.empty()) {
        for (const auto& n : c.networks)
            if (n.id != c.subscriber().home) {
                c.move_to = n.id;
                break;
            }
    }
    if (!ids.contains(c.move_to) || c.move_to == c.subscriber().home) bad("move.to must be a foreign network");
    for (auto s : c.sweep_sizes)
        if (s == 0) bad("sweep sizes must be positive");
    if (c.sweep_resume_delay_ms < 0.0) bad("sweep.resume_delay_ms must be >= 0");
    if (c.token_lifetime_ms == 0) bad("token_lifetime_ms must be positive");
    for (const auto& [role, m] : c.processing_ms)
        for (const auto& [k, v] : m)
            if (!(v >= 0.0)) bad("processing_ms." + role + "." + k + " must be >= 0");
}

} // namespace

LinkSpec ScenarioConfig::link(const std::string& cls) const {
    auto it = links.find(cls);
    if (it != links.end()) return it->second;
    bad("link class " + cls + " not configured");
}

const NetworkSpec& ScenarioConfig::network(const std::string& id) const {
    for (const auto& n : networks)
        if (n.id == id) return n;
    bad("unknown network " + id);
}

const SubscriberSpec& ScenarioConfig::subscriber() const {
    for (const auto& s : subscribers)
        if (s.imsi == move_subscriber) return s;
    bad("move.subscriber unknown");
}

const NetworkSpec& ScenarioConfig::home() const { return network(subscriber().home); }
const NetworkSpec& ScenarioConfig::visited() const { return network(move_to); }

const AppSpec& ScenarioConfig::app() const {
    for (const auto& a : apps)
        if (a.id == move_app) return a;
    bad("move.app unknown");
}

ScenarioConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        bad(std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) bad("top level must be an object");
    // Unspecified sections fall back to the embedded default.
    json def = json::parse(kDefault);
    for (auto& [k, v] : def.items())
        if (!root.contains(k)) root[k] = v;
    if (root["links"].is_object())
        for (auto& [k, v] : def["links"].items())
            if (!root["links"].contains(k)) root["links"][k] = v;

    ScenarioConfig c;
    try {
        for (const auto& n : root.at("networks")) {
            NetworkSpec ns;
            ns.id = n.at("id").get<std::string>();
            ns.plmn = n.at("plmn").get<std::string>();
            auto pool = Ipv4::parse(n.at("pool").get<std::string>());
            if (!pool) bad("network " + ns.id + ": bad pool address");
            ns.pool_base = *pool;
            ns.pool_size = get_or<std::uint32_t>(n, "pool_size", 65534);
            c.networks.push_back(ns);
        }
        for (const auto& [k, v] : root.at("links").items())
            c.links[k] = LinkSpec{v.at("latency_ms").get<double>(), v.at("bandwidth_mbps").get<double>()};
        for (const auto& [role, m] : root.at("processing_ms").items())
            for (const auto& [msg, ms] : m.items()) c.processing_ms[role][msg] = ms.get<double>();
        for (const auto& s : root.at("subscribers")) {
            SubscriberSpec ss;
            ss.imsi = s.at("imsi").get<std::string>();
            auto k = hex_field(s, "k", "subscriber " + ss.imsi);
            if (k.size() != ss.k.size()) bad("subscriber " + ss.imsi + ": k must be 32 bytes");
            std::copy(k.begin(), k.end(), ss.k.begin());
            ss.sqn = get_or<std::uint64_t>(s, "sqn", 0);
            ss.home = s.at("home").get<std::string>();
            ss.mec_entitlement = get_or<bool>(s, "mec_entitlement", true);
            ss.profile = get_or<std::map<std::string, std::string>>(s, "profile", {});
            c.subscribers.push_back(ss);
        }
        for (const auto& a : root.at("apps")) {
            AppSpec as;
            as.id = a.at("id").get<std::string>();
            as.key = hex_field(a, "key", "app " + as.id);
            as.state_size_bytes = get_or<std::size_t>(a, "state_size_bytes", as.state_size_bytes);
            as.response_bytes = get_or<std::size_t>(a, "response_bytes", as.response_bytes);
            c.apps.push_back(as);
        }
        c.auth_server_location = parse_enum(root, "auth_server_location", c.auth_server_location, kAuthPlaces);
        c.subscription_fetch = parse_enum(root, "subscription_fetch", c.subscription_fetch, kSubFetch);
        c.state_fetch = parse_enum(root, "state_fetch", c.state_fetch, kStateFetch);
        c.auth_mode = parse_enum(root, "auth_mode", c.auth_mode, kAuthMode);
        c.state_path = parse_enum(root, "state_path", c.state_path, kStatePath);
        c.seed = get_or<std::uint64_t>(root, "seed", c.seed);
        c.token_lifetime_ms = get_or<std::uint64_t>(root, "token_lifetime_ms", c.token_lifetime_ms);
        c.watch_ttl_ms = get_or<double>(root, "watch_ttl_ms", c.watch_ttl_ms);
        const auto& mv = root.at("move");
        c.move_subscriber = get_or<std::string>(mv, "subscriber", "");
        c.move_to = get_or<std::string>(mv, "to", "");
        c.move_app = get_or<std::string>(mv, "app", "");
        const auto& sw = root.at("sweep");
        c.sweep_sizes = get_or<std::vector<std::size_t>>(sw, "sizes", c.sweep_sizes);
        c.sweep_resume_delay_ms = get_or<double>(sw, "resume_delay_ms", 0.0);
        c.prewarm = get_or<bool>(root, "prewarm", true);
        c.loopback_base_port = get_or<std::uint16_t>(root.at("loopback"), "base_port", 0);
    } catch (const json::exception& e) {
        bad(e.what());
    }
    validate(c);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

const std::string& default_config_text() { return kDefault; }

ScenarioConfig default_config() { return parse_config(kDefault); }

std::string dump_config(const ScenarioConfig& c) {
    json root;
    for (const auto& n : c.networks)
        root["networks"].push_back(
            {{"id", n.id}, {"plmn", n.plmn}, {"pool", n.pool_base.to_string()}, {"pool_size", n.pool_size}});
    for (const auto& [k, l] : c.links) root["links"][k] = {{"latency_ms", l.latency_ms}, {"bandwidth_mbps", l.bandwidth_mbps}};
    root["processing_ms"] = json::object();
    for (const auto& [role, m] : c.processing_ms)
        for (const auto& [k, v] : m) root["processing_ms"][role][k] = v;
    for (const auto& s : c.subscribers)
        root["subscribers"].push_back({{"imsi", s.imsi},
                                       {"home", s.home},
                                       {"sqn", s.sqn},
                                       {"mec_entitlement", s.mec_entitlement},
                                       {"k", to_hex(s.k)},
                                       {"profile", s.profile}});
    for (const auto& a : c.apps)
        root["apps"].push_back({{"id", a.id},
                                {"key", to_hex(a.key)},
                                {"state_size_bytes", a.state_size_bytes},
                                {"response_bytes", a.response_bytes}});
    root["auth_server_location"] = enum_name(c.auth_server_location, kAuthPlaces);
    root["subscription_fetch"] = enum_name(c.subscription_fetch, kSubFetch);
    root["state_fetch"] = enum_name(c.state_fetch, kStateFetch);
    root["auth_mode"] = enum_name(c.auth_mode, kAuthMode);
    root["state_path"] = enum_name(c.state_path, kStatePath);
    root["seed"] = c.seed;
    root["token_lifetime_ms"] = c.token_lifetime_ms;
    root["watch_ttl_ms"] = c.watch_ttl_ms;
    root["move"] = {{"subscriber", c.move_subscriber}, {"to", c.move_to}, {"app", c.move_app}};
    root["sweep"] = {{"sizes", c.sweep_sizes}, {"resume_delay_ms", c.sweep_resume_delay_ms}};
    root["prewarm"] = c.prewarm;
    root["loopback"] = {{"base_port", c.loopback_base_port}};
    return root.dump(2) + "\n";
}

} // namespace fs3a::harness
