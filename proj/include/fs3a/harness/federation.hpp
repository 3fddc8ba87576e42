#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "fs3a/cellular/entities.hpp"
#include "fs3a/fedproxy/proxy.hpp"
#include "fs3a/harness/config.hpp"
#include "fs3a/mecsys/entities.hpp"
#include "fs3a/netsim/entity.hpp"
#include "fs3a/netsim/scheduler.hpp"

namespace fs3a::harness {

enum class TransportKind { Sim, Loopback };

// Endpoint naming used by the builder.
namespace ep {
inline std::string enb(const std::string& n) { return n + "/enb"; }
inline std::string mme(const std::string& n) { return n + "/mme"; }
inline std::string hss(const std::string& n) { return n + "/hss"; }
inline std::string proxy(const std::string& n) { return n + "/proxy"; }
inline std::string mgr(const std::string& n) { return n + "/mgr"; }
inline std::string oidc(const std::string& n) { return n + "/oidc"; }
inline std::string ds(const std::string& n) { return n + "/ds"; }
inline std::string ams(const std::string& n) { return n + "/ams"; }
inline std::string amc(const std::string& n) { return n + "/amc"; }
inline std::string app(const std::string& n, const std::string& a) { return n + "/app." + a; }
inline std::string ue(const std::string& imsi) { return "ue/" + imsi; }
inline const std::string kCloudAuth = "cloud/auth";
inline const std::string kCloudStore = "cloud/store";
} // namespace ep

// Which mechanisms a run enables. Independent of the config's own toggles so
// that one config can drive every scenario.
struct Toggles {
    AuthPlace auth = AuthPlace::Mec;
    bool subscription_prefetch = false;
    bool state_prefetch = false;
    bool token_reuse = false;
    StatePath state_path = StatePath::Proxy;

    bool operator==(const Toggles&) const = default;
};

Toggles toggles_of(const ScenarioConfig& cfg);

// Role of an endpoint for processing-delay lookup ("app", "oidc", "ue", ...).
std::string role_of(const std::string& endpoint);

class Federation {
public:
    struct Network {
        NetworkSpec spec;
        cellular::Hss* hss = nullptr;
        cellular::Mme* mme = nullptr;
        cellular::Enb* enb = nullptr;
        fedproxy::Proxy* proxy = nullptr;
        mecsys::Manager* mgr = nullptr;
        mecsys::OidcModule* oidc = nullptr;
        mecsys::Datastore* ds = nullptr;
        mecsys::Ams* ams = nullptr;
        mecsys::Amc* amc = nullptr;
        std::map<std::string, mecsys::AppServer*> apps;
    };

    Federation(const ScenarioConfig& cfg, const Toggles& toggles, TransportKind kind = TransportKind::Sim);
    ~Federation();

    Federation(const Federation&) = delete;
    Federation& operator=(const Federation&) = delete;

    netsim::Transport& net() { return *net_; }
    // Null in loopback mode.
    netsim::Scheduler* scheduler() { return sched_; }
    netsim::Probe& probe() { return probe_; }
    const ScenarioConfig& config() const { return cfg_; }
    const Toggles& toggles() const { return toggles_; }

    Network& network(const std::string& id);
    cellular::Ue& ue(const std::string& imsi);
    mecsys::UeAgent& agent(const std::string& imsi);
    mecsys::CloudAuth& cloud_auth() { return *cloud_auth_; }
    mecsys::CloudStore& cloud_store() { return *cloud_store_; }
    std::vector<const netsim::Entity*> entities() const;

    // Attaches `imsi` to `network_id` and runs to idle.
    void attach(const std::string& imsi, const std::string& network_id);
    double run() { return net_->run_until_idle(); }

private:
    template <class T, class... Args>
    T* make(Args&&... args);
    void add(const std::string& a, const std::string& b, const LinkSpec& l);
    void build_links();

    ScenarioConfig cfg_;
    Toggles toggles_;
    netsim::Probe probe_;
    std::vector<std::unique_ptr<netsim::Entity>> entities_;
    std::map<std::string, Network> networks_;
    std::map<std::string, cellular::Ue*> ues_;
    std::map<std::string, std::unique_ptr<mecsys::UeAgent>> agents_;
    mecsys::CloudAuth* cloud_auth_ = nullptr;
    mecsys::CloudStore* cloud_store_ = nullptr;
    netsim::Scheduler* sched_ = nullptr;
    // Declared last so it is torn down first (loopback threads stop before
    // the entities they call into go away).
    std::unique_ptr<netsim::Transport> net_;
};

} // namespace fs3a::harness
