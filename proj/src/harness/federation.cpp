#include "fs3a/harness/federation.hpp"

#include <algorithm>

#include "fs3a/error.hpp"
#include "fs3a/netsim/loopback.hpp"

namespace fs3a::harness {

Toggles toggles_of(const ScenarioConfig& cfg) {
    return Toggles{cfg.auth_server_location, cfg.subscription_fetch == SubscriptionFetch::Prefetch,
                   cfg.state_fetch == StateFetch::Prefetch, cfg.auth_mode == AuthMode::TokenReuse, cfg.state_path};
}

std::string role_of(const std::string& endpoint) {
    if (endpoint.rfind("ue/", 0) == 0) return "ue";
    if (endpoint == ep::kCloudAuth) return "cloud_auth";
    if (endpoint == ep::kCloudStore) return "cloud_store";
    auto slash = endpoint.find('/');
    std::string tail = slash == std::string::npos ? endpoint : endpoint.substr(slash + 1);
    if (tail.rfind("app.", 0) == 0) return "app";
    return tail;
}

template <class T, class... Args>
T* Federation::make(Args&&... args) {
    auto e = std::make_unique<T>(std::forward<Args>(args)...);
    T* raw = e.get();
    entities_.push_back(std::move(e));
    return raw;
}

Federation::Federation(const ScenarioConfig& cfg, const Toggles& toggles, TransportKind kind)
    : cfg_(cfg), toggles_(toggles) {
    if (kind == TransportKind::Sim) {
        auto s = std::make_unique<netsim::Scheduler>();
        sched_ = s.get();
        net_ = std::move(s);
    } else {
        net_ = std::make_unique<netsim::LoopbackTransport>(cfg_.loopback_base_port);
    }
    auto& net = *net_;

    mecsys::AppKeys keys;
    for (const auto& a : cfg_.apps) keys[a.id] = a.key;
    std::map<std::string, std::string> home_of_plmn;
    std::set<std::string> proxies;
    for (const auto& n : cfg_.networks) {
        home_of_plmn[n.plmn] = n.id;
        proxies.insert(ep::proxy(n.id));
    }
    const bool cloud_state = toggles_.state_path == StatePath::Cloud;

    for (const auto& n : cfg_.networks) {
        const auto& id = n.id;
        Network w;
        w.spec = n;
        w.hss = make<cellular::Hss>(net, ep::hss(id), n.plmn, cfg_.seed);
        w.mme = make<cellular::Mme>(net, ep::mme(id),
                                    cellular::MmeConfig{id, n.plmn, ep::enb(id), ep::hss(id), ep::proxy(id),
                                                        n.pool_base, n.pool_size});
        w.enb = make<cellular::Enb>(net, ep::enb(id), ep::mme(id), ep::mgr(id));
        auto peers = proxies;
        peers.erase(ep::proxy(id));
        w.proxy = make<fedproxy::Proxy>(
            net, ep::proxy(id), fedproxy::ProxyConfig{id, n.plmn, ep::mme(id), ep::hss(id), ep::ds(id), ep::amc(id), peers});

        std::vector<std::string> app_eps;
        std::map<std::string, std::string> app_map;
        for (const auto& a : cfg_.apps) {
            app_eps.push_back(ep::app(id, a.id));
            app_map[a.id] = ep::app(id, a.id);
        }
        w.mgr = make<mecsys::Manager>(
            net, ep::mgr(id),
            mecsys::ManagerConfig{id, n.plmn, ep::ds(id), ep::oidc(id), app_eps, toggles_.subscription_prefetch});
        w.oidc = make<mecsys::OidcModule>(
            net, ep::oidc(id), mecsys::OidcConfig{id, ep::ds(id), keys, cfg_.token_lifetime_ms, cfg_.seed});
        w.ds = make<mecsys::Datastore>(
            net, ep::ds(id), mecsys::DatastoreConfig{id, n.plmn, ep::hss(id), ep::proxy(id), home_of_plmn});
        w.ams = make<mecsys::Ams>(
            net, ep::ams(id),
            mecsys::AmsConfig{id, ep::amc(id), ep::mgr(id), app_map, toggles_.state_prefetch, cfg_.watch_ttl_ms});
        std::vector<std::string> neighbors;
        for (const auto& o : cfg_.networks)
            if (o.id != id) neighbors.push_back(o.id);
        w.amc = make<mecsys::Amc>(net, ep::amc(id), mecsys::AmcConfig{id, ep::proxy(id), ep::ams(id), neighbors});
        for (const auto& a : cfg_.apps) {
            mecsys::AppServerConfig ac;
            ac.network_id = id;
            ac.app_id = a.id;
            ac.idp = toggles_.auth == AuthPlace::Mec ? ep::oidc(id) : ep::kCloudAuth;
            ac.ams = ep::ams(id);
            ac.state_source = cloud_state ? ep::kCloudStore : ep::ams(id);
            ac.cloud_store = cloud_state ? ep::kCloudStore : std::string{};
            ac.advertise_on_login = !cloud_state;
            ac.response_bytes = a.response_bytes;
            w.apps[a.id] = make<mecsys::AppServer>(net, ep::app(id, a.id), ac);
        }
        networks_.emplace(id, w);
    }

    mecsys::CloudAuthConfig cac;
    for (const auto& n : cfg_.networks)
        cac.pools.push_back(mecsys::CloudPool{n.pool_base, n.pool_size + 2, n.id, ep::oidc(n.id)});
    cac.keys = keys;
    cac.token_lifetime_ms = cfg_.token_lifetime_ms;
    cac.seed = cfg_.seed;
    cloud_auth_ = make<mecsys::CloudAuth>(net, ep::kCloudAuth, cac);
    cloud_store_ = make<mecsys::CloudStore>(net, ep::kCloudStore);

    for (const auto& s : cfg_.subscribers) {
        auto& home = networks_.at(s.home);
        home.hss->provision(s.imsi, s.k, s.sqn,
                            SubscriptionRecord{s.imsi, home.spec.plmn, s.mec_entitlement, s.profile});
        auto* ue = make<cellular::Ue>(net, cellular::SimCredential{s.imsi, s.k, s.sqn});
        auto agent = std::make_unique<mecsys::UeAgent>();
        ue->set_app_client(agent.get());
        ues_[s.imsi] = ue;
        agents_[s.imsi] = std::move(agent);
    }

    for (auto& e : entities_) {
        auto role = cfg_.processing_ms.find(role_of(e->id()));
        if (role != cfg_.processing_ms.end()) e->set_processing(role->second);
        e->set_probe(&probe_);
    }
    build_links();
    if (cfg_.prewarm)
        net.topology().establish_if([](const netsim::Link& l) { return l.a.rfind("ue/", 0) != 0 && l.b.rfind("ue/", 0) != 0; });

    // Federation membership: each proxy knows itself and learns its peers.
    for (auto& [id, w] : networks_) w.proxy->register_network(id, w.spec.plmn, ep::proxy(id));
    for (auto& [id, w] : networks_)
        for (const auto& [other, x] : networks_)
            if (other != id) w.proxy->announce(ep::proxy(other));
    net.run_until_idle();
}

Federation::~Federation() = default;

void Federation::add(const std::string& a, const std::string& b, const LinkSpec& l) {
    net_->topology().add_link(a, b, l.latency_ms, l.bandwidth_mbps);
}

void Federation::build_links() {
    const auto ue_enb = cfg_.link("ue_enb"), enb_epc = cfg_.link("enb_epc"), enb_mec = cfg_.link("enb_mec"),
               epc_int = cfg_.link("epc_internal"), mec_int = cfg_.link("mec_internal"), mec_epc = cfg_.link("mec_epc"),
               epc_proxy = cfg_.link("epc_proxy"), mec_proxy = cfg_.link("mec_proxy"),
               proxy_proxy = cfg_.link("proxy_proxy"), cloud = cfg_.link("cloud");
    // UE sessions ride the radio and then the eNB's MEC breakout or the
    // internet uplink; modelled as one composite link each.
    const LinkSpec ue_mec{ue_enb.latency_ms + enb_mec.latency_ms, std::min(ue_enb.bandwidth_mbps, enb_mec.bandwidth_mbps)};
    const LinkSpec ue_cloud{ue_enb.latency_ms + cloud.latency_ms, std::min(ue_enb.bandwidth_mbps, cloud.bandwidth_mbps)};

    for (const auto& [id, w] : networks_) {
        add(ep::enb(id), ep::mme(id), enb_epc);
        add(ep::enb(id), ep::mgr(id), enb_mec);
        add(ep::mme(id), ep::hss(id), epc_int);
        add(ep::mme(id), ep::proxy(id), epc_proxy);
        add(ep::hss(id), ep::proxy(id), epc_proxy);
        add(ep::ds(id), ep::hss(id), mec_epc);
        add(ep::ds(id), ep::proxy(id), mec_proxy);
        add(ep::amc(id), ep::proxy(id), mec_proxy);
        add(ep::mgr(id), ep::oidc(id), mec_int);
        add(ep::mgr(id), ep::ds(id), mec_int);
        add(ep::mgr(id), ep::ams(id), mec_int);
        add(ep::oidc(id), ep::ds(id), mec_int);
        add(ep::ams(id), ep::amc(id), mec_int);
        add(ep::oidc(id), ep::kCloudAuth, cloud);
        for (const auto& [a, app] : w.apps) {
            add(ep::mgr(id), app->id(), mec_int);
            add(ep::oidc(id), app->id(), mec_int);
            add(ep::ams(id), app->id(), mec_int);
            add(app->id(), ep::kCloudAuth, cloud);
            add(app->id(), ep::kCloudStore, cloud);
        }
        for (const auto& [other, x] : networks_)
            if (id < other) add(ep::proxy(id), ep::proxy(other), proxy_proxy);
        for (const auto& [imsi, ue] : ues_) {
            add(ue->id(), ep::enb(id), ue_enb);
            add(ue->id(), ep::oidc(id), ue_mec);
            for (const auto& [a, app] : w.apps) add(ue->id(), app->id(), ue_mec);
        }
    }
    for (const auto& [imsi, ue] : ues_) add(ue->id(), ep::kCloudAuth, ue_cloud);
}

Federation::Network& Federation::network(const std::string& id) {
    auto it = networks_.find(id);
    if (it == networks_.end()) throw Error(Errc::ConfigError, "unknown network " + id);
    return it->second;
}

cellular::Ue& Federation::ue(const std::string& imsi) {
    auto it = ues_.find(imsi);
    if (it == ues_.end()) throw Error(Errc::ConfigError, "unknown subscriber " + imsi);
    return *it->second;
}

mecsys::UeAgent& Federation::agent(const std::string& imsi) {
    auto it = agents_.find(imsi);
    if (it == agents_.end()) throw Error(Errc::ConfigError, "unknown subscriber " + imsi);
    return *it->second;
}

std::vector<const netsim::Entity*> Federation::entities() const {
    std::vector<const netsim::Entity*> out;
    for (const auto& e : entities_) out.push_back(e.get());
    return out;
}

void Federation::attach(const std::string& imsi, const std::string& network_id) {
    ue(imsi).attach(network_id, ep::enb(network_id));
    run();
}

} // namespace fs3a::harness
