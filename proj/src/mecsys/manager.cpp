#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

void ContextView::apply(const fed::ContextSync& sync, double now_ms) {
    auto& c = by_imsi_[sync.imsi];
    bool fresh = !c.active || c.teid != sync.teid;
    c.imsi = sync.imsi;
    c.teid = sync.teid;
    c.ue_ip = sync.ue_ip;
    c.home_plmn = sync.home_plmn;
    c.active = sync.active;
    if (sync.active && fresh) c.attached_at_ms = now_ms;
}

const UEContext* ContextView::by_ip(Ipv4 ip) const {
    for (const auto& [k, c] : by_imsi_)
        if (c.active && c.ue_ip == ip) return &c;
    return nullptr;
}

const UEContext* ContextView::by_imsi(const std::string& imsi) const {
    auto it = by_imsi_.find(imsi);
    return it == by_imsi_.end() ? nullptr : &it->second;
}

std::vector<UEContext> ContextView::all() const {
    std::vector<UEContext> out;
    for (const auto& [k, c] : by_imsi_) out.push_back(c);
    return out;
}

Manager::Manager(Transport& net, EndpointId id, ManagerConfig cfg) : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

std::optional<UEContext> Manager::context(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = contexts_.find(imsi);
    if (it == contexts_.end()) return std::nullopt;
    return it->second;
}

std::vector<UEContext> Manager::contexts() const {
    std::lock_guard lk(mu_);
    std::vector<UEContext> out;
    for (const auto& [k, c] : contexts_) out.push_back(c);
    return out;
}

std::set<EndpointId> Manager::watchers(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = watch_.find(imsi);
    return it == watch_.end() ? std::set<EndpointId>{} : it->second;
}

void Manager::sync(const UEContext& ctx) {
    fed::ContextSync msg{{cfg_.network_id, cfg_.network_id, next_corr()}, ctx.imsi, ctx.teid, ctx.ue_ip,
                         ctx.home_plmn, ctx.active};
    emit(cfg_.oidc, msg);
    for (const auto& app : cfg_.apps) emit(app, msg);
}

void Manager::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<s1::InitialUEMessage>(&msg)) {
        pending_[m->enb_ue_id] = m->imsi;
    } else if (const auto* m = std::get_if<s1::InitialContextSetupRequest>(&msg)) {
        auto p = pending_.find(m->enb_ue_id);
        if (p == pending_.end()) {
            ++orphans_;
            note("OrphanContext: enb_ue_id " + std::to_string(m->enb_ue_id));
            return;
        }
        std::string imsi = p->second;
        pending_.erase(p);
        std::erase_if(by_enb_id_, [&](const auto& kv) { return kv.second == imsi; });
        UEContext ctx{imsi, m->teid, m->ue_ip, plmn_of(imsi), true, now()};
        contexts_[imsi] = ctx;
        by_enb_id_[m->enb_ue_id] = imsi;
        mark(id() + ".context_setup");
        sync(ctx);
        if (cfg_.prefetch_subscription && plmn_of(imsi) != cfg_.plmn)
            emit(cfg_.ds, fed::SubscriptionFetchReq{{cfg_.network_id, cfg_.network_id, next_corr()}, imsi});
        if (auto w = watch_.find(imsi); w != watch_.end()) {
            for (const auto& requester : w->second)
                emit(requester, fed::UEArrivalNotice{{cfg_.network_id, cfg_.network_id, next_corr()}, imsi,
                                                     cfg_.network_id});
            watch_.erase(w);
        }
    } else if (const auto* m = std::get_if<s1::UEContextRelease>(&msg)) {
        auto p = by_enb_id_.find(m->enb_ue_id);
        if (p == by_enb_id_.end()) {
            pending_.erase(m->enb_ue_id);
            return;
        }
        auto& ctx = contexts_.at(p->second);
        by_enb_id_.erase(p);
        ctx.active = false;
        sync(ctx);
    } else if (const auto* m = std::get_if<s1::UEContextModification>(&msg)) {
        auto p = by_enb_id_.find(m->enb_ue_id);
        if (p == by_enb_id_.end()) return;
        auto& ctx = contexts_.at(p->second);
        ctx.ue_ip = m->ue_ip;
        ctx.teid = m->teid;
        sync(ctx);
    } else if (const auto* m = std::get_if<fed::WatchRequest>(&msg)) {
        watch_[m->user_id].insert(d.from);
        mark(id() + ".watch_request");
    } else if (std::holds_alternative<fed::SubscriptionFetchResp>(msg)) {
        // prefetch answer; the datastore keeps the entry
    } else if (msg.index() > 6) {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
