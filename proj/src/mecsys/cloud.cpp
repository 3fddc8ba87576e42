#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

// ---- cloud identity provider ----

CloudAuth::CloudAuth(Transport& net, EndpointId id, CloudAuthConfig cfg)
    : Entity(net, std::move(id)), cfg_(std::move(cfg)), rng_(cfg_.seed ^ stable_hash(this->id())) {}

std::vector<IssuedToken> CloudAuth::issued() const {
    std::lock_guard lk(mu_);
    return issued_;
}

const CloudPool* CloudAuth::pool_of(Ipv4 ip) const {
    for (const auto& p : cfg_.pools)
        if (ip.value >= p.base.value && ip.value - p.base.value < p.size) return &p;
    return nullptr;
}

void CloudAuth::handle(const Delivery& d, const Message& msg) {
    const std::string unknown_ip(errc_name(Errc::UnknownSourceIP));
    if (const auto* m = std::get_if<app::OidcAuthRequest>(&msg)) {
        const auto* pool = pool_of(d.src_addr);
        if (pool == nullptr) return emit(d.from, app::OidcAuthResponse{{}, unknown_ip});
        auto corr = next_corr();
        pending_[corr] = Pending{false, d.from, m->client_id, d.src_addr, {}, {}};
        emit(pool->oidc, app::IdentityQuery{corr, m->client_id, d.src_addr});
    } else if (const auto* m = std::get_if<app::TokenValidateReq>(&msg)) {
        AccessToken t;
        try {
            t = check_token(m->token, m->app_id, cfg_.keys, now());
        } catch (const Error& e) {
            return emit(d.from, app::TokenValidateResp{m->corr, {}, std::string(errc_name(e.code()))});
        }
        const auto* pool = pool_of(m->ue_ip);
        if (pool == nullptr)
            return emit(d.from, app::TokenValidateResp{m->corr, {}, std::string(errc_name(Errc::SubjectIpMismatch))});
        auto corr = next_corr();
        pending_[corr] = Pending{true, d.from, m->app_id, m->ue_ip, m->corr, t.subject};
        emit(pool->oidc, app::IdentityQuery{corr, m->app_id, m->ue_ip});
    } else if (const auto* m = std::get_if<app::IdentityAssert>(&msg)) {
        auto it = pending_.find(m->corr);
        if (it == pending_.end()) return note("CorrelationLost: IdentityAssert " + m->corr);
        Pending p = std::move(it->second);
        pending_.erase(it);
        if (p.validate) {
            std::string error = m->error;
            if (error.empty() && m->imsi != p.subject) error = errc_name(Errc::SubjectIpMismatch);
            emit(p.reply_to, app::TokenValidateResp{p.reply_corr, error.empty() ? p.subject : std::string{}, error});
            return;
        }
        if (!m->error.empty()) return emit(p.reply_to, app::OidcAuthResponse{{}, m->error});
        auto key = cfg_.keys.find(p.app_id);
        if (key == cfg_.keys.end())
            return emit(p.reply_to, app::OidcAuthResponse{{}, std::string(errc_name(Errc::ConfigError))});
        auto t = issue_token("cloud", m->imsi, p.app_id, now(), cfg_.token_lifetime_ms, random_nonce(rng_),
                             key->second);
        issued_.push_back(IssuedToken{t, p.ip, now()});
        emit(p.reply_to, app::OidcAuthResponse{t.encode(), {}});
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

// ---- cloud state store ----

CloudStore::CloudStore(Transport& net, EndpointId id) : Entity(net, std::move(id)) {}

std::optional<AppState> CloudStore::stored(const std::string& user_id, const std::string& app_id) const {
    std::lock_guard lk(mu_);
    auto it = states_.find({user_id, app_id});
    if (it == states_.end()) return std::nullopt;
    return it->second;
}

void CloudStore::answer(const EndpointId& to, const fed::Header& req, const fed::StateFetchResp& resp) {
    fed::StateFetchResp r = resp;
    r.hdr = fed::Header{req.dst_net, req.src_net, req.corr};
    emit(to, r);
}

// State is pulled from the registered holder on every fetch so the requester
// gets the latest version; the local copy only backs up a missing holder.
void CloudStore::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<app::StateUpload>(&msg)) {
        auto& cur = states_[{m->state.user_id, m->state.app_id}];
        if (cur.user_id.empty() || m->state.version > cur.version) cur = m->state;
    } else if (const auto* m = std::get_if<fed::MobilityAdvertise>(&msg)) {
        holders_[{m->user_id, m->app_id}] = d.from;
    } else if (const auto* m = std::get_if<fed::StateFetchReq>(&msg)) {
        Key key{m->user_id, m->app_id};
        if (auto p = pull_of_.find(key); p != pull_of_.end()) {
            pulls_[p->second].waiting.emplace_back(d.from, m->hdr);
            return;
        }
        auto h = holders_.find(key);
        if (h == holders_.end() || h->second == d.from) {
            fed::StateFetchResp resp{{}, std::nullopt, {}};
            if (auto it = states_.find(key); it != states_.end())
                resp.state = it->second;
            else
                resp.error = errc_name(Errc::SourceStateGone);
            return answer(d.from, m->hdr, resp);
        }
        auto corr = next_corr();
        pulls_[corr] = Pull{key, {{d.from, m->hdr}}};
        pull_of_[key] = corr;
        emit(h->second, fed::StateFetchReq{{"cloud", m->hdr.src_net, corr}, m->user_id, m->app_id});
    } else if (const auto* m = std::get_if<fed::StateFetchResp>(&msg)) {
        auto it = pulls_.find(m->hdr.corr);
        if (it == pulls_.end()) return note("CorrelationLost: StateFetchResp " + m->hdr.corr);
        Pull p = std::move(it->second);
        pulls_.erase(it);
        pull_of_.erase(p.key);
        fed::StateFetchResp resp = *m;
        if (m->state) {
            auto& cur = states_[p.key];
            if (cur.user_id.empty() || m->state->version > cur.version) cur = *m->state;
            resp.state = cur;
        } else if (auto st = states_.find(p.key); st != states_.end()) {
            resp.state = st->second;
            resp.error.clear();
        }
        for (const auto& [to, hdr] : p.waiting) answer(to, hdr, resp);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
