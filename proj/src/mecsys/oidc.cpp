#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

OidcModule::OidcModule(Transport& net, EndpointId id, OidcConfig cfg)
    : Entity(net, std::move(id)), cfg_(std::move(cfg)), rng_(cfg_.seed ^ stable_hash(this->id())) {}

std::string OidcModule::resolve(Ipv4 ip) const {
    const auto* c = view_.by_ip(ip);
    return c == nullptr ? std::string{} : c->imsi;
}

AccessToken OidcModule::authenticate(const std::string& app_id, Ipv4 source_ip,
                                     const std::optional<SubscriptionRecord>& sub) {
    std::lock_guard lk(mu_);
    const auto* ctx = view_.by_ip(source_ip);
    if (ctx == nullptr) throw Error(Errc::UnknownSourceIP, source_ip.to_string());
    if (!sub || sub->imsi != ctx->imsi) throw Error(Errc::SubscriptionPending, ctx->imsi);
    if (!sub->mec_entitlement) throw Error(Errc::NotEntitled, ctx->imsi);
    auto key = cfg_.keys.find(app_id);
    if (key == cfg_.keys.end()) throw Error(Errc::ConfigError, "no key for app " + app_id);
    auto t = issue_token(cfg_.network_id, ctx->imsi, app_id, now(), cfg_.token_lifetime_ms, random_nonce(rng_),
                         key->second);
    issued_.push_back(IssuedToken{t, source_ip, now()});
    return t;
}

std::string OidcModule::validate(const std::string& app_id, std::string_view token, Ipv4 source_ip) const {
    std::lock_guard lk(mu_);
    auto t = check_token(token, app_id, cfg_.keys, now());
    const auto* ctx = view_.by_ip(source_ip);
    if (ctx == nullptr || ctx->imsi != t.subject)
        throw Error(Errc::SubjectIpMismatch, t.subject + " not at " + source_ip.to_string());
    return t.subject;
}

std::vector<IssuedToken> OidcModule::issued() const {
    std::lock_guard lk(mu_);
    return issued_;
}

void OidcModule::ask_datastore(Pending p) {
    auto corr = next_corr();
    mark(id() + ".entitlement_query");
    emit(cfg_.ds, fed::SubscriptionFetchReq{{cfg_.network_id, cfg_.network_id, corr}, p.imsi});
    pending_.emplace(corr, std::move(p));
}

void OidcModule::finish(const Pending& p, const fed::SubscriptionFetchResp& resp) {
    std::string error = resp.error;
    if (error.empty() && resp.record && !resp.record->mec_entitlement) error = errc_name(Errc::NotEntitled);
    switch (p.kind) {
    case Kind::Auth: {
        if (!error.empty()) return emit(p.reply_to, app::OidcAuthResponse{{}, error});
        try {
            auto t = authenticate(p.app_id, p.ip, resp.record);
            emit(p.reply_to, app::OidcAuthResponse{t.encode(), {}});
        } catch (const Error& e) {
            emit(p.reply_to, app::OidcAuthResponse{{}, std::string(errc_name(e.code()))});
        }
        return;
    }
    case Kind::Validate:
        emit(p.reply_to, app::TokenValidateResp{p.reply_corr, error.empty() ? p.imsi : std::string{}, error});
        return;
    case Kind::Identity:
        emit(p.reply_to, app::IdentityAssert{p.reply_corr, error.empty() ? p.imsi : std::string{}, error});
        return;
    }
}

void OidcModule::hold(const Delivery& d, const Message& msg, Ipv4 ip) {
    const auto key = next_hold_++;
    held_.emplace(key, Held{d, msg, ip});
    net_.defer(kUnknownIpHoldMs, [this, key] {
        std::lock_guard lk(mu_);
        auto it = held_.find(key);
        if (it == held_.end()) return;
        Held h = std::move(it->second);
        held_.erase(it);
        dispatch(h.d, h.msg, true);
    });
}

void OidcModule::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<fed::ContextSync>(&msg)) {
        view_.apply(*m, now());
        for (auto it = held_.begin(); it != held_.end();) {
            if (view_.by_ip(it->second.ip) == nullptr) {
                ++it;
                continue;
            }
            Held h = std::move(it->second);
            it = held_.erase(it);
            dispatch(h.d, h.msg, true);
        }
        return;
    }
    dispatch(d, msg, false);
}

void OidcModule::dispatch(const Delivery& d, const Message& msg, bool final) {
    if (const auto* m = std::get_if<app::OidcAuthRequest>(&msg)) {
        auto imsi = resolve(d.src_addr);
        if (imsi.empty()) {
            if (!final) return hold(d, msg, d.src_addr);
            note("UnknownSourceIP: " + d.src_addr.to_string());
            return emit(d.from, app::OidcAuthResponse{{}, std::string(errc_name(Errc::UnknownSourceIP))});
        }
        ask_datastore(Pending{Kind::Auth, d.from, m->client_id, d.src_addr, {}, imsi});
    } else if (const auto* m = std::get_if<app::TokenValidateReq>(&msg)) {
        if (!final && resolve(m->ue_ip).empty()) return hold(d, msg, m->ue_ip);
        std::string subject;
        try {
            subject = validate(m->app_id, m->token, m->ue_ip);
        } catch (const Error& e) {
            note(std::string(errc_name(e.code())) + ": token from " + m->ue_ip.to_string());
            return emit(d.from, app::TokenValidateResp{m->corr, {}, std::string(errc_name(e.code()))});
        }
        ask_datastore(Pending{Kind::Validate, d.from, m->app_id, m->ue_ip, m->corr, subject});
    } else if (const auto* m = std::get_if<app::IdentityQuery>(&msg)) {
        auto imsi = resolve(m->ue_ip);
        if (imsi.empty()) {
            if (!final) return hold(d, msg, m->ue_ip);
            return emit(d.from, app::IdentityAssert{m->corr, {}, std::string(errc_name(Errc::UnknownSourceIP))});
        }
        ask_datastore(Pending{Kind::Identity, d.from, m->app_id, m->ue_ip, m->corr, imsi});
    } else if (const auto* m = std::get_if<fed::SubscriptionFetchResp>(&msg)) {
        auto it = pending_.find(m->hdr.corr);
        if (it == pending_.end()) {
            note("CorrelationLost: SubscriptionFetchResp " + m->hdr.corr);
            return;
        }
        Pending p = std::move(it->second);
        pending_.erase(it);
        finish(p, *m);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
