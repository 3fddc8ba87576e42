#include <cmath>
#include <cstdio>

#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

AppServer::AppServer(Transport& net, EndpointId id, AppServerConfig cfg)
    : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

std::uint64_t AppServer::update_state(const std::string& session_id, Bytes blob) {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end() || it->second.frozen) throw Error(Errc::NoSession, session_id);
    const auto& imsi = it->second.imsi;
    auto& st = states_[imsi];
    st.user_id = imsi;
    st.app_id = cfg_.app_id;
    ++st.version;
    st.blob = std::move(blob);
    st.updated_at_ms = static_cast<std::uint64_t>(std::floor(now()));
    ready_.insert(imsi);
    // The cloud store pulls from whichever platform last registered as holder.
    if (!cfg_.cloud_store.empty())
        emit(cfg_.cloud_store, fed::MobilityAdvertise{{cfg_.network_id, cfg_.network_id, next_corr()}, imsi,
                                                      cfg_.app_id, cfg_.network_id, cfg_.network_id});
    return st.version;
}

std::optional<AppState> AppServer::state(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = states_.find(imsi);
    if (it == states_.end()) return std::nullopt;
    return it->second;
}

std::optional<Session> AppServer::session(const std::string& session_id) const {
    std::lock_guard lk(mu_);
    auto it = sessions_.find(session_id);
    if (it == sessions_.end()) return std::nullopt;
    return it->second;
}

std::vector<Session> AppServer::sessions() const {
    std::lock_guard lk(mu_);
    std::vector<Session> out;
    for (const auto& [k, s] : sessions_) out.push_back(s);
    return out;
}

void AppServer::evict(const std::string& imsi) {
    std::lock_guard lk(mu_);
    states_.erase(imsi);
    ready_.erase(imsi);
}

void AppServer::serve(const EndpointId& ue) { emit(ue, app::Data{Bytes(cfg_.response_bytes, 0x5a)}); }

void AppServer::advertise(const std::string& imsi) {
    mark(id() + ".advertise");
    emit(cfg_.ams, fed::MobilityAdvertise{{cfg_.network_id, cfg_.network_id, next_corr()}, imsi, cfg_.app_id,
                                          cfg_.network_id, cfg_.network_id});
}

void AppServer::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<fed::ContextSync>(&msg)) {
        view_.apply(*m, now());
        if (!m->active)
            for (auto& [k, s] : sessions_)
                if (s.imsi == m->imsi) s.frozen = true;
    } else if (const auto* m = std::get_if<app::LoginStart>(&msg)) {
        if (m->app_id != cfg_.app_id)
            return emit(d.from, app::AppError{"LoginStart", std::string(errc_name(Errc::AudienceMismatch))});
        emit(d.from, app::AuthRedirect{cfg_.idp, cfg_.app_id});
    } else if (const auto* m = std::get_if<app::TokenPresent>(&msg)) {
        auto corr = next_corr();
        logins_[corr] = d.from;
        emit(cfg_.idp, app::TokenValidateReq{corr, cfg_.app_id, m->token, d.src_addr});
    } else if (const auto* m = std::get_if<app::TokenValidateResp>(&msg)) {
        auto it = logins_.find(m->corr);
        if (it == logins_.end()) return note("CorrelationLost: TokenValidateResp " + m->corr);
        EndpointId ue = it->second;
        logins_.erase(it);
        if (!m->error.empty()) return emit(ue, app::AppError{"TokenPresent", m->error});
        char sid[64];
        std::snprintf(sid, sizeof sid, "%s-%s-%06llu", cfg_.network_id.c_str(), cfg_.app_id.c_str(),
                      static_cast<unsigned long long>(++next_session_));
        sessions_[sid] = Session{sid, m->subject, cfg_.app_id, cfg_.network_id, false};
        emit(ue, app::LoginOk{sid});
        if (cfg_.advertise_on_login) advertise(m->subject);
    } else if (const auto* m = std::get_if<app::Resume>(&msg)) {
        auto it = sessions_.find(m->session_id);
        if (it == sessions_.end() || it->second.frozen)
            return emit(d.from, app::AppError{"Resume", std::string(errc_name(Errc::NoSession))});
        const auto imsi = it->second.imsi;
        if (ready_.contains(imsi)) return serve(d.from);
        mark(id() + ".demand");
        if (auto f = fetch_of_.find(imsi); f != fetch_of_.end()) {
            fetches_[f->second].waiting.push_back(d.from);
            return;
        }
        auto corr = next_corr();
        fetches_[corr] = PendingFetch{imsi, {d.from}};
        fetch_of_[imsi] = corr;
        if (cfg_.state_source == cfg_.cloud_store) mark(id() + ".cloud_fetch_start");
        emit(cfg_.state_source,
             fed::StateFetchReq{{cfg_.network_id, cfg_.network_id, corr}, imsi, cfg_.app_id});
    } else if (const auto* m = std::get_if<fed::StateFetchResp>(&msg)) {
        auto it = fetches_.find(m->hdr.corr);
        if (it == fetches_.end()) return note("CorrelationLost: StateFetchResp " + m->hdr.corr);
        PendingFetch f = std::move(it->second);
        fetches_.erase(it);
        fetch_of_.erase(f.imsi);
        if (d.from == cfg_.cloud_store) mark(id() + ".cloud_fetch_end");
        if (!m->error.empty() || !m->state) {
            for (const auto& ue : f.waiting) emit(ue, app::AppError{"Resume", m->error});
            return;
        }
        auto& cur = states_[f.imsi];
        if (cur.user_id.empty() || m->state->version > cur.version) cur = *m->state;
        ready_.insert(f.imsi);
        mark(id() + ".state_ready");
        for (const auto& ue : f.waiting) serve(ue);
    } else if (const auto* m = std::get_if<fed::StateFetchReq>(&msg)) {
        // State interface for the local AMS.
        fed::StateFetchResp resp{{cfg_.network_id, m->hdr.src_net, m->hdr.corr}, std::nullopt, {}};
        auto st = states_.find(m->user_id);
        if (m->app_id != cfg_.app_id || st == states_.end())
            resp.error = errc_name(Errc::SourceStateGone);
        else
            resp.state = st->second;
        emit(d.from, resp);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
