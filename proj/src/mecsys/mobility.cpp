#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

// ---- AMS ----

Ams::Ams(Transport& net, EndpointId id, AmsConfig cfg) : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

std::vector<MobilityWatch> Ams::watches() const {
    std::lock_guard lk(mu_);
    std::vector<MobilityWatch> out;
    for (const auto& [k, w] : watches_)
        if (now() - w.created_at_ms < cfg_.watch_ttl_ms) out.push_back(w);
    return out;
}

std::optional<AppState> Ams::cached(const std::string& user_id, const std::string& app_id) const {
    std::lock_guard lk(mu_);
    auto it = cache_.find({user_id, app_id});
    if (it == cache_.end()) return std::nullopt;
    return it->second;
}

void Ams::expire() {
    std::erase_if(watches_, [&](const auto& kv) {
        if (now() - kv.second.created_at_ms < cfg_.watch_ttl_ms) return false;
        note("watch expired: " + kv.first.first + "/" + kv.first.second);
        return true;
    });
}

void Ams::reply(const Waiter& w, const std::optional<AppState>& st, std::string_view error) {
    fed::StateFetchResp resp{{cfg_.network_id, w.hdr.src_net, w.hdr.corr}, std::nullopt, std::string(error)};
    if (error.empty()) resp.state = st;
    emit(w.reply_to, resp);
}

bool Ams::start_fetch(const Key& key) {
    if (fetch_of_.contains(key)) return true;
    const MobilityWatch* w = nullptr;
    if (auto a = arrived_.find(key); a != arrived_.end())
        w = &a->second;
    else if (auto b = watches_.find(key); b != watches_.end())
        w = &b->second;
    if (w == nullptr) return false;
    auto corr = next_corr();
    fetches_[corr] = Fetch{key, {}};
    fetch_of_[key] = corr;
    ++remote_fetches_;
    mark(id() + ".fetch_start");
    emit(cfg_.amc, fed::StateFetchReq{{cfg_.network_id, w->source_network, corr}, key.first, key.second});
    return true;
}

void Ams::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<fed::MobilityAdvertise>(&msg)) {
        if (d.from != cfg_.amc) {
            emit(cfg_.amc, *m);
            return;
        }
        expire();
        watches_[{m->user_id, m->app_id}] =
            MobilityWatch{m->user_id, m->app_id, m->source_network, m->source_platform, now()};
        emit(cfg_.mgr, fed::WatchRequest{{cfg_.network_id, cfg_.network_id, next_corr()}, m->user_id, id()});
    } else if (const auto* m = std::get_if<fed::UEArrivalNotice>(&msg)) {
        expire();
        mark(id() + ".arrival");
        std::vector<Key> hit;
        for (const auto& [k, w] : watches_)
            if (k.first == m->user_id) hit.push_back(k);
        for (const auto& k : hit) {
            arrived_[k] = watches_.at(k);
            watches_.erase(k);
            if (cfg_.prefetch) start_fetch(k);
        }
    } else if (const auto* m = std::get_if<fed::StateFetchReq>(&msg)) {
        Waiter w{d.from, m->hdr};
        Key key{m->user_id, m->app_id};
        if (d.from == cfg_.amc) {
            // Source side: ask the application's state interface.
            auto app = cfg_.apps.find(m->app_id);
            if (app == cfg_.apps.end()) return reply(w, std::nullopt, errc_name(Errc::SourceStateGone));
            auto corr = next_corr();
            serving_[corr] = w;
            emit(app->second, fed::StateFetchReq{{cfg_.network_id, cfg_.network_id, corr}, m->user_id, m->app_id});
            return;
        }
        if (auto c = cache_.find(key); c != cache_.end()) return reply(w, c->second, {});
        if (auto f = fetch_of_.find(key); f != fetch_of_.end()) {
            fetches_.at(f->second).waiters.push_back(w);
            return;
        }
        expire();
        if (!start_fetch(key)) return reply(w, std::nullopt, errc_name(Errc::StaleWatch));
        fetches_.at(fetch_of_.at(key)).waiters.push_back(w);
    } else if (const auto* m = std::get_if<fed::StateFetchResp>(&msg)) {
        if (auto s = serving_.find(m->hdr.corr); s != serving_.end()) {
            Waiter w = s->second;
            serving_.erase(s);
            fed::StateFetchResp resp{{cfg_.network_id, w.hdr.src_net, w.hdr.corr}, m->state, m->error};
            emit(w.reply_to, resp);
            return;
        }
        auto it = fetches_.find(m->hdr.corr);
        if (it == fetches_.end()) return note("CorrelationLost: StateFetchResp " + m->hdr.corr);
        Fetch f = std::move(it->second);
        fetches_.erase(it);
        fetch_of_.erase(f.key);
        mark(id() + ".fetch_end");
        if (m->error.empty() && m->state) {
            auto& cur = cache_[f.key];
            if (cur.user_id.empty() || m->state->version > cur.version) cur = *m->state;
            arrived_.erase(f.key);
            for (const auto& w : f.waiters) reply(w, cur, {});
        } else {
            for (const auto& w : f.waiters) reply(w, std::nullopt, m->error);
        }
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

// ---- AMC ----

Amc::Amc(Transport& net, EndpointId id, AmcConfig cfg) : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

void Amc::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<fed::MobilityAdvertise>(&msg)) {
        if (d.from == cfg_.proxy) return emit(cfg_.ams, *m);
        if (cfg_.neighbors.empty()) note("NoNeighbors: advertise for " + m->user_id + " not sent");
        for (const auto& n : cfg_.neighbors) {
            fed::MobilityAdvertise out = *m;
            out.hdr = {cfg_.network_id, n, next_corr()};
            ++advertised_;
            emit(cfg_.proxy, out);
        }
    } else if (const auto* m = std::get_if<fed::StateFetchReq>(&msg)) {
        const bool inbound = d.from == cfg_.proxy;
        pending_[m->hdr.corr] = d.from;
        emit_raw(inbound ? cfg_.ams : cfg_.proxy, d.frame);
    } else if (const auto* m = std::get_if<fed::StateFetchResp>(&msg)) {
        auto it = pending_.find(m->hdr.corr);
        if (it == pending_.end()) return note("CorrelationLost: StateFetchResp " + m->hdr.corr);
        EndpointId to = it->second;
        pending_.erase(it);
        emit_raw(to, d.frame);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
