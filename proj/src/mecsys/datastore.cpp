#include "fs3a/mecsys/entities.hpp"

namespace fs3a::mecsys {

Datastore::Datastore(Transport& net, EndpointId id, DatastoreConfig cfg)
    : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

std::optional<SubscriberEntry> Datastore::entry(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = entries_.find(imsi);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

std::vector<SubscriberEntry> Datastore::entries() const {
    std::lock_guard lk(mu_);
    std::vector<SubscriberEntry> out;
    for (const auto& [k, e] : entries_) out.push_back(e);
    return out;
}

void Datastore::reply(const Waiter& w, const std::optional<SubscriptionRecord>& rec, std::string_view error) {
    fed::SubscriptionFetchResp resp{{cfg_.network_id, w.hdr.src_net, w.hdr.corr}, rec, std::string(error)};
    if (!error.empty()) resp.record.reset();
    emit(w.reply_to, resp);
}

void Datastore::request(const Delivery& d, const fed::SubscriptionFetchReq& req) {
    Waiter w{d.from, req.hdr};
    const bool local = plmn_of(req.imsi) == cfg_.plmn;
    if (d.from == cfg_.proxy && !local) {
        // Another network asked us about a subscriber we do not home.
        return reply(w, std::nullopt, errc_name(Errc::UnknownSubscriber));
    }
    if (auto it = entries_.find(req.imsi); it != entries_.end()) return reply(w, it->second.record, {});

    auto& queue = waiters_[req.imsi];
    queue.push_back(w);
    if (queue.size() > 1) return; // coalesced with the fetch in flight

    auto corr = next_corr();
    if (local) {
        inflight_[corr] = req.imsi;
        ++upstream_;
        emit(cfg_.hss, fed::SubscriptionFetchReq{{cfg_.network_id, cfg_.network_id, corr}, req.imsi});
        return;
    }
    auto home = cfg_.home_of_plmn.find(plmn_of(req.imsi));
    if (home == cfg_.home_of_plmn.end()) {
        auto ws = std::move(queue);
        waiters_.erase(req.imsi);
        for (const auto& x : ws) reply(x, std::nullopt, errc_name(Errc::HomeUnreachable));
        return;
    }
    inflight_[corr] = req.imsi;
    ++upstream_;
    mark(id() + ".remote_fetch_start");
    emit(cfg_.proxy, fed::SubscriptionFetchReq{{cfg_.network_id, home->second, corr}, req.imsi});
}

void Datastore::complete(const std::string& imsi, const fed::SubscriptionFetchResp& resp, bool remote) {
    if (remote) mark(id() + ".remote_fetch_end");
    std::string error = resp.error;
    if (error == errc_name(Errc::UnroutableRealm)) error = errc_name(Errc::HomeUnreachable);
    if (error.empty() && resp.record) {
        auto src = remote ? SubscriberEntry::Source::HomeMecViaProxy : SubscriberEntry::Source::LocalHss;
        entries_[imsi] = SubscriberEntry{imsi, *resp.record, src, now()};
    }
    auto it = waiters_.find(imsi);
    if (it == waiters_.end()) return;
    auto ws = std::move(it->second);
    waiters_.erase(it);
    for (const auto& w : ws) reply(w, resp.record, error);
}

void Datastore::handle(const Delivery& d, const Message& msg) {
    if (const auto* req = std::get_if<fed::SubscriptionFetchReq>(&msg)) {
        request(d, *req);
    } else if (const auto* resp = std::get_if<fed::SubscriptionFetchResp>(&msg)) {
        auto it = inflight_.find(resp->hdr.corr);
        if (it == inflight_.end()) {
            note("CorrelationLost: SubscriptionFetchResp " + resp->hdr.corr);
            return;
        }
        std::string imsi = it->second;
        inflight_.erase(it);
        complete(imsi, *resp, d.from == cfg_.proxy);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::mecsys
