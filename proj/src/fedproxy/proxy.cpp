#include "fs3a/fedproxy/proxy.hpp"

#include <algorithm>

#include "fs3a/error.hpp"

namespace fs3a::fedproxy {

namespace {

const fed::Header* header_of(const Message& msg) {
    return std::visit(
        [](const auto& m) -> const fed::Header* {
            if constexpr (requires { m.hdr; })
                return &m.hdr;
            else
                return nullptr;
        },
        msg);
}

bool is_mec_request(const Message& msg) {
    return std::holds_alternative<fed::SubscriptionFetchReq>(msg) || std::holds_alternative<fed::StateFetchReq>(msg);
}

bool is_mec_response(const Message& msg) {
    return std::holds_alternative<fed::SubscriptionFetchResp>(msg) || std::holds_alternative<fed::StateFetchResp>(msg);
}

} // namespace

void RoutingTable::register_network(const std::string& network_id, const std::string& plmn_prefix,
                                    const EndpointId& address) {
    if (!valid_id(network_id)) throw Error(Errc::ConfigError, "bad network id " + network_id);
    auto owner = prefix_owner_.find(plmn_prefix);
    if (owner != prefix_owner_.end() && owner->second != network_id)
        throw Error(Errc::DuplicatePrefix, plmn_prefix + " already held by " + owner->second);
    if (auto old = by_net_.find(network_id); old != by_net_.end() && old->second.plmn_prefix != plmn_prefix)
        prefix_owner_.erase(old->second.plmn_prefix);
    by_net_[network_id] = Route{network_id, plmn_prefix, address};
    prefix_owner_[plmn_prefix] = network_id;
    ++generation_;
}

const Route* RoutingTable::by_network(const std::string& network_id) const {
    auto it = by_net_.find(network_id);
    return it == by_net_.end() ? nullptr : &it->second;
}

const Route* RoutingTable::by_plmn(const std::string& plmn_prefix) const {
    auto it = prefix_owner_.find(plmn_prefix);
    return it == prefix_owner_.end() ? nullptr : by_network(it->second);
}

bool RoutingTable::has_address(const EndpointId& address) const {
    return std::any_of(by_net_.begin(), by_net_.end(), [&](const auto& kv) { return kv.second.address == address; });
}

std::vector<Route> RoutingTable::routes() const {
    std::vector<Route> out;
    for (const auto& [k, r] : by_net_) out.push_back(r);
    return out;
}

std::string_view kind_name(VirtualCounterpart::Kind k) {
    switch (k) {
    case VirtualCounterpart::Kind::Hss: return "HSS";
    case VirtualCounterpart::Kind::Mme: return "MME";
    case VirtualCounterpart::Kind::Amc: return "AMC";
    case VirtualCounterpart::Kind::MecManager: return "MECManager";
    }
    return "?";
}

Proxy::Proxy(netsim::Transport& net, EndpointId id, ProxyConfig cfg) : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

void Proxy::register_network(const std::string& network_id, const std::string& plmn_prefix, const EndpointId& address) {
    std::lock_guard lk(mu_);
    routes_.register_network(network_id, plmn_prefix, address);
    if (network_id == cfg_.network_id) return;
    using K = VirtualCounterpart::Kind;
    for (K k : {K::Hss, K::Mme, K::Amc, K::MecManager}) {
        VirtualCounterpart c{k, network_id};
        if (std::find(counterparts_.begin(), counterparts_.end(), c) == counterparts_.end()) counterparts_.push_back(c);
    }
}

void Proxy::announce(const EndpointId& peer) {
    std::lock_guard lk(mu_);
    fed::NetworkRegister reg{{cfg_.network_id, cfg_.network_id, next_corr()}, cfg_.network_id, cfg_.plmn, id()};
    emit(peer, reg);
}

std::vector<VirtualCounterpart> Proxy::counterparts() const {
    std::lock_guard lk(mu_);
    return counterparts_;
}

bool Proxy::is_local(const EndpointId& from) const {
    return from == cfg_.mme || from == cfg_.hss || from == cfg_.ds || from == cfg_.amc;
}

void Proxy::forward(const EndpointId& to, const Delivery& d) {
    ++relayed_;
    emit_raw(to, d.frame);
}

void Proxy::answer(const Delivery& d, const Message& msg) {
    std::string corr = std::visit(
        [](const auto& m) -> std::string {
            if constexpr (requires { m.hdr; })
                return m.hdr.corr;
            else if constexpr (requires { m.corr; })
                return m.corr;
            else
                return {};
        },
        msg);
    auto it = pending_.find(corr);
    if (it == pending_.end()) {
        note("CorrelationLost: " + std::string(msg_name(msg)) + " " + corr + " from " + d.from);
        return;
    }
    EndpointId to = it->second.reply_to;
    pending_.erase(it);
    forward(to, d);
}

void Proxy::unroutable(const Delivery& d, const Message& msg, const std::string& why) {
    note("UnroutableRealm: " + std::string(msg_name(msg)) + " from " + d.from + ": " + why);
    const std::string err(errc_name(Errc::UnroutableRealm));
    if (const auto* m = std::get_if<s6a::AIR>(&msg)) {
        emit(d.from, s6a::AIA{m->corr, {}, err});
    } else if (const auto* m = std::get_if<s6a::ULR>(&msg)) {
        emit(d.from, s6a::ULA{m->corr, std::nullopt, err});
    } else if (const auto* m = std::get_if<fed::SubscriptionFetchReq>(&msg)) {
        emit(d.from, fed::SubscriptionFetchResp{{cfg_.network_id, m->hdr.src_net, m->hdr.corr}, std::nullopt, err});
    } else if (const auto* m = std::get_if<fed::StateFetchReq>(&msg)) {
        emit(d.from, fed::StateFetchResp{{cfg_.network_id, m->hdr.src_net, m->hdr.corr}, std::nullopt, err});
    }
}

void Proxy::relay_s6a_request(const Delivery& d, const Message& msg, const std::string& corr,
                              const std::string& imsi) {
    EndpointId next;
    if (d.from == cfg_.mme) {
        const Route* r = routes_.by_plmn(plmn_of(imsi));
        if (r == nullptr || r->network_id == cfg_.network_id) return unroutable(d, msg, "no realm for " + imsi);
        next = r->address;
    } else if (routes_.has_address(d.from)) {
        if (plmn_of(imsi) != cfg_.plmn) return unroutable(d, msg, imsi + " is not homed here");
        next = cfg_.hss;
    } else {
        ++dropped_;
        note("s6a request from " + d.from + " dropped");
        return;
    }
    pending_[corr] = Pending{++next_pending_, d.from};
    forward(next, d);
}

void Proxy::relay_mec(const Delivery& d, const Message& msg) {
    const fed::Header& hdr = *header_of(msg);
    EndpointId next;
    if (is_local(d.from)) {
        const Route* r = routes_.by_network(hdr.dst_net);
        if (r == nullptr || r->network_id == cfg_.network_id)
            return unroutable(d, msg, "no route to " + hdr.dst_net);
        next = r->address;
    } else {
        if (hdr.dst_net != cfg_.network_id) return unroutable(d, msg, "not for " + cfg_.network_id);
        if (std::holds_alternative<fed::SubscriptionFetchReq>(msg)) {
            next = cfg_.ds;
        } else if (std::holds_alternative<fed::StateFetchReq>(msg) || std::holds_alternative<fed::MobilityAdvertise>(msg)) {
            next = cfg_.amc;
        } else {
            ++dropped_;
            note("no counterpart for " + std::string(msg_name(msg)));
            return;
        }
    }
    if (is_mec_request(msg)) pending_[hdr.corr] = Pending{++next_pending_, d.from};
    forward(next, d);
}

void Proxy::handle(const Delivery& d, const Message& msg) {
    if (const auto* reg = std::get_if<fed::NetworkRegister>(&msg)) {
        if (!cfg_.peers.contains(d.from)) {
            ++dropped_;
            note("isolation: NetworkRegister from non-member " + d.from);
            return;
        }
        try {
            register_network(reg->network_id, reg->plmn_prefix, d.from);
        } catch (const Error& e) {
            note(std::string(errc_name(e.code())) + ": " + e.what());
        }
        return;
    }
    if (!is_local(d.from) && !routes_.has_address(d.from)) {
        ++dropped_;
        note("isolation: dropped " + std::string(msg_name(msg)) + " from " + d.from);
        return;
    }
    if (const auto* m = std::get_if<s6a::AIR>(&msg)) {
        relay_s6a_request(d, msg, m->corr, m->imsi);
    } else if (const auto* m = std::get_if<s6a::ULR>(&msg)) {
        relay_s6a_request(d, msg, m->corr, m->imsi);
    } else if (std::holds_alternative<s6a::AIA>(msg) || std::holds_alternative<s6a::ULA>(msg) || is_mec_response(msg)) {
        answer(d, msg);
    } else if (is_mec_request(msg) || std::holds_alternative<fed::MobilityAdvertise>(msg)) {
        relay_mec(d, msg);
    } else {
        ++dropped_;
        note("not relayable: " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

} // namespace fs3a::fedproxy
