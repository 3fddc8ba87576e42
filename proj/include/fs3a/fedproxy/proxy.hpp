#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "fs3a/netsim/entity.hpp"

namespace fs3a::fedproxy {

using netsim::Delivery;
using netsim::EndpointId;

struct Route {
    std::string network_id;
    std::string plmn_prefix;
    EndpointId address; // the network's proxy endpoint
};

class RoutingTable {
public:
    // Throws Error{DuplicatePrefix} when another network holds the prefix.
    void register_network(const std::string& network_id, const std::string& plmn_prefix, const EndpointId& address);
    const Route* by_network(const std::string& network_id) const;
    const Route* by_plmn(const std::string& plmn_prefix) const;
    bool has_address(const EndpointId& address) const;
    std::uint64_t generation() const { return generation_; }
    std::vector<Route> routes() const;

private:
    std::map<std::string, Route> by_net_;
    std::map<std::string, std::string> prefix_owner_;
    std::uint64_t generation_ = 0;
};

struct VirtualCounterpart {
    enum class Kind { Hss, Mme, Amc, MecManager };
    Kind impersonates;
    std::string for_network;
    bool operator==(const VirtualCounterpart&) const = default;
};

std::string_view kind_name(VirtualCounterpart::Kind k);

struct ProxyConfig {
    std::string network_id;
    std::string plmn;
    EndpointId mme;
    EndpointId hss;
    EndpointId ds;  // MEC datastore (subscription relay)
    EndpointId amc; // mobility relay
    std::set<EndpointId> peers; // proxy endpoints this proxy may talk to
};

// One proxy per network: an S6a relay and a MEC relay behind a shared
// routing table. Frames are forwarded byte for byte; only routing headers
// are read.
class Proxy final : public netsim::Entity {
public:
    Proxy(netsim::Transport& net, EndpointId id, ProxyConfig cfg);

    // Registers a network locally and instantiates its counterparts.
    void register_network(const std::string& network_id, const std::string& plmn_prefix, const EndpointId& address);
    // Sends this network's registration to a peer proxy.
    void announce(const EndpointId& peer);

    const RoutingTable& routes() const { return routes_; }
    std::vector<VirtualCounterpart> counterparts() const;
    std::uint64_t relayed() const { return relayed_; }
    std::uint64_t dropped() const { return dropped_; }
    std::size_t pending() const { return pending_.size(); }

protected:
    void handle(const Delivery& d, const Message& msg) override;

private:
    struct Pending {
        std::uint64_t id; // proxy-local correlation counter
        EndpointId reply_to;
    };

    bool is_local(const EndpointId& from) const;
    void forward(const EndpointId& to, const Delivery& d);
    void answer(const Delivery& d, const Message& msg);
    void unroutable(const Delivery& d, const Message& msg, const std::string& why);
    void relay_s6a_request(const Delivery& d, const Message& msg, const std::string& corr, const std::string& imsi);
    void relay_mec(const Delivery& d, const Message& msg);

    ProxyConfig cfg_;
    RoutingTable routes_;
    std::vector<VirtualCounterpart> counterparts_;
    std::map<std::string, Pending> pending_; // by corr
    std::uint64_t next_pending_ = 0;
    std::uint64_t relayed_ = 0;
    std::uint64_t dropped_ = 0;
};

} // namespace fs3a::fedproxy
