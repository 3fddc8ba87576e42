#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fs3a/wire/bytes.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::netsim {

using EndpointId = std::string;

struct Link {
    EndpointId a;
    EndpointId b;
    double latency_ms = 0.0;     // one-way
    double bandwidth_mbps = 1.0; // > 0
    bool connection_established = false;
    double ready_at_ms = 0.0; // end of the connection-setup round trip
};

// latency + serialization delay, plus one connection-setup round trip when the
// link carries its first frame.
double transfer_time(const Link& link, std::size_t payload_bytes, bool first_use);

// Undirected links, at most one per endpoint pair.
class Topology {
public:
    Link& add_link(const EndpointId& a, const EndpointId& b, double latency_ms, double bandwidth_mbps);
    Link* find(const EndpointId& a, const EndpointId& b);
    const Link* find(const EndpointId& a, const EndpointId& b) const;
    std::vector<const Link*> links() const;
    // Forgets established connections on every link touching `id`.
    void reset_endpoint(const EndpointId& id);
    // Marks every link matching `pred` as already connected.
    template <class Pred>
    void establish_if(Pred pred) {
        for (auto& [k, l] : links_)
            if (pred(l)) l.connection_established = true;
    }

private:
    static std::pair<EndpointId, EndpointId> key(const EndpointId& a, const EndpointId& b) {
        return a < b ? std::pair{a, b} : std::pair{b, a};
    }
    std::map<std::pair<EndpointId, EndpointId>, Link> links_;
};

struct Delivery {
    EndpointId from;
    EndpointId to;
    Ipv4 src_addr; // sender's address as seen by the receiver
    Bytes frame;
    double sent_at_ms = 0.0;
    double deliver_at_ms = 0.0;
    std::uint64_t seq = 0;
};

struct TraceRecord {
    std::uint64_t seq = 0;
    double sent_at_ms = 0.0;
    double deliver_at_ms = 0.0;
    EndpointId from;
    EndpointId to;
    std::uint8_t msg_type = 0;
    std::size_t bytes = 0;
    bool first_use = false;

    bool operator==(const TraceRecord&) const = default;
};

class Node {
public:
    virtual ~Node() = default;
    virtual void on_frame(const Delivery& delivery) = 0;
};

// What entities see of the network. Two implementations: the virtual-clock
// Scheduler and the LoopbackTransport over localhost sockets.
class Transport {
public:
    virtual ~Transport() = default;

    virtual double now_ms() const = 0;
    virtual void attach(const EndpointId& id, Node* node) = 0;
    // Throws Error{NoRoute} when the pair is not linked.
    virtual void send(const EndpointId& from, const EndpointId& to, Bytes frame) = 0;
    // Sends with a forged source address (for attack scenarios).
    virtual void send_spoofed(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) = 0;
    // Runs `fn` after `delay_ms` of simulated time (entity processing).
    virtual void defer(double delay_ms, std::function<void()> fn) = 0;
    virtual double run_until_idle() = 0;
    virtual std::vector<TraceRecord> trace() const = 0;

    void set_address(const EndpointId& id, Ipv4 addr);
    Ipv4 address(const EndpointId& id) const;

    Topology& topology() { return topology_; }
    const Topology& topology() const { return topology_; }

    void send_message(const EndpointId& from, const EndpointId& to, const Message& msg);

protected:
    Topology topology_;
    std::map<EndpointId, Ipv4> addresses_;
};

} // namespace fs3a::netsim
