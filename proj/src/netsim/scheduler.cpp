#include "fs3a/netsim/scheduler.hpp"

#include <algorithm>

#include "fs3a/error.hpp"
#include "fs3a/wire/codec.hpp"

namespace fs3a::netsim {

double transfer_time(const Link& link, std::size_t payload_bytes, bool first_use) {
    double t = link.latency_ms + static_cast<double>(payload_bytes) * 8.0 / (link.bandwidth_mbps * 1000.0);
    if (first_use) t += 2.0 * link.latency_ms;
    return t;
}

Link& Topology::add_link(const EndpointId& a, const EndpointId& b, double latency_ms, double bandwidth_mbps) {
    if (a == b) throw Error(Errc::ConfigError, "self link " + a);
    if (latency_ms < 0.0 || !(bandwidth_mbps > 0.0)) throw Error(Errc::ConfigError, "bad link " + a + "<->" + b);
    auto k = key(a, b);
    Link link{k.first, k.second, latency_ms, bandwidth_mbps, false};
    auto [it, inserted] = links_.insert_or_assign(k, link);
    return it->second;
}

Link* Topology::find(const EndpointId& a, const EndpointId& b) {
    auto it = links_.find(key(a, b));
    return it == links_.end() ? nullptr : &it->second;
}

const Link* Topology::find(const EndpointId& a, const EndpointId& b) const {
    auto it = links_.find(key(a, b));
    return it == links_.end() ? nullptr : &it->second;
}

std::vector<const Link*> Topology::links() const {
    std::vector<const Link*> out;
    for (const auto& [k, l] : links_) out.push_back(&l);
    return out;
}

void Topology::reset_endpoint(const EndpointId& id) {
    for (auto& [k, l] : links_) {
        if (l.a == id || l.b == id) {
            l.connection_established = false;
            l.ready_at_ms = 0.0;
        }
    }
}

void Transport::set_address(const EndpointId& id, Ipv4 addr) { addresses_[id] = addr; }

Ipv4 Transport::address(const EndpointId& id) const {
    auto it = addresses_.find(id);
    return it == addresses_.end() ? Ipv4{} : it->second;
}

void Transport::send_message(const EndpointId& from, const EndpointId& to, const Message& msg) {
    send(from, to, wire::encode_frame(msg));
}

void Scheduler::send(const EndpointId& from, const EndpointId& to, Bytes frame) {
    enqueue(from, to, std::move(frame), address(from));
}

void Scheduler::send_spoofed(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) {
    enqueue(from, to, std::move(frame), src_addr);
}

void Scheduler::enqueue(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) {
    Link* link = topology_.find(from, to);
    if (link == nullptr) {
        ++no_route_;
        throw Error(Errc::NoRoute, from + " -> " + to);
    }
    bool first_use = !link->connection_established;
    double at;
    if (first_use) {
        at = now_ms_ + transfer_time(*link, frame.size(), true);
        link->ready_at_ms = now_ms_ + 2.0 * link->latency_ms;
        link->connection_established = true;
    } else {
        // Frames queued behind a handshake still in progress wait for it.
        at = std::max(now_ms_, link->ready_at_ms) + transfer_time(*link, frame.size(), false);
    }

    std::uint64_t seq = next_seq_++;
    std::uint8_t type = frame.size() > 4 ? frame[4] : 0;
    trace_.push_back(TraceRecord{seq, now_ms_, at, from, to, type, frame.size(), first_use});
    ++sent_;
    queue_.push(Event{at, seq, Delivery{from, to, src_addr, std::move(frame), now_ms_, at, seq}, {}});
}

void Scheduler::defer(double delay_ms, std::function<void()> fn) {
    if (delay_ms <= 0.0) {
        fn();
        return;
    }
    double at = now_ms_ + delay_ms;
    queue_.push(Event{at, next_seq_++, Delivery{}, std::move(fn)});
}

void Scheduler::deliver(Event ev) {
    now_ms_ = ev.deliver_at_ms;
    if (ev.timer) {
        ev.timer();
        return;
    }
    ++delivered_;
    auto it = nodes_.find(ev.delivery.to);
    if (it != nodes_.end() && it->second != nullptr) it->second->on_frame(ev.delivery);
}

double Scheduler::run_until_idle() {
    std::uint64_t processed = 0;
    while (!queue_.empty()) {
        if (++processed > event_cap_) throw Error(Errc::LivelockGuard, "event cap exceeded");
        Event ev = queue_.top();
        queue_.pop();
        deliver(std::move(ev));
    }
    return now_ms_;
}

void Scheduler::advance_to(double t) {
    std::uint64_t processed = 0;
    while (!queue_.empty() && queue_.top().deliver_at_ms <= t) {
        if (++processed > event_cap_) throw Error(Errc::LivelockGuard, "event cap exceeded");
        Event ev = queue_.top();
        queue_.pop();
        deliver(std::move(ev));
    }
    if (t > now_ms_) now_ms_ = t;
}

} // namespace fs3a::netsim
