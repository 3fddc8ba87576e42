#pragma once

#include <cstdint>
#include <map>
#include <queue>
#include <vector>

#include "fs3a/netsim/transport.hpp"

namespace fs3a::netsim {

// Deterministic discrete-event transport. Strictly single-threaded: handlers
// run inside run_until_idle and may send further frames.
class Scheduler final : public Transport {
public:
    explicit Scheduler(std::uint64_t event_cap = 1'000'000) : event_cap_(event_cap) {}

    double now_ms() const override { return now_ms_; }
    void attach(const EndpointId& id, Node* node) override { nodes_[id] = node; }
    void send(const EndpointId& from, const EndpointId& to, Bytes frame) override;
    void send_spoofed(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) override;

    void defer(double delay_ms, std::function<void()> fn) override;
    // Processes events in (deliver_at, seq) order. Throws Error{LivelockGuard}
    // once more than event_cap events have been processed in one call.
    double run_until_idle() override;
    // Runs pending events up to `t` and leaves the clock at `t`.
    void advance_to(double t);

    std::vector<TraceRecord> trace() const override { return trace_; }
    void clear_trace() { trace_.clear(); }

    std::uint64_t frames_sent() const { return sent_; }
    std::uint64_t frames_delivered() const { return delivered_; }
    std::uint64_t frames_unroutable() const { return no_route_; }
    bool idle() const { return queue_.empty(); }

private:
    struct Event {
        double deliver_at_ms;
        std::uint64_t seq;
        Delivery delivery;
        std::function<void()> timer; // set for deferred actions instead of frames
    };
    struct Later {
        bool operator()(const Event& x, const Event& y) const {
            if (x.deliver_at_ms != y.deliver_at_ms) return x.deliver_at_ms > y.deliver_at_ms;
            return x.seq > y.seq;
        }
    };

    void enqueue(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr);
    void deliver(Event ev);

    std::uint64_t event_cap_;
    double now_ms_ = 0.0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t sent_ = 0;
    std::uint64_t delivered_ = 0;
    std::uint64_t no_route_ = 0;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::map<EndpointId, Node*> nodes_;
    std::vector<TraceRecord> trace_;
};

} // namespace fs3a::netsim
