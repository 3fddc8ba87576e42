#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <map>
#include <memory>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "fs3a/netsim/transport.hpp"

namespace fs3a::netsim {

// Real stream sockets on 127.0.0.1. Each attached endpoint gets a listening
// socket and a serving thread per inbound connection; outbound connections are
// opened on first use and kept. Link latency/bandwidth are not emulated;
// processing delays are, in wall-clock time.
//
// Socket framing: u16 sender-id length, sender id, u32 source address, then the
// protocol frame itself (which is already length-prefixed).
class LoopbackTransport final : public Transport {
public:
    // base_port 0 lets the kernel pick ports.
    explicit LoopbackTransport(std::uint16_t base_port = 0);
    ~LoopbackTransport() override;

    LoopbackTransport(const LoopbackTransport&) = delete;
    LoopbackTransport& operator=(const LoopbackTransport&) = delete;

    double now_ms() const override;
    void attach(const EndpointId& id, Node* node) override;
    void send(const EndpointId& from, const EndpointId& to, Bytes frame) override;
    void send_spoofed(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) override;
    // Blocks until no frame is in flight or being handled. Throws
    // Error{IoFailure} after `timeout`.
    // Runs `fn` on a timer thread after `delay_ms`; counts as in flight.
    void defer(double delay_ms, std::function<void()> fn) override;
    double run_until_idle() override;
    std::vector<TraceRecord> trace() const override;

    void set_idle_timeout(std::chrono::milliseconds t) { idle_timeout_ = t; }
    std::uint16_t port_of(const EndpointId& id) const;

private:
    struct Endpoint {
        EndpointId id;
        Node* node = nullptr;
        int listen_fd = -1;
        std::uint16_t port = 0;
        std::mutex handler_mu; // one handler at a time per entity
        std::thread acceptor;
    };
    struct Outbound {
        int fd = -1;
        std::mutex mu;
    };

    void accept_loop(Endpoint* ep);
    void serve(Endpoint* ep, int fd);
    void transmit(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr);
    void finish_one();

    std::uint16_t base_port_;
    std::chrono::steady_clock::time_point start_;
    std::chrono::milliseconds idle_timeout_{10000};

    mutable std::mutex mu_; // guards endpoints_, outbound_, trace_, seq_
    std::map<EndpointId, std::unique_ptr<Endpoint>> endpoints_;
    std::map<std::pair<EndpointId, EndpointId>, std::unique_ptr<Outbound>> outbound_;
    std::vector<TraceRecord> trace_;
    std::uint64_t seq_ = 0;

    std::mutex serve_mu_;
    std::vector<std::thread> servers_;
    std::vector<int> server_fds_;

    std::mutex idle_mu_;
    std::condition_variable idle_cv_;
    std::int64_t in_flight_ = 0;
    std::exception_ptr handler_error_;
    std::atomic<bool> stopping_{false};
    std::mutex stop_mu_;
    std::condition_variable stop_cv_;
};

} // namespace fs3a::netsim
