#include "fs3a/netsim/loopback.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "fs3a/error.hpp"
#include "fs3a/wire/codec.hpp"

namespace fs3a::netsim {
namespace {

bool write_all(int fd, const std::uint8_t* p, std::size_t n) {
    while (n > 0) {
        ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
        if (w < 0 && errno == EINTR) continue;
        if (w <= 0) return false;
        p += w;
        n -= static_cast<std::size_t>(w);
    }
    return true;
}

bool read_all(int fd, std::uint8_t* p, std::size_t n) {
    while (n > 0) {
        ssize_t r = ::recv(fd, p, n, 0);
        if (r < 0 && errno == EINTR) continue;
        if (r <= 0) return false;
        p += r;
        n -= static_cast<std::size_t>(r);
    }
    return true;
}

std::uint32_t be32(const std::uint8_t* p) {
    return (std::uint32_t{p[0]} << 24) | (std::uint32_t{p[1]} << 16) | (std::uint32_t{p[2]} << 8) | p[3];
}

void put32(Bytes& out, std::uint32_t v) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

sockaddr_in localhost(std::uint16_t port) {
    sockaddr_in a{};
    a.sin_family = AF_INET;
    a.sin_port = htons(port);
    a.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    return a;
}

} // namespace

LoopbackTransport::LoopbackTransport(std::uint16_t base_port)
    : base_port_(base_port), start_(std::chrono::steady_clock::now()) {}

LoopbackTransport::~LoopbackTransport() {
    {
        std::lock_guard sl(stop_mu_);
        stopping_ = true;
    }
    stop_cv_.notify_all();
    {
        std::lock_guard lk(mu_);
        for (auto& [id, ep] : endpoints_) {
            if (ep->listen_fd >= 0) ::shutdown(ep->listen_fd, SHUT_RDWR);
        }
        for (auto& [k, ob] : outbound_) {
            if (ob->fd >= 0) ::shutdown(ob->fd, SHUT_RDWR);
        }
    }
    {
        std::lock_guard lk(serve_mu_);
        for (int fd : server_fds_) ::shutdown(fd, SHUT_RDWR);
    }
    for (auto& [id, ep] : endpoints_) {
        if (ep->acceptor.joinable()) ep->acceptor.join();
        if (ep->listen_fd >= 0) ::close(ep->listen_fd);
    }
    std::vector<std::thread> servers;
    {
        std::lock_guard lk(serve_mu_);
        servers.swap(servers_);
    }
    for (auto& t : servers) t.join();
    for (int fd : server_fds_) ::close(fd);
    for (auto& [k, ob] : outbound_) {
        if (ob->fd >= 0) ::close(ob->fd);
    }
}

double LoopbackTransport::now_ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
}

void LoopbackTransport::attach(const EndpointId& id, Node* node) {
    std::lock_guard lk(mu_);
    auto& slot = endpoints_[id];
    if (slot) {
        slot->node = node;
        return;
    }
    auto ep = std::make_unique<Endpoint>();
    ep->id = id;
    ep->node = node;
    ep->listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (ep->listen_fd < 0) throw Error(Errc::IoFailure, "socket: " + std::string(std::strerror(errno)));
    int one = 1;
    ::setsockopt(ep->listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    std::uint16_t want = base_port_ == 0 ? 0 : static_cast<std::uint16_t>(base_port_ + endpoints_.size() - 1);
    auto addr = localhost(want);
    if (::bind(ep->listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(ep->listen_fd, 64) != 0) {
        int e = errno;
        ::close(ep->listen_fd);
        endpoints_.erase(id);
        throw Error(Errc::IoFailure, "bind " + id + ": " + std::strerror(e));
    }
    socklen_t len = sizeof addr;
    ::getsockname(ep->listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    ep->port = ntohs(addr.sin_port);
    Endpoint* raw = ep.get();
    ep->acceptor = std::thread([this, raw] { accept_loop(raw); });
    slot = std::move(ep);
}

std::uint16_t LoopbackTransport::port_of(const EndpointId& id) const {
    std::lock_guard lk(mu_);
    auto it = endpoints_.find(id);
    return it == endpoints_.end() ? 0 : it->second->port;
}

void LoopbackTransport::accept_loop(Endpoint* ep) {
    while (!stopping_) {
        int fd = ::accept(ep->listen_fd, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR) continue;
            return;
        }
        std::lock_guard lk(serve_mu_);
        if (stopping_) {
            ::close(fd);
            return;
        }
        server_fds_.push_back(fd);
        servers_.emplace_back([this, ep, fd] { serve(ep, fd); });
    }
}

void LoopbackTransport::serve(Endpoint* ep, int fd) {
    for (;;) {
        std::uint8_t h2[2];
        if (!read_all(fd, h2, 2)) return;
        std::size_t id_len = (std::size_t{h2[0]} << 8) | h2[1];
        std::string from(id_len, '\0');
        if (!read_all(fd, reinterpret_cast<std::uint8_t*>(from.data()), id_len)) return;
        std::uint8_t a4[4];
        if (!read_all(fd, a4, 4)) return;
        Bytes frame(wire::kHeaderSize);
        if (!read_all(fd, frame.data(), 4)) return;
        std::uint32_t length = be32(frame.data());
        if (length == 0 || length > wire::kMaxFrameLength) return;
        frame.resize(4 + length);
        if (!read_all(fd, frame.data() + 4, length)) return;

        Delivery d;
        d.from = std::move(from);
        d.to = ep->id;
        d.src_addr = Ipv4{be32(a4)};
        d.frame = std::move(frame);
        d.deliver_at_ms = now_ms();
        {
            std::lock_guard hl(ep->handler_mu);
            try {
                if (ep->node != nullptr) ep->node->on_frame(d);
            } catch (...) {
                std::lock_guard il(idle_mu_);
                if (!handler_error_) handler_error_ = std::current_exception();
            }
        }
        finish_one();
    }
}

void LoopbackTransport::defer(double delay_ms, std::function<void()> fn) {
    if (delay_ms <= 0.0) return fn();
    {
        std::lock_guard il(idle_mu_);
        ++in_flight_;
    }
    std::lock_guard lk(serve_mu_);
    servers_.emplace_back([this, delay_ms, fn = std::move(fn)] {
        {
            std::unique_lock sl(stop_mu_);
            stop_cv_.wait_for(sl, std::chrono::duration<double, std::milli>(delay_ms), [this] { return stopping_.load(); });
        }
        if (!stopping_) {
            try {
                fn();
            } catch (...) {
                std::lock_guard il(idle_mu_);
                if (!handler_error_) handler_error_ = std::current_exception();
            }
        }
        finish_one();
    });
}

void LoopbackTransport::finish_one() {
    std::lock_guard lk(idle_mu_);
    if (--in_flight_ == 0) idle_cv_.notify_all();
}

void LoopbackTransport::send(const EndpointId& from, const EndpointId& to, Bytes frame) {
    transmit(from, to, std::move(frame), address(from));
}

void LoopbackTransport::send_spoofed(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) {
    transmit(from, to, std::move(frame), src_addr);
}

void LoopbackTransport::transmit(const EndpointId& from, const EndpointId& to, Bytes frame, Ipv4 src_addr) {
    Outbound* ob = nullptr;
    std::uint16_t port = 0;
    {
        std::lock_guard lk(mu_);
        Link* link = topology_.find(from, to);
        auto ep = endpoints_.find(to);
        if (link == nullptr || ep == endpoints_.end()) throw Error(Errc::NoRoute, from + " -> " + to);
        bool first = !link->connection_established;
        link->connection_established = true;
        double t = now_ms();
        trace_.push_back(TraceRecord{seq_++, t, t, from, to, frame.size() > 4 ? frame[4] : std::uint8_t{0},
                                     frame.size(), first});
        auto& slot = outbound_[{from, to}];
        if (!slot) slot = std::make_unique<Outbound>();
        ob = slot.get();
        port = ep->second->port;
    }

    Bytes out;
    out.reserve(2 + from.size() + 4 + frame.size());
    out.push_back(static_cast<std::uint8_t>(from.size() >> 8));
    out.push_back(static_cast<std::uint8_t>(from.size()));
    out.insert(out.end(), from.begin(), from.end());
    put32(out, src_addr.value);
    out.insert(out.end(), frame.begin(), frame.end());

    {
        std::lock_guard il(idle_mu_);
        ++in_flight_;
    }
    std::lock_guard ol(ob->mu);
    if (ob->fd < 0) {
        int fd = ::socket(AF_INET, SOCK_STREAM, 0);
        auto addr = localhost(port);
        if (fd < 0 || ::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            int e = errno;
            if (fd >= 0) ::close(fd);
            finish_one();
            throw Error(Errc::IoFailure, "connect " + to + ": " + std::strerror(e));
        }
        int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        ob->fd = fd;
    }
    if (!write_all(ob->fd, out.data(), out.size())) {
        finish_one();
        throw Error(Errc::IoFailure, "write " + from + " -> " + to);
    }
}

double LoopbackTransport::run_until_idle() {
    std::unique_lock lk(idle_mu_);
    bool ok = idle_cv_.wait_for(lk, idle_timeout_, [this] { return in_flight_ == 0; });
    if (handler_error_) {
        auto e = handler_error_;
        handler_error_ = nullptr;
        std::rethrow_exception(e);
    }
    if (!ok) throw Error(Errc::IoFailure, "loopback transport did not go idle");
    return now_ms();
}

std::vector<TraceRecord> LoopbackTransport::trace() const {
    std::lock_guard lk(mu_);
    return trace_;
}

} // namespace fs3a::netsim
