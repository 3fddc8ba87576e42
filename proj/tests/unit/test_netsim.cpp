#include <doctest.h>

#include "fs3a/error.hpp"
#include "fs3a/netsim/loopback.hpp"
#include "fs3a/netsim/scheduler.hpp"
#include "fs3a/wire/codec.hpp"

using namespace fs3a;
using namespace fs3a::netsim;

namespace {

struct Recorder : Node {
    std::vector<Delivery> got;
    void on_frame(const Delivery& d) override { got.push_back(d); }
};

struct PingPong : Node {
    Transport* net = nullptr;
    EndpointId self, peer;
    int* exchanges = nullptr;
    int cap = 0;
    void on_frame(const Delivery&) override {
        if (++*exchanges >= cap) return;
        net->send_message(self, peer, app::Data{{}});
    }
};

Errc code_of(auto&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    return Errc::InvariantViolation;
}

} // namespace

TEST_CASE("transfer_time arithmetic") {
    Link cloud{"x", "y", 40.0, 20.0, true};
    CHECK(transfer_time(cloud, 10'000'000, false) == doctest::Approx(4040.0).epsilon(1e-12));
    CHECK(transfer_time(cloud, 0, false) == 40.0);
    Link lan{"x", "y", 10.0, 100.0, false};
    CHECK(transfer_time(lan, 1'000'000, true) == doctest::Approx(110.0).epsilon(1e-12));
}

TEST_CASE("send on an unlinked pair is NoRoute") {
    Scheduler s;
    s.topology().add_link("a", "b", 1, 100);
    CHECK(code_of([&] { s.send("a", "c", Bytes(5)); }) == Errc::NoRoute);
    CHECK(s.frames_unroutable() == 1);
    CHECK(s.frames_sent() == 0);
}

TEST_CASE("delivery time includes serialization and the first-use surcharge once") {
    Scheduler s;
    Recorder r;
    s.attach("b", &r);
    s.topology().add_link("a", "b", 5, 100);
    s.send("a", "b", Bytes(10));
    s.run_until_idle();
    CHECK(r.got.at(0).deliver_at_ms == doctest::Approx(15.0008));
    s.advance_to(100.0);
    CHECK(s.now_ms() == 100.0);
    s.send("a", "b", Bytes(125));
    CHECK(s.run_until_idle() == doctest::Approx(105.01));
}

TEST_CASE("equal-size frames on one link arrive in send order") {
    Scheduler s;
    Recorder r;
    s.attach("b", &r);
    s.topology().add_link("a", "b", 3, 100);
    for (int i = 0; i < 5; ++i) s.send("a", "b", Bytes(8, static_cast<std::uint8_t>(i)));
    s.run_until_idle();
    REQUIRE(r.got.size() == 5);
    for (int i = 0; i < 5; ++i) CHECK(r.got[static_cast<std::size_t>(i)].frame[0] == i);
    CHECK(s.frames_delivered() == s.frames_sent());
}

TEST_CASE("empty queue returns 0") {
    Scheduler s;
    CHECK(s.run_until_idle() == 0.0);
}

TEST_CASE("ping-pong capped at 10 exchanges") {
    Scheduler s;
    s.topology().add_link("p", "q", 2.0, 100.0).connection_established = true;
    int exchanges = 0;
    PingPong p, q;
    p.net = q.net = &s;
    p.self = q.peer = "p";
    q.self = p.peer = "q";
    p.exchanges = q.exchanges = &exchanges;
    p.cap = q.cap = 10;
    s.attach("p", &p);
    s.attach("q", &q);
    s.send_message("p", "q", app::Data{{}});
    double leg = 2.0 + wire::encode_frame(app::Data{{}}).size() * 8.0 / 100000.0;
    CHECK(s.run_until_idle() == doctest::Approx(10 * leg).epsilon(1e-12));
    CHECK(exchanges == 10);
}

TEST_CASE("infinite echo trips the livelock guard") {
    Scheduler s(1000);
    s.topology().add_link("p", "q", 1.0, 100.0);
    int exchanges = 0;
    PingPong p, q;
    p.net = q.net = &s;
    p.self = q.peer = "p";
    q.self = p.peer = "q";
    p.exchanges = q.exchanges = &exchanges;
    p.cap = q.cap = 1 << 30;
    s.attach("p", &p);
    s.attach("q", &q);
    s.send_message("p", "q", app::Data{{}});
    CHECK(code_of([&] { s.run_until_idle(); }) == Errc::LivelockGuard);
}

TEST_CASE("source address comes from the registry unless spoofed") {
    Scheduler s;
    Recorder r;
    s.attach("b", &r);
    s.topology().add_link("a", "b", 1, 100);
    s.set_address("a", Ipv4{0x0a000001});
    s.send("a", "b", Bytes(5));
    s.send_spoofed("a", "b", Bytes(5), Ipv4{0x0a000063});
    s.run_until_idle();
    CHECK(r.got[0].src_addr.value == 0x0a000001u);
    CHECK(r.got[1].src_addr.value == 0x0a000063u);
}

TEST_CASE("trace is identical across identical runs") {
    auto run = [] {
        Scheduler s;
        Recorder r;
        s.attach("b", &r);
        s.topology().add_link("a", "b", 1.5, 50);
        s.topology().add_link("a", "c", 0.5, 50);
        s.send_message("a", "b", app::LoginStart{"game"});
        s.send_message("a", "c", app::Resume{"s1"});
        s.send_message("a", "b", app::Data{Bytes(300)});
        s.run_until_idle();
        return s.trace();
    };
    CHECK(run() == run());
}

TEST_CASE("loopback transport delivers frames over real sockets") {
    LoopbackTransport t;
    int exchanges = 0;
    PingPong p, q;
    p.net = q.net = &t;
    p.self = q.peer = "p";
    q.self = p.peer = "q";
    p.exchanges = q.exchanges = &exchanges;
    p.cap = q.cap = 10;
    t.topology().add_link("p", "q", 2.0, 100.0);
    t.attach("p", &p);
    t.attach("q", &q);
    t.set_address("p", Ipv4{0x0a000001});
    CHECK(t.port_of("p") != 0);
    t.send_message("p", "q", app::Data{Bytes(70000, 7)});
    t.run_until_idle();
    CHECK(exchanges == 10);
    CHECK(t.trace().size() == 10);
    CHECK(code_of([&] { t.send("p", "zz", Bytes(5)); }) == Errc::NoRoute);
}
