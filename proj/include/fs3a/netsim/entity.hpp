#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fs3a/netsim/transport.hpp"
#include "fs3a/wire/messages.hpp"

namespace fs3a::netsim {

// Named instants recorded by entities; the harness turns them into stages.
class Probe {
public:
    void mark(const std::string& key, double t);
    std::optional<double> first(const std::string& key) const;
    std::optional<double> last(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::vector<std::pair<std::string, double>> all() const;
    void clear();

private:
    mutable std::mutex mu_;
    std::vector<std::pair<std::string, double>> marks_;
};

struct AuditRecord {
    double at_ms = 0.0;
    EndpointId entity;
    std::string what;
};

// Base for every protocol actor: decodes frames, dispatches them, and delays
// outgoing frames by the configured processing time of the message in hand.
class Entity : public Node {
public:
    Entity(Transport& net, EndpointId id);
    ~Entity() override = default;

    Entity(const Entity&) = delete;
    Entity& operator=(const Entity&) = delete;

    const EndpointId& id() const { return id_; }
    void on_frame(const Delivery& d) final;

    // Keys are message names ("TokenPresent") or "*" for the fallback.
    void set_processing(std::map<std::string, double> ms) { processing_ = std::move(ms); }
    double processing_for(std::string_view msg_name) const;
    void set_probe(Probe* probe) { probe_ = probe; }

    std::vector<AuditRecord> audit() const;
    std::size_t malformed_frames() const { return malformed_; }

protected:
    virtual void handle(const Delivery& d, const Message& msg) = 0;

    void emit(const EndpointId& to, const Message& msg);
    void emit_raw(const EndpointId& to, Bytes frame);
    void mark(const std::string& key);
    void note(std::string what);
    double now() const { return net_.now_ms(); }
    std::string next_corr();

    Transport& net_;
    mutable std::recursive_mutex mu_;

private:
    EndpointId id_;
    std::map<std::string, double> processing_;
    Probe* probe_ = nullptr;
    std::uint64_t corr_counter_ = 0;
    std::size_t malformed_ = 0;
    std::vector<AuditRecord> audit_;
};

} // namespace fs3a::netsim
