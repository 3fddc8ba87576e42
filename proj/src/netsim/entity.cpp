#include "fs3a/netsim/entity.hpp"

#include <algorithm>
#include <cstdio>

#include "fs3a/wire/codec.hpp"

namespace fs3a::netsim {

void Probe::mark(const std::string& key, double t) {
    std::lock_guard lk(mu_);
    marks_.emplace_back(key, t);
}

std::optional<double> Probe::first(const std::string& key) const {
    std::lock_guard lk(mu_);
    for (const auto& [k, t] : marks_)
        if (k == key) return t;
    return std::nullopt;
}

std::optional<double> Probe::last(const std::string& key) const {
    std::lock_guard lk(mu_);
    for (auto it = marks_.rbegin(); it != marks_.rend(); ++it)
        if (it->first == key) return it->second;
    return std::nullopt;
}

std::size_t Probe::count(const std::string& key) const {
    std::lock_guard lk(mu_);
    return static_cast<std::size_t>(
        std::count_if(marks_.begin(), marks_.end(), [&](const auto& m) { return m.first == key; }));
}

std::vector<std::pair<std::string, double>> Probe::all() const {
    std::lock_guard lk(mu_);
    return marks_;
}

void Probe::clear() {
    std::lock_guard lk(mu_);
    marks_.clear();
}

namespace {
thread_local const Entity* t_handling = nullptr;
thread_local double t_delay = 0.0;
} // namespace

Entity::Entity(Transport& net, EndpointId id) : net_(net), id_(std::move(id)) { net_.attach(id_, this); }

double Entity::processing_for(std::string_view msg_name) const {
    auto it = processing_.find(std::string(msg_name));
    if (it != processing_.end()) return it->second;
    it = processing_.find("*");
    return it == processing_.end() ? 0.0 : it->second;
}

void Entity::on_frame(const Delivery& d) {
    std::lock_guard lk(mu_);
    auto res = wire::decode_frame(d.frame);
    if (!std::holds_alternative<wire::Decoded>(res)) {
        ++malformed_;
        note("malformed frame from " + d.from);
        return;
    }
    const auto& msg = std::get<wire::Decoded>(res).msg;
    // The delay belongs to this handler invocation only; timer callbacks on
    // other threads must not inherit it.
    struct Scope {
        const Entity* prev_entity = t_handling;
        double prev_delay = t_delay;
        Scope(const Entity* e, double d) { t_handling = e, t_delay = d; }
        ~Scope() { t_handling = prev_entity, t_delay = prev_delay; }
    } scope(this, processing_for(msg_name(msg)));
    handle(d, msg);
}

void Entity::emit(const EndpointId& to, const Message& msg) { emit_raw(to, wire::encode_frame(msg)); }

void Entity::emit_raw(const EndpointId& to, Bytes frame) {
    const double delay = t_handling == this ? t_delay : 0.0;
    if (delay > 0.0) {
        net_.defer(delay, [this, to, f = std::move(frame)]() mutable { net_.send(id_, to, std::move(f)); });
    } else {
        net_.send(id_, to, std::move(frame));
    }
}

void Entity::mark(const std::string& key) {
    if (probe_ != nullptr) probe_->mark(key, now());
}

void Entity::note(std::string what) {
    std::lock_guard lk(mu_);
    audit_.push_back(AuditRecord{now(), id_, std::move(what)});
}

std::vector<AuditRecord> Entity::audit() const {
    std::lock_guard lk(mu_);
    return audit_;
}

std::string Entity::next_corr() {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(++corr_counter_));
    return id_ + ":" + buf;
}

} // namespace fs3a::netsim
