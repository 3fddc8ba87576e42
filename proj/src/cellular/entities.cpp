#include "fs3a/cellular/entities.hpp"

#include "fs3a/error.hpp"

namespace fs3a::cellular {

namespace {

template <class M>
void set_enb_ue_id(M& m, std::uint32_t id) {
    if constexpr (requires { m.enb_ue_id; }) m.enb_ue_id = id;
}

std::uint32_t enb_ue_id_of(const Message& msg) {
    return std::visit(
        [](const auto& m) -> std::uint32_t {
            if constexpr (requires { m.enb_ue_id; })
                return m.enb_ue_id;
            else
                return 0;
        },
        msg);
}

bool is_s1(const Message& msg) { return msg.index() <= 6; }

} // namespace

// ---- HSS ----

Hss::Hss(Transport& net, EndpointId id, std::string plmn, std::uint64_t seed)
    : Entity(net, std::move(id)), plmn_(std::move(plmn)), rng_(seed ^ stable_hash(this->id())) {}

void Hss::provision(const std::string& imsi, const SecretKey& k, std::uint64_t sqn, SubscriptionRecord record) {
    std::lock_guard lk(mu_);
    if (!valid_imsi(imsi)) throw Error(Errc::ConfigError, "bad imsi " + imsi);
    subs_[imsi] = Subscriber{k, sqn & kSqnMask, std::move(record), {}};
}

std::vector<AuthVector> Hss::generate_vectors(const std::string& imsi, std::size_t count) {
    std::lock_guard lk(mu_);
    auto it = subs_.find(imsi);
    if (it == subs_.end()) throw Error(Errc::UnknownSubscriber, imsi);
    std::vector<AuthVector> out;
    for (std::size_t i = 0; i < count; ++i) {
        Rand16 rand{};
        for (std::size_t j = 0; j < rand.size(); j += 8) {
            std::uint64_t r = rng_();
            for (std::size_t b = 0; b < 8; ++b) rand[j + b] = static_cast<std::uint8_t>(r >> (8 * b));
        }
        it->second.sqn = (it->second.sqn + 1) & kSqnMask;
        out.push_back(make_vector(it->second.k, rand, it->second.sqn));
    }
    return out;
}

std::optional<SubscriptionRecord> Hss::subscription(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = subs_.find(imsi);
    if (it == subs_.end()) return std::nullopt;
    return it->second.record;
}

std::uint64_t Hss::sqn_of(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = subs_.find(imsi);
    if (it == subs_.end()) throw Error(Errc::UnknownSubscriber, imsi);
    return it->second.sqn;
}

std::string Hss::serving_mme(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    auto it = subs_.find(imsi);
    return it == subs_.end() ? std::string{} : it->second.mme;
}

void Hss::handle(const Delivery& d, const Message& msg) {
    if (const auto* air = std::get_if<s6a::AIR>(&msg)) {
        s6a::AIA aia{air->corr, {}, {}};
        try {
            aia.vectors = generate_vectors(air->imsi, 1);
        } catch (const Error& e) {
            aia.error = std::string(errc_name(e.code()));
        }
        emit(d.from, aia);
    } else if (const auto* ulr = std::get_if<s6a::ULR>(&msg)) {
        s6a::ULA ula{ulr->corr, std::nullopt, {}};
        auto it = subs_.find(ulr->imsi);
        if (it == subs_.end()) {
            ula.error = std::string(errc_name(Errc::UnknownSubscriber));
        } else {
            it->second.mme = ulr->mme_id;
            ula.subscription = it->second.record;
        }
        emit(d.from, ula);
    } else if (const auto* req = std::get_if<fed::SubscriptionFetchReq>(&msg)) {
        fed::SubscriptionFetchResp resp{{req->hdr.dst_net, req->hdr.src_net, req->hdr.corr}, std::nullopt, {}};
        auto rec = subscription(req->imsi);
        if (rec)
            resp.record = *rec;
        else
            resp.error = std::string(errc_name(Errc::UnknownSubscriber));
        emit(d.from, resp);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

// ---- MME ----

Mme::Mme(Transport& net, EndpointId id, MmeConfig cfg) : Entity(net, std::move(id)), cfg_(std::move(cfg)) {}

EndpointId Mme::s6a_target(const std::string& imsi) const {
    return plmn_of(imsi) == cfg_.plmn ? cfg_.hss : cfg_.proxy;
}

Ipv4 Mme::allocate_ip() {
    for (std::uint32_t off = 2; off < cfg_.pool_size + 2; ++off) {
        std::uint32_t v = cfg_.pool_base.value + off;
        if (!used_ips_.contains(v)) {
            used_ips_.insert(v);
            return Ipv4{v};
        }
    }
    throw Error(Errc::InvariantViolation, "ip pool exhausted in " + cfg_.network_id);
}

void Mme::drop(std::uint32_t enb_ue_id) {
    auto it = ctx_.find(enb_ue_id);
    if (it == ctx_.end()) return;
    if (it->second.rec.ue_ip.value != 0) used_ips_.erase(it->second.rec.ue_ip.value);
    ctx_.erase(it);
    std::erase_if(corr_, [&](const auto& kv) { return kv.second == enb_ue_id; });
}

void Mme::release(std::uint32_t enb_ue_id, std::string_view reason) {
    emit(cfg_.enb, s1::UEContextRelease{enb_ue_id, std::string(reason)});
    drop(enb_ue_id);
}

Ipv4 Mme::rotate_ip(const std::string& imsi) {
    std::lock_guard lk(mu_);
    for (auto& [id, c] : ctx_) {
        if (c.rec.imsi != imsi || c.phase != Phase::Active) continue;
        Ipv4 fresh = allocate_ip();
        used_ips_.erase(c.rec.ue_ip.value);
        c.rec.ue_ip = fresh;
        emit(cfg_.enb, s1::UEContextModification{id, c.rec.teid, fresh});
        return fresh;
    }
    throw Error(Errc::NotAttached, imsi);
}

std::optional<Mme::UeRecord> Mme::find(const std::string& imsi) const {
    std::lock_guard lk(mu_);
    for (const auto& [id, c] : ctx_)
        if (c.rec.imsi == imsi && c.phase == Phase::Active) return c.rec;
    return std::nullopt;
}

std::vector<Mme::UeRecord> Mme::active() const {
    std::lock_guard lk(mu_);
    std::vector<UeRecord> out;
    for (const auto& [id, c] : ctx_)
        if (c.phase == Phase::Active) out.push_back(c.rec);
    return out;
}

void Mme::handle(const Delivery& d, const Message& msg) {
    if (const auto* m = std::get_if<s1::InitialUEMessage>(&msg)) {
        // A stale context for the same subscriber is torn down first.
        for (auto it = ctx_.begin(); it != ctx_.end();) {
            auto next = std::next(it);
            if (it->second.rec.imsi == m->imsi) drop(it->first);
            it = next;
        }
        Context c;
        c.rec.imsi = m->imsi;
        c.rec.enb_ue_id = m->enb_ue_id;
        ctx_[m->enb_ue_id] = c;
        auto corr = next_corr();
        corr_[corr] = m->enb_ue_id;
        emit(s6a_target(m->imsi), s6a::AIR{corr, m->imsi, cfg_.plmn});
    } else if (const auto* m = std::get_if<s6a::AIA>(&msg)) {
        auto cit = corr_.find(m->corr);
        if (cit == corr_.end()) {
            note("CorrelationLost: AIA " + m->corr);
            return;
        }
        auto id = cit->second;
        corr_.erase(cit);
        auto& c = ctx_.at(id);
        if (!m->error.empty()) {
            release(id, m->error);
            return;
        }
        c.xres = m->vectors.front().xres;
        c.phase = Phase::Challenge;
        emit(cfg_.enb, s1::AuthenticationRequest{id, m->vectors.front().rand, m->vectors.front().autn});
    } else if (const auto* m = std::get_if<s1::AuthenticationResponse>(&msg)) {
        auto it = ctx_.find(m->enb_ue_id);
        if (it == ctx_.end() || it->second.phase != Phase::Challenge) {
            note("unexpected AuthenticationResponse");
            return;
        }
        if (m->res != it->second.xres) {
            release(m->enb_ue_id, errc_name(Errc::ResFailure));
            return;
        }
        it->second.phase = Phase::UpdateLocation;
        auto corr = next_corr();
        corr_[corr] = m->enb_ue_id;
        emit(s6a_target(it->second.rec.imsi), s6a::ULR{corr, it->second.rec.imsi, id()});
    } else if (const auto* m = std::get_if<s6a::ULA>(&msg)) {
        auto cit = corr_.find(m->corr);
        if (cit == corr_.end()) {
            note("CorrelationLost: ULA " + m->corr);
            return;
        }
        auto id = cit->second;
        corr_.erase(cit);
        if (!m->error.empty()) {
            release(id, m->error);
            return;
        }
        auto& c = ctx_.at(id);
        c.rec.subscription = m->subscription;
        c.rec.ue_ip = allocate_ip();
        c.rec.teid = next_teid_++;
        if (next_teid_ == 0) next_teid_ = 1;
        c.phase = Phase::Active;
        emit(cfg_.enb, s1::InitialContextSetupRequest{id, c.rec.teid, c.rec.ue_ip});
    } else if (std::holds_alternative<s1::InitialContextSetupResponse>(msg)) {
        // Bearer confirmed; nothing further in this model.
    } else if (const auto* m = std::get_if<s1::UEContextRelease>(&msg)) {
        drop(m->enb_ue_id);
    } else {
        note("unexpected " + std::string(msg_name(msg)) + " from " + d.from);
    }
}

// ---- eNB ----

Enb::Enb(Transport& net, EndpointId id, EndpointId mme, EndpointId mgr)
    : Entity(net, std::move(id)), mme_(std::move(mme)), mgr_(std::move(mgr)) {}

void Enb::handle(const Delivery& d, const Message& msg) {
    if (!is_s1(msg)) {
        note("non-S1 " + std::string(msg_name(msg)) + " from " + d.from);
        return;
    }
    if (d.from == mme_) {
        auto id = enb_ue_id_of(msg);
        auto it = ue_of_.find(id);
        if (it == ue_of_.end()) {
            note("no UE for enb_ue_id " + std::to_string(id));
            return;
        }
        EndpointId ue = it->second;
        emit(mgr_, msg);
        emit(ue, msg);
        if (std::holds_alternative<s1::UEContextRelease>(msg)) {
            id_of_.erase(ue);
            ue_of_.erase(id);
        }
        return;
    }

    Message up = msg;
    std::uint32_t id = 0;
    if (std::holds_alternative<s1::InitialUEMessage>(msg)) {
        if (auto old = id_of_.find(d.from); old != id_of_.end()) ue_of_.erase(old->second);
        id = ++next_id_;
        ue_of_[id] = d.from;
        id_of_[d.from] = id;
    } else {
        auto it = id_of_.find(d.from);
        if (it == id_of_.end()) {
            note("S1 from unknown UE " + d.from);
            return;
        }
        id = it->second;
    }
    std::visit([id](auto& m) { set_enb_ue_id(m, id); }, up);
    emit(mme_, up);
    emit(mgr_, up);
    if (std::holds_alternative<s1::UEContextRelease>(up)) {
        ue_of_.erase(id);
        id_of_.erase(d.from);
    }
}

// ---- UE ----

Ue::Ue(Transport& net, SimCredential cred) : Entity(net, "ue/" + cred.imsi), cred_(std::move(cred)) {}

void Ue::attach(const std::string& network_id, const EndpointId& enb) {
    std::lock_guard lk(mu_);
    if (attached_ || attaching_) throw Error(Errc::InvariantViolation, id() + " already attached");
    network_ = network_id;
    enb_ = enb;
    attaching_ = true;
    failure_.reset();
    result_.reset();
    attach_start_ = now();
    mark(id() + ".attach_start");
    emit(enb_, s1::InitialUEMessage{0, cred_.imsi});
}

void Ue::detach() {
    std::lock_guard lk(mu_);
    if (!attached_) throw Error(Errc::NotAttached, id());
    emit(enb_, s1::UEContextRelease{0, "detach"});
    attached_ = false;
    ip_ = Ipv4{};
    net_.set_address(id(), ip_);
    // Every connection the UE held dies with its address.
    net_.topology().reset_endpoint(id());
    mark(id() + ".detach");
}

void Ue::handle(const Delivery& d, const Message& msg) {
    if (!is_s1(msg)) {
        if (client_ != nullptr) client_->on_app_message(*this, d, msg);
        return;
    }
    if (const auto* m = std::get_if<s1::AuthenticationRequest>(&msg)) {
        try {
            auto res = ue_answer_challenge(cred_, m->rand, m->autn);
            emit(enb_, s1::AuthenticationResponse{0, res});
        } catch (const Error& e) {
            failure_ = e.code();
            attaching_ = false;
            note(std::string(errc_name(e.code())));
            emit(enb_, s1::UEContextRelease{0, std::string(errc_name(e.code()))});
        }
    } else if (const auto* m = std::get_if<s1::InitialContextSetupRequest>(&msg)) {
        // Bearer and address setup take the UE's processing time for this
        // message; the attach completes only after it.
        auto done = [this, teid = m->teid, ip = m->ue_ip] {
            std::lock_guard lk(mu_);
            if (!attaching_) return;
            attaching_ = false;
            attached_ = true;
            ip_ = ip;
            net_.set_address(id(), ip_);
            result_ = AttachResult{cred_.imsi, teid, ip, network_, {{"U1", attach_start_, now()}}};
            mark(id() + ".attached");
            emit(enb_, s1::InitialContextSetupResponse{});
            if (client_ != nullptr) client_->on_attached(*this);
        };
        const double settle = processing_for(msg_name(msg));
        if (settle > 0.0)
            after(settle, done);
        else
            done();
    } else if (const auto* m = std::get_if<s1::UEContextRelease>(&msg)) {
        attaching_ = false;
        attached_ = false;
        failure_ = errc_from_name(m->reason).value_or(Errc::NotAttached);
        note("released: " + m->reason);
    } else if (const auto* m = std::get_if<s1::UEContextModification>(&msg)) {
        ip_ = m->ue_ip;
        net_.set_address(id(), ip_);
        net_.topology().reset_endpoint(id());
        if (result_) result_->ue_ip = ip_;
    } else {
        note("unexpected " + std::string(msg_name(msg)));
    }
}

} // namespace fs3a::cellular
