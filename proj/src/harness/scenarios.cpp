#include "fs3a/harness/scenarios.hpp"

#include <cctype>
#include <random>
#include <sstream>

#include "fs3a/error.hpp"

namespace fs3a::harness {

namespace {

// First mark of `key` at or after t0.
std::optional<double> first_after(const netsim::Probe& p, const std::string& key, double t0) {
    for (const auto& [k, t] : p.all())
        if (k == key && t >= t0) return t;
    return std::nullopt;
}

std::optional<double> last_after(const netsim::Probe& p, const std::string& key, double t0) {
    auto t = p.last(key);
    if (t && *t >= t0) return t;
    return std::nullopt;
}

Bytes state_blob(std::size_t size, std::uint64_t seed) {
    Bytes b(size);
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < size; i += 8) {
        auto r = rng();
        for (std::size_t j = 0; j < 8 && i + j < size; ++j) b[i + j] = static_cast<std::uint8_t>(r >> (8 * j));
    }
    return b;
}

std::string describe_failure(const mecsys::UeAgent& agent, const cellular::Ue& ue) {
    std::string s = "ue " + ue.imsi();
    if (!ue.attached()) s += " not attached";
    if (ue.failure()) s += " failure=" + std::string(errc_name(*ue.failure()));
    for (const auto& e : agent.errors()) s += " " + e.context + ":" + e.code;
    if (agent.session_id().empty()) s += " no session";
    return s;
}

} // namespace

Toggles toggles_for_code(const std::string& code) {
    if (code.size() != 3 || (code[0] != 'C' && code[0] != 'M') || (code[1] != 'U' && code[1] != 'P') ||
        (code[2] != 'A' && code[2] != 'T'))
        throw Error(Errc::ConfigMismatch, "unknown scenario code '" + code + "'");
    Toggles t;
    t.auth = code[0] == 'C' ? AuthPlace::Cloud : AuthPlace::Mec;
    t.subscription_prefetch = code[1] == 'P';
    t.token_reuse = code[2] == 'T';
    return t;
}

std::string code_for(const Toggles& t) {
    std::string s;
    s += t.auth == AuthPlace::Cloud ? 'C' : 'M';
    s += t.subscription_prefetch ? 'P' : 'U';
    s += t.token_reuse ? 'T' : 'A';
    return s;
}

LatencyReport run_move(const ScenarioConfig& cfg, const Toggles& t, const MoveOptions& opt, const std::string& name) {
    Federation fed(cfg, t, opt.transport);
    const auto& sub = cfg.subscriber();
    const auto& app = cfg.app();
    const std::string home = cfg.home().id;
    const std::string visited = cfg.visited().id;
    auto& ue = fed.ue(sub.imsi);
    auto& agent = fed.agent(sub.imsi);
    auto& H = fed.network(home);
    auto& V = fed.network(visited);
    auto& probe = fed.probe();

    // Setup at home: attach, log in, publish state; the home app advertises
    // the session to the neighbours.
    agent.set_plan(mecsys::UePlan{ep::app(home, app.id), app.id, true, {}, false, 0.0});
    fed.attach(sub.imsi, home);
    if (!ue.attached() || agent.session_id().empty())
        throw Error(Errc::InvariantViolation, "home login failed: " + describe_failure(agent, ue));
    const std::size_t size = opt.state_bytes != 0 ? opt.state_bytes : app.state_size_bytes;
    H.apps.at(app.id)->update_state(agent.session_id(), state_blob(size, cfg.seed));
    fed.run();
    const std::string home_token = agent.token();

    // The move.
    const double t0 = fed.net().now_ms();
    const std::size_t trace_from = fed.net().trace().size();
    agent.reset_outcome();
    agent.set_plan(mecsys::UePlan{ep::app(visited, app.id), app.id, true, t.token_reuse ? home_token : std::string{},
                                  opt.resume, opt.resume_delay_ms});
    ue.detach();
    ue.attach(visited, ep::enb(visited));
    fed.run();
    if (!ue.attached() || agent.session_id().empty() || !agent.errors().empty() || (opt.resume && !agent.data()))
        throw Error(Errc::InvariantViolation, name + ": move did not complete: " + describe_failure(agent, ue));

    LatencyReport r;
    r.scenario = name;
    const std::string u = ue.id();
    auto need = [&](const std::string& key) {
        auto v = last_after(probe, key, t0);
        if (!v) throw Error(Errc::InvariantViolation, name + ": missing mark " + key);
        return *v - t0;
    };
    auto span_of = [&](const std::string& a, const std::string& b) -> std::optional<Span> {
        auto x = first_after(probe, a, t0);
        auto y = last_after(probe, b, t0);
        if (!x || !y) return std::nullopt;
        return Span{*x - t0, *y - t0};
    };
    r.stages["U1"] = Span{need(u + ".attach_start"), need(u + ".attached")};
    r.stages["U2"] = Span{r.stages["U1"].end_ms, need(u + ".login_ok")};
    if (opt.resume) r.stages["U3"] = Span{need(u + ".resume_sent"), need(u + ".data")};
    if (auto s = span_of(V.ds->id() + ".remote_fetch_start", V.ds->id() + ".remote_fetch_end")) r.stages["M1"] = *s;
    const auto& vapp = *V.apps.at(app.id);
    if (t.state_path == StatePath::Cloud) {
        if (auto s = span_of(vapp.id() + ".cloud_fetch_start", vapp.id() + ".cloud_fetch_end")) r.stages["M2"] = *s;
    } else if (auto s = span_of(V.ams->id() + ".fetch_start", V.ams->id() + ".fetch_end")) {
        r.stages["M2"] = *s;
    }
    if (auto s = span_of(vapp.id() + ".advertise", H.mgr->id() + ".watch_request")) r.stages["M3"] = *s;

    auto instant = [&](const std::string& label, const std::string& key) {
        if (auto v = first_after(probe, key, t0)) r.instants[label] = *v - t0;
    };
    instant("context_setup", V.mgr->id() + ".context_setup");
    instant("entitlement_query", V.oidc->id() + ".entitlement_query");
    instant("state_demand", vapp.id() + ".demand");
    instant("state_ready", vapp.id() + ".state_ready");

    r.auth_latency = r.stages["U2"].duration();
    if (r.instants.contains("state_demand") && r.instants.contains("state_ready"))
        r.state_transfer_latency = r.instants["state_ready"] - r.instants["state_demand"];
    const Span& last = opt.resume ? r.stages["U3"] : r.stages["U2"];
    r.service_interruption = last.end_ms - r.stages["U1"].start_ms;
    r.segments["attach"] = r.stages["U1"].duration();
    r.segments["auth"] = r.stages["U2"].duration();
    if (opt.resume) {
        r.segments["mec_to_mec"] = r.state_transfer_latency;
        r.segments["mec_to_ue"] = r.stages["U3"].duration() - r.state_transfer_latency;
    }

    auto trace = fed.net().trace();
    r.trace.assign(trace.begin() + static_cast<std::ptrdiff_t>(std::min(trace_from, trace.size())), trace.end());

    r.outcome.token = t.token_reuse ? home_token : agent.token();
    r.outcome.datastore = V.ds->entries();
    r.outcome.delivered = vapp.state(sub.imsi);
    r.outcome.session = vapp.session(agent.session_id());
    return r;
}

LatencyReport run_auth_scenario(const std::string& code, const ScenarioConfig& cfg, TransportKind transport) {
    MoveOptions opt;
    opt.resume = false;
    opt.transport = transport;
    return run_move(cfg, toggles_for_code(code), opt, code);
}

std::vector<LatencyReport> run_all_auth(const ScenarioConfig& cfg, TransportKind transport) {
    std::vector<LatencyReport> out;
    for (const char* code : kAuthCodes) out.push_back(run_auth_scenario(code, cfg, transport));
    return out;
}

std::string sweep_path_name(SweepPath p) {
    switch (p) {
    case SweepPath::Cloud: return "cloud";
    case SweepPath::Proxy: return "proxy";
    case SweepPath::ProxyPrefetch: return "proxy-prefetch";
    }
    return "?";
}

SweepPath parse_sweep_path(const std::string& name) {
    for (auto p : {SweepPath::Cloud, SweepPath::Proxy, SweepPath::ProxyPrefetch})
        if (sweep_path_name(p) == name) return p;
    throw Error(Errc::ConfigError, "unknown path '" + name + "'");
}

Toggles toggles_for_path(SweepPath p) {
    Toggles t = toggles_for_code("MPT");
    t.state_path = p == SweepPath::Cloud ? StatePath::Cloud : StatePath::Proxy;
    t.state_prefetch = p == SweepPath::ProxyPrefetch;
    return t;
}

std::vector<SweepPoint> run_state_sweep(const std::vector<std::size_t>& sizes, const std::vector<SweepPath>& paths,
                                        const ScenarioConfig& cfg, TransportKind transport) {
    std::vector<SweepPoint> out;
    for (auto size : sizes) {
        if (size == 0) throw Error(Errc::ConfigError, "sweep sizes must be positive");
        for (auto p : paths) {
            MoveOptions opt;
            opt.state_bytes = size;
            opt.resume_delay_ms = cfg.sweep_resume_delay_ms;
            opt.transport = transport;
            auto name = "sweep-" + sweep_path_name(p) + "-" + std::to_string(size);
            out.push_back(SweepPoint{size, p, run_move(cfg, toggles_for_path(p), opt, name)});
        }
    }
    return out;
}

Toggles breakdown_toggles(bool optimized) {
    Toggles t = toggles_for_code(optimized ? "MPT" : "MUA");
    t.state_prefetch = optimized;
    return t;
}

Breakdown run_breakdown(const ScenarioConfig& cfg, TransportKind transport) {
    MoveOptions opt;
    opt.transport = transport;
    return Breakdown{run_move(cfg, breakdown_toggles(false), opt, "breakdown-without"),
                     run_move(cfg, breakdown_toggles(true), opt, "breakdown-with")};
}

Toggles interruption_toggles(int scenario) {
    switch (scenario) {
    case 1: {
        Toggles t = toggles_for_code("CUA");
        t.state_path = StatePath::Cloud;
        return t;
    }
    case 2: return toggles_for_code("MUA");
    case 3: {
        Toggles t = toggles_for_code("MPT");
        t.state_prefetch = true;
        return t;
    }
    default: throw Error(Errc::ConfigMismatch, "interruption scenario must be 1, 2 or 3");
    }
}

LatencyReport run_interruption(int scenario, const ScenarioConfig& cfg, TransportKind transport) {
    MoveOptions opt;
    opt.transport = transport;
    return run_move(cfg, interruption_toggles(scenario), opt, "interruption-" + std::to_string(scenario));
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::string s;
        for (char c : item)
            if (!std::isspace(static_cast<unsigned char>(c))) s += static_cast<char>(std::tolower(c));
        if (s.ends_with("b") && s.size() > 1 && !std::isdigit(static_cast<unsigned char>(s[s.size() - 2])))
            s.pop_back(); // "10kb" -> "10k"
        std::size_t mult = 1;
        if (!s.empty() && (s.back() == 'k' || s.back() == 'm')) {
            mult = s.back() == 'k' ? 1024 : 1024 * 1024;
            s.pop_back();
        }
        if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit))
            throw Error(Errc::ConfigError, "bad size '" + item + "'");
        auto v = std::stoull(s) * mult;
        if (v == 0) throw Error(Errc::ConfigError, "sizes must be positive");
        out.push_back(v);
    }
    if (out.empty()) throw Error(Errc::ConfigError, "no sizes given");
    return out;
}

} // namespace fs3a::harness
