// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../oracle/flow_oracle.hpp"
#include "../support/golden_samples.hpp"
#include "../support/message_gen.hpp"
#include "fs3a/harness/federation.hpp"
#include "fs3a/harness/scenarios.hpp"
#include "fs3a/mecsys/token.hpp"
#include "fs3a/wire/codec.hpp"

using namespace fs3a;
using namespace fs3a::harness;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances and targets.
constexpr int kRoundTrips = 10'000;
constexpr long kFuzzInputs = 1'000'000;
constexpr double kCodecBudgetS = 30.0;
constexpr double kSuiteBudgetS = 60.0;
constexpr double kOracleTolMs = 1e-6;
constexpr double kTickMs = 1e-6;
constexpr double kRatioTolPp = 10.0;
constexpr double kAuthBandLo = 53.0, kAuthBandHi = 65.0;
constexpr double kSweepTargets[] = {51.4, 80.6, 91.3};
constexpr double kU2Target = 56.3, kU3Target = 28.3;
constexpr double kVs2Target = 33.1, kVs1Target = 73.6;

const std::string kUe = "001010000000001";
const std::string kOtherUe = "001010000000002";

struct Verdict {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
    void info(const std::string& s) { notes.push_back(s); }
};

std::string fmt(double v, int prec = 1) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(prec);
    s << v;
    return s.str();
}

double reduction(double before, double after) { return 100.0 * (before - after) / before; }

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

ScenarioConfig calibrated() { return load_config(FS3A_CONFIG_DIR "/calibrated.json"); }

ScenarioConfig quiet() {
    auto c = default_config();
    c.processing_ms.clear();
    return c;
}

template <class T>
std::size_t count(const std::vector<netsim::TraceRecord>& trace, const std::string& from, const std::string& to) {
    const auto type = msg_type(Message{T{}});
    return static_cast<std::size_t>(std::count_if(trace.begin(), trace.end(), [&](const auto& r) {
        return r.msg_type == type && r.from == from && r.to == to;
    }));
}

std::vector<netsim::TraceRecord> tail(Federation& fed, std::size_t from) {
    auto t = fed.net().trace();
    t.erase(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(std::min(from, t.size())));
    return t;
}

// 1. Codec soundness.
Verdict codec() {
    Verdict v;
    const auto start = Clock::now();
    testing::MessageGen gen(2024);
    std::vector<Bytes> corpus;
    int bad = 0;
    for (int i = 0; i < kRoundTrips; ++i) {
        auto m = gen.any();
        auto bytes = wire::encode_frame(m);
        auto res = wire::decode_frame(bytes);
        const auto* d = std::get_if<wire::Decoded>(&res);
        if (d == nullptr || d->msg != m || d->consumed != bytes.size() || wire::encode_frame(d->msg) != bytes) ++bad;
        if (i % 10 == 0) corpus.push_back(std::move(bytes));
    }
    v.expect(bad == 0, std::to_string(bad) + " round trips differ");

    std::mt19937_64 rng(7);
    long decoded = 0;
    long inconsistent = 0;
    for (long i = 0; i < kFuzzInputs; ++i) {
        Bytes b;
        switch (i % 3) {
        case 0: { // random bytes
            b.resize(rng() % 96);
            for (auto& x : b) x = static_cast<std::uint8_t>(rng());
            break;
        }
        case 1: { // mutated valid frame
            b = corpus[rng() % corpus.size()];
            const int flips = 1 + static_cast<int>(rng() % 4);
            for (int f = 0; f < flips && !b.empty(); ++f) b[rng() % b.size()] ^= static_cast<std::uint8_t>(1u << (rng() % 8));
            if (rng() % 4 == 0) b.resize(rng() % (b.size() + 1));
            break;
        }
        default: { // plausible header, random body
            const auto& src = corpus[rng() % corpus.size()];
            b.resize(5 + rng() % 80);
            for (auto& x : b) x = static_cast<std::uint8_t>(rng() % 4 == 0 ? '=' : (rng() % 3 == 0 ? '\n' : 'a' + rng() % 26));
            const auto len = static_cast<std::uint32_t>(b.size() - 4);
            b[0] = 0, b[1] = 0, b[2] = static_cast<std::uint8_t>(len >> 8), b[3] = static_cast<std::uint8_t>(len);
            b[4] = src[4];
        }
        }
        auto res = wire::decode_frame(b);
        if (const auto* d = std::get_if<wire::Decoded>(&res)) {
            ++decoded;
            if (d->consumed > b.size()) ++inconsistent;
        }
    }
    v.expect(inconsistent == 0, "decoder claimed more bytes than given");

    int golden_bad = 0;
    const auto samples = testing::golden_samples();
    for (const auto& msg : samples) {
        std::ifstream in(std::filesystem::path(FS3A_VECTOR_DIR) / (std::string(msg_name(msg)) + ".bin"), std::ios::binary);
        Bytes stored((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        auto res = wire::decode_frame(stored);
        const auto* d = std::get_if<wire::Decoded>(&res);
        if (!in.good() && stored.empty()) ++golden_bad;
        else if (wire::encode_frame(msg) != stored || d == nullptr || d->msg != msg) ++golden_bad;
    }
    v.expect(golden_bad == 0, std::to_string(golden_bad) + " golden vectors differ");
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    v.expect(secs < kCodecBudgetS, "runtime " + fmt(secs) + " s over budget");
    v.info(std::to_string(kRoundTrips) + " round trips, " + std::to_string(kFuzzInputs) + " fuzz inputs (" +
           std::to_string(decoded) + " decoded), " + std::to_string(samples.size()) + " golden vectors, " + fmt(secs, 2) +
           " s");
    return v;
}

// 2. Roaming AKA.
Verdict roaming_aka() {
    Verdict v;
    auto proxy_s6a = [](const std::vector<netsim::TraceRecord>& t) {
        return std::array<std::size_t, 4>{count<s6a::AIR>(t, "B/proxy", "A/proxy"), count<s6a::AIA>(t, "A/proxy", "B/proxy"),
                                          count<s6a::ULR>(t, "B/proxy", "A/proxy"), count<s6a::ULA>(t, "A/proxy", "B/proxy")};
    };
    std::vector<netsim::TraceRecord> first;
    for (int run = 0; run < 2; ++run) {
        Federation fed(quiet(), Toggles{});
        const auto t0 = fed.net().trace().size();
        fed.attach(kUe, "B");
        auto t = tail(fed, t0);
        v.expect(fed.ue(kUe).attached(), "genuine roaming attach failed");
        v.expect(proxy_s6a(t) == std::array<std::size_t, 4>{1, 1, 1, 1}, "roaming attach: not one AIR/AIA/ULR/ULA");
        if (run == 0) first = t;
        else v.expect(first == t, "roaming attach trace differs between runs");
    }
    {
        Federation fed(quiet(), Toggles{});
        const auto t0 = fed.net().trace().size();
        fed.attach(kUe, "A");
        auto t = tail(fed, t0);
        v.expect(fed.ue(kUe).attached(), "home attach failed");
        std::size_t proxied = 0;
        for (const auto& r : t) proxied += (r.from.ends_with("/proxy") || r.to.ends_with("/proxy"));
        v.expect(proxied == 0, "home attach used the proxy");
    }
    {
        Federation fed(quiet(), Toggles{});
        fed.ue(kUe).credential().k[0] ^= 1;
        const auto t0 = fed.net().trace().size();
        fed.attach(kUe, "B");
        v.expect(!fed.ue(kUe).attached() && fed.ue(kUe).failure() == Errc::NetworkAuthFailure, "wrong key accepted");
        v.expect(count<s6a::ULR>(tail(fed, t0), "B/proxy", "A/proxy") == 0, "location update after failed challenge");
    }
    {
        Federation fed(quiet(), Toggles{});
        fed.ue(kUe).credential().sqn = 1'000'000;
        fed.attach(kUe, "B");
        v.expect(!fed.ue(kUe).attached() && fed.ue(kUe).failure() == Errc::NetworkAuthFailure, "stale sqn accepted");
    }
    v.info("roaming 1/1/1/1 s6a frames over the proxies, home 0, key and sqn failures refused");
    return v;
}

// 3. Identity and token security.
Verdict token_security() {
    Verdict v;
    auto cfg = quiet();
    AppSpec other = cfg.apps.front();
    other.id = "otherapp";
    other.key = Bytes(32, 0x5a);
    cfg.apps.push_back(other);
    const std::string app = cfg.apps.front().id;
    const std::string home_app = "A/app." + app;

    auto present = [&](Federation& fed, const std::string& imsi, const std::string& to, const std::string& token) {
        auto& agent = fed.agent(imsi);
        agent.reset_outcome();
        fed.ue(imsi).send(to, app::TokenPresent{token});
        fed.run();
        return agent.errors().empty() ? std::string{} : agent.errors().back().code;
    };

    Federation fed(cfg, Toggles{});
    fed.agent(kUe).set_plan(mecsys::UePlan{home_app, app, true, {}, false, 0.0});
    fed.attach(kUe, "A");
    const std::string token = fed.agent(kUe).token();
    const std::string sid = fed.agent(kUe).session_id();
    v.expect(!token.empty() && !sid.empty(), "legitimate login failed");
    fed.attach(kOtherUe, "A");

    // (1) spoofed source address
    struct Sink : netsim::Node {
        std::string error;
        void on_frame(const netsim::Delivery& d) override {
            auto res = wire::decode_frame(d.frame);
            if (auto* m = std::get_if<app::OidcAuthResponse>(&std::get<wire::Decoded>(res).msg)) error = m->error;
        }
    } spoofer;
    fed.net().attach("ue/spoofer", &spoofer);
    fed.net().set_address("ue/spoofer", Ipv4::from_octets(10, 1, 0, 250));
    fed.net().topology().add_link("ue/spoofer", "A/oidc", 3, 100);
    fed.net().send_message("ue/spoofer", "A/oidc", app::OidcAuthRequest{app, home_app});
    fed.run();
    v.expect(spoofer.error == "UnknownSourceIP", "spoofed address: got '" + spoofer.error + "'");

    // (2) tampered
    auto tampered = token;
    tampered[tampered.size() - 1] = tampered.back() == 'a' ? 'b' : 'a';
    v.expect(present(fed, kUe, home_app, tampered) == "BadSignature", "tampered token accepted");

    // (3) expired
    std::mt19937_64 rng(3);
    auto old = mecsys::issue_token("A", kUe, app, 0.0, 1, mecsys::random_nonce(rng), cfg.apps.front().key);
    v.expect(present(fed, kUe, home_app, old.encode()) == "Expired", "expired token accepted");

    // (4) audience mismatch
    v.expect(present(fed, kUe, "A/app.otherapp", token) == "AudienceMismatch", "token accepted by another app");

    // (5) replay from another UE's address
    v.expect(present(fed, kOtherUe, home_app, token) == "SubjectIpMismatch", "token accepted from a wrong address");

    // (6) issued in A, accepted in B for the legitimate UE
    fed.network("A").apps.at(app)->update_state(sid, Bytes{1, 2, 3});
    fed.run();
    fed.agent(kUe).reset_outcome();
    fed.agent(kUe).set_plan(mecsys::UePlan{"B/app." + app, app, true, token, true, 0.0});
    fed.ue(kUe).detach();
    fed.ue(kUe).attach("B", "B/enb");
    fed.run();
    v.expect(fed.agent(kUe).errors().empty() && !fed.agent(kUe).session_id().empty() && fed.agent(kUe).data(),
             "token from A refused in B");
    v.expect(fed.network("B").oidc->issued().empty(), "B issued a token despite reuse");
    v.info("6/6 cases");
    return v;
}

// 4. Auth ordering.
Verdict auth_ordering() {
    Verdict v;
    std::map<std::string, double> d;
    for (const auto& r : run_all_auth(default_config())) d[r.scenario] = r.auth_latency;
    const auto best = std::min_element(d.begin(), d.end(), [](auto& a, auto& b) { return a.second < b.second; });
    v.expect(best->first == "MPT", "minimum is " + best->first);
    for (const char* rest : {"UA", "UT", "PA", "PT"})
        v.expect(d[std::string("M") + rest] < d[std::string("C") + rest], std::string("M") + rest + " not below C" + rest);
    v.expect(d["MPT"] < d["MUA"] && d["CPT"] < d["CUA"], "reuse+prefetch does not reduce auth latency");

    std::map<std::string, double> c;
    for (const auto& r : run_all_auth(calibrated())) c[r.scenario] = r.auth_latency;
    const double mec = reduction(c["MUA"], c["MPT"]), cloud = reduction(c["CUA"], c["CPT"]);
    for (double r : {mec, cloud})
        v.expect(r >= kAuthBandLo - kRatioTolPp && r <= kAuthBandHi + kRatioTolPp, "calibrated reduction " + fmt(r));
    v.info("default MPT " + fmt(d["MPT"]) + " ms; calibrated reductions MEC " + fmt(mec) + "%, cloud " + fmt(cloud) + "%");
    return v;
}

// 5. State sweep.
Verdict state_sweep() {
    Verdict v;
    const std::vector<SweepPath> paths{SweepPath::Cloud, SweepPath::Proxy, SweepPath::ProxyPrefetch};
    for (const auto& [name, cfg] : {std::pair{"default", default_config()}, std::pair{"calibrated", calibrated()}}) {
        auto pts = run_state_sweep(cfg.sweep_sizes, paths, cfg);
        std::vector<double> red;
        for (std::size_t i = 0; i < cfg.sweep_sizes.size(); ++i) {
            const double cl = pts[3 * i].report.state_transfer_latency, px = pts[3 * i + 1].report.state_transfer_latency,
                         pf = pts[3 * i + 2].report.state_transfer_latency;
            v.expect(cl > px && px > pf, std::string(name) + ": ordering at " + std::to_string(cfg.sweep_sizes[i]) + " B");
            red.push_back(reduction(px, pf));
        }
        for (std::size_t i = 1; i < red.size(); ++i)
            v.expect(red[i] > red[i - 1], std::string(name) + ": reduction not increasing with size");
        std::string line = std::string(name) + " reductions";
        for (double r : red) line += " " + fmt(r) + "%";
        v.info(line);
        if (std::string(name) == "calibrated") {
            v.expect(red.size() == 3, "calibrated sweep must have three sizes");
            for (std::size_t i = 0; i < std::min<std::size_t>(3, red.size()); ++i)
                v.expect(within(red[i], kSweepTargets[i], kRatioTolPp), "calibrated reduction " + fmt(red[i]));
        }
    }
    return v;
}

// 6. Breakdown.
Verdict breakdown() {
    Verdict v;
    for (const auto& [name, cfg] : {std::pair{"default", default_config()}, std::pair{"calibrated", calibrated()}}) {
        auto b = run_breakdown(cfg);
        const std::string n = name;
        auto& w = b.with;
        auto& wo = b.without;
        v.expect(w.stages.contains("M1") && w.stages.contains("M2"), n + ": prefetch stages missing");
        v.expect(w.stages["M1"].end_ms <= w.instants["entitlement_query"], n + ": M1 ends after the entitlement query");
        v.expect(w.stages["M2"].end_ms <= w.instants["state_demand"], n + ": M2 ends after the state demand");
        v.expect(wo.stages["M1"].start_ms >= wo.stages["U2"].start_ms && wo.stages["M1"].end_ms <= wo.stages["U2"].end_ms,
                 n + ": M1 not nested in U2 without optimizations");
        v.expect(wo.stages["M2"].start_ms >= wo.stages["U3"].start_ms && wo.stages["M2"].end_ms <= wo.stages["U3"].end_ms,
                 n + ": M2 not nested in U3 without optimizations");
        const double u2 = reduction(wo.stages["U2"].duration(), w.stages["U2"].duration());
        const double u3 = reduction(wo.stages["U3"].duration(), w.stages["U3"].duration());
        v.expect(u2 > 0.0 && u3 > 0.0, n + ": U2/U3 did not shrink");
        v.expect(w.stages["U2"].duration() > 0.0 && w.stages["U3"].duration() > 0.0, n + ": residual U2/U3 not positive");
        if (n == "calibrated") {
            v.expect(within(u2, kU2Target, kRatioTolPp), "calibrated U2 reduction " + fmt(u2));
            v.expect(within(u3, kU3Target, kRatioTolPp), "calibrated U3 reduction " + fmt(u3));
        }
        v.info(n + " U2 -" + fmt(u2) + "%, U3 -" + fmt(u3) + "%");
    }
    return v;
}

// 7. Interruption.
Verdict interruption() {
    Verdict v;
    for (const auto& [name, cfg] : {std::pair{"default", default_config()}, std::pair{"calibrated", calibrated()}}) {
        const std::string n = name;
        std::vector<LatencyReport> r;
        for (int s = 1; s <= 3; ++s) r.push_back(run_interruption(s, cfg));
        v.expect(r[2].service_interruption < r[1].service_interruption &&
                     r[1].service_interruption < r[0].service_interruption,
                 n + ": not 3 < 2 < 1");
        for (const char* seg : {"attach", "mec_to_ue"})
            for (int s = 1; s < 3; ++s)
                v.expect(std::abs(r[s].segments[seg] - r[0].segments[seg]) <= kTickMs,
                         n + ": " + seg + " differs between scenarios");
        const double vs2 = reduction(r[1].service_interruption, r[2].service_interruption);
        const double vs1 = reduction(r[0].service_interruption, r[2].service_interruption);
        if (n == "calibrated") {
            v.expect(within(vs2, kVs2Target, kRatioTolPp), "calibrated reduction vs 2: " + fmt(vs2));
            v.expect(within(vs1, kVs1Target, kRatioTolPp), "calibrated reduction vs 1: " + fmt(vs1));
        }
        v.info(n + " " + fmt(r[0].service_interruption, 0) + "/" + fmt(r[1].service_interruption, 0) + "/" +
               fmt(r[2].service_interruption, 0) + " ms, -" + fmt(vs2) + "% vs 2, -" + fmt(vs1) + "% vs 1");
    }
    return v;
}

// 8. Oracle equivalence over every scenario family.
Verdict oracle_equivalence(double& seconds) {
    Verdict v;
    const auto start = Clock::now();
    std::size_t checked = 0;
    auto check = [&](const ScenarioConfig& cfg, const Toggles& t, bool resume, double delay, const LatencyReport& r) {
        ++checked;
        auto diffs = oracle::check_report(cfg, t, resume, delay, r, kOracleTolMs);
        for (std::size_t i = 0; i < std::min<std::size_t>(diffs.size(), 3); ++i) v.expect(false, r.scenario + ": " + diffs[i]);
    };
    for (const auto& cfg : {quiet(), default_config(), calibrated()}) {
        for (const char* code : kAuthCodes) check(cfg, toggles_for_code(code), false, 0.0, run_auth_scenario(code, cfg));
        for (const auto& p : run_state_sweep(cfg.sweep_sizes, {SweepPath::Cloud, SweepPath::Proxy, SweepPath::ProxyPrefetch}, cfg))
            check(cfg, toggles_for_path(p.path), true, cfg.sweep_resume_delay_ms, p.report);
        auto b = run_breakdown(cfg);
        check(cfg, breakdown_toggles(false), true, 0.0, b.without);
        check(cfg, breakdown_toggles(true), true, 0.0, b.with);
        for (int s = 1; s <= 3; ++s) check(cfg, interruption_toggles(s), true, 0.0, run_interruption(s, cfg));
    }
    seconds = std::chrono::duration<double>(Clock::now() - start).count();
    v.info(std::to_string(checked) + " runs matched within " + fmt(kOracleTolMs * 1e6, 0) + " ns in " + fmt(seconds, 2) + " s");
    return v;
}

// 9. Prefetch safety.
struct Canon {
    std::string token;
    std::vector<std::tuple<std::string, SubscriptionRecord, int>> datastore;
    std::optional<std::tuple<std::string, std::string, std::uint64_t, Bytes>> delivered;
    std::optional<std::tuple<std::string, std::string, std::string, bool>> session;
    bool operator==(const Canon&) const = default;
};

Canon canon(const Outcome& o) {
    Canon c;
    if (auto t = mecsys::AccessToken::decode(o.token)) {
        t->issued_at_ms = t->expires_at_ms = 0;
        t->nonce = {};
        t->signature = {};
        c.token = t->encode();
    } else {
        c.token = o.token;
    }
    for (const auto& e : o.datastore) c.datastore.emplace_back(e.imsi, e.record, static_cast<int>(e.source));
    if (o.delivered) c.delivered = std::tuple{o.delivered->user_id, o.delivered->app_id, o.delivered->version, o.delivered->blob};
    if (o.session) c.session = std::tuple{o.session->imsi, o.session->app_id, o.session->network_id, o.session->frozen};
    return c;
}

Verdict prefetch_safety() {
    Verdict v;
    std::size_t pairs = 0;
    for (const auto& cfg : {default_config(), calibrated()}) {
        MoveOptions opt;
        opt.state_bytes = 64 * 1024;
        for (const char* code : kAuthCodes) {
            Toggles base = toggles_for_code(code);
            base.subscription_prefetch = false;
            base.state_prefetch = false;
            const auto ref = canon(run_move(cfg, base, opt, "safety-base").outcome);
            v.expect(ref.delivered.has_value() && ref.datastore.size() == 1, std::string(code) + ": baseline incomplete");
            for (int mask = 1; mask < 4; ++mask) {
                Toggles t = base;
                t.subscription_prefetch = mask & 1;
                t.state_prefetch = mask & 2;
                ++pairs;
                v.expect(canon(run_move(cfg, t, opt, "safety").outcome) == ref,
                         std::string(code) + " outcome changes with prefetch mask " + std::to_string(mask));
            }
        }
    }
    v.info(std::to_string(pairs) + " prefetch variants identical to their baselines");
    return v;
}

} // namespace

int main() {
    const auto start = Clock::now();
    std::map<int, std::pair<std::string, Verdict>> results;
    auto run = [&](int n, const std::string& name, const std::function<Verdict()>& f) {
        Verdict v;
        try {
            v = f();
        } catch (const std::exception& e) {
            v.expect(false, std::string("threw ") + e.what());
        }
        results[n] = {name, v};
    };
    run(1, "codec soundness", codec);
    run(2, "roaming AKA", roaming_aka);
    run(3, "token security", token_security);
    run(4, "auth ordering", auth_ordering);
    run(5, "state sweep", state_sweep);
    run(6, "breakdown", breakdown);
    run(7, "interruption", interruption);
    run(9, "prefetch safety", prefetch_safety);
    double oracle_s = 0.0;
    run(8, "oracle equivalence", [&] { return oracle_equivalence(oracle_s); });
    const double total = std::chrono::duration<double>(Clock::now() - start).count();
    auto& c8 = results[8].second;
    c8.expect(total < kSuiteBudgetS, "suite runtime " + fmt(total) + " s over budget");
    c8.info("suite " + fmt(total, 2) + " s");

    bool all = true;
    for (const auto& [n, r] : results) {
        const auto& [name, v] = r;
        all = all && v.ok;
        std::string notes;
        for (const auto& s : v.notes) notes += (notes.empty() ? "" : "; ") + s;
        std::printf("criterion %d %-20s %s  %s\n", n, name.c_str(), v.ok ? "PASS" : "FAIL", notes.c_str());
    }
    std::printf("%s\n", all ? "all criteria pass" : "some criteria fail");
    return all ? 0 : 1;
}
