#include <doctest.h>

#include "../oracle/flow_oracle.hpp"
#include "fs3a/harness/scenarios.hpp"

using namespace fs3a;
using namespace fs3a::harness;

namespace {

std::vector<std::pair<std::string, ScenarioConfig>> configs() {
    auto quiet = default_config();
    quiet.processing_ms.clear();
    return {{"quiet", quiet},
            {"default", default_config()},
            {"calibrated", load_config(FS3A_CONFIG_DIR "/calibrated.json")}};
}

void expect_match(const ScenarioConfig& cfg, const Toggles& t, bool resume, double delay, const LatencyReport& r) {
    CAPTURE(r.scenario);
    auto diffs = oracle::check_report(cfg, t, resume, delay, r);
    for (const auto& d : diffs) MESSAGE(d);
    CHECK(diffs.empty());
}

} // namespace

TEST_CASE("auth scenarios match the flow walk") {
    for (const auto& [name, cfg] : configs()) {
        CAPTURE(name);
        for (const char* code : kAuthCodes)
            expect_match(cfg, toggles_for_code(code), false, 0.0, run_auth_scenario(code, cfg));
    }
}

TEST_CASE("state sweep matches the flow walk") {
    for (const auto& [name, cfg] : configs()) {
        CAPTURE(name);
        auto pts = run_state_sweep({1000, 300 * 1024}, {SweepPath::Cloud, SweepPath::Proxy, SweepPath::ProxyPrefetch}, cfg);
        for (const auto& p : pts) expect_match(cfg, toggles_for_path(p.path), true, cfg.sweep_resume_delay_ms, p.report);
    }
}

TEST_CASE("breakdown and interruption match the flow walk") {
    for (const auto& [name, cfg] : configs()) {
        CAPTURE(name);
        auto b = run_breakdown(cfg);
        expect_match(cfg, breakdown_toggles(false), true, 0.0, b.without);
        expect_match(cfg, breakdown_toggles(true), true, 0.0, b.with);
        for (int s = 1; s <= 3; ++s) expect_match(cfg, interruption_toggles(s), true, 0.0, run_interruption(s, cfg));
    }
}

TEST_CASE("the flow walk notices a wrong model") {
    auto cfg = default_config();
    auto r = run_interruption(3, cfg);
    auto slow = cfg;
    slow.links["proxy_proxy"].latency_ms += 0.001;
    CHECK_FALSE(oracle::check_report(slow, interruption_toggles(3), true, 0.0, r).empty());
    auto busy = cfg;
    busy.processing_ms["ams"]["StateFetchReq"] = 0.01;
    CHECK_FALSE(oracle::check_report(busy, interruption_toggles(3), true, 0.0, r).empty());
    CHECK_FALSE(oracle::check_report(cfg, interruption_toggles(2), true, 0.0, r).empty());
}
