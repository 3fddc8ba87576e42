#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fs3a/harness/config.hpp"
#include "fs3a/harness/federation.hpp"
#include "fs3a/mecsys/entities.hpp"
#include "fs3a/netsim/transport.hpp"

namespace fs3a::harness {

struct Span {
    double start_ms = 0.0;
    double end_ms = 0.0;
    double duration() const { return end_ms - start_ms; }
    bool operator==(const Span&) const = default;
};

// Everything a finished run leaves behind that the prefetch-safety check
// compares across toggles.
struct Outcome {
    std::string token;        // token held by the UE after the move
    std::vector<mecsys::SubscriberEntry> datastore; // visited network
    std::optional<AppState> delivered;              // state installed at the visited app
    std::optional<mecsys::Session> session;         // visited session
};

struct LatencyReport {
    std::string scenario;
    // Times are relative to the start of the move (detach from home).
    std::map<std::string, Span> stages; // U1 U2 U3 M1 M2 M3
    // Interruption decomposition: attach, auth, mec_to_mec, mec_to_ue.
    std::map<std::string, double> segments;
    double auth_latency = 0.0;
    double state_transfer_latency = 0.0; // user-visible: state demand -> ready
    double service_interruption = 0.0;
    // Named instants used by the breakdown checks (relative as above).
    std::map<std::string, double> instants;
    std::vector<netsim::TraceRecord> trace; // frames of the move only
    Outcome outcome;
};

inline constexpr std::array<const char*, 8> kAuthCodes = {"CUA", "CUT", "CPA", "CPT", "MUA", "MUT", "MPA", "MPT"};

// C/M x U/P x A/T. Throws Error{ConfigMismatch} for anything else.
Toggles toggles_for_code(const std::string& code);
std::string code_for(const Toggles& t);

struct MoveOptions {
    bool resume = true;
    std::size_t state_bytes = 0;   // 0: the app's configured size
    double resume_delay_ms = 0.0;
    TransportKind transport = TransportKind::Sim;
};

// Home attach + login + state update, then detach, foreign attach, login and
// (optionally) resume. Throws Error{InvariantViolation} when the flow does not
// complete.
LatencyReport run_move(const ScenarioConfig& cfg, const Toggles& t, const MoveOptions& opt, const std::string& name);

LatencyReport run_auth_scenario(const std::string& code, const ScenarioConfig& cfg,
                                TransportKind transport = TransportKind::Sim);
std::vector<LatencyReport> run_all_auth(const ScenarioConfig& cfg, TransportKind transport = TransportKind::Sim);

enum class SweepPath { Cloud, Proxy, ProxyPrefetch };
std::string sweep_path_name(SweepPath p);
// Throws Error{ConfigError} for unknown names.
SweepPath parse_sweep_path(const std::string& name);
Toggles toggles_for_path(SweepPath p);

struct SweepPoint {
    std::size_t size_bytes = 0;
    SweepPath path = SweepPath::Proxy;
    LatencyReport report;
};
std::vector<SweepPoint> run_state_sweep(const std::vector<std::size_t>& sizes, const std::vector<SweepPath>& paths,
                                        const ScenarioConfig& cfg, TransportKind transport = TransportKind::Sim);

struct Breakdown {
    LatencyReport without;
    LatencyReport with;
};
Toggles breakdown_toggles(bool optimized);
Breakdown run_breakdown(const ScenarioConfig& cfg, TransportKind transport = TransportKind::Sim);

// 1: cloud auth + cloud state; 2: MEC + proxy; 3: MEC + proxy + prefetch +
// token reuse. Throws Error{ConfigMismatch} otherwise.
Toggles interruption_toggles(int scenario);
LatencyReport run_interruption(int scenario, const ScenarioConfig& cfg, TransportKind transport = TransportKind::Sim);

// Parses "10k,1m,10m" style lists (k = 1024). Throws Error{ConfigError}.
std::vector<std::size_t> parse_sizes(const std::string& text);

} // namespace fs3a::harness
