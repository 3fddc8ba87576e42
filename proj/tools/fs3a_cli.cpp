// fs3a: scenario runner for the federated MEC testbed.
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fs3a/error.hpp"
#include "fs3a/harness/config.hpp"
#include "fs3a/harness/report.hpp"
#include "fs3a/harness/scenarios.hpp"

using namespace fs3a;
using namespace fs3a::harness;

namespace {

constexpr int kExitInvariant = 2;
constexpr int kExitConfig = 3;

struct Globals {
    std::string config_path;
    std::string out_dir = "fs3a-out";
    std::string transport = "sim";
    std::optional<std::uint64_t> seed;
};

ScenarioConfig load(const Globals& g) {
    ScenarioConfig cfg = g.config_path.empty() ? default_config() : load_config(g.config_path);
    if (g.seed) cfg.seed = *g.seed;
    return cfg;
}

TransportKind transport_of(const Globals& g) {
    if (g.transport == "sim") return TransportKind::Sim;
    if (g.transport == "loopback") return TransportKind::Loopback;
    throw Error(Errc::ConfigError, "transport must be sim or loopback");
}

void print(const std::vector<LatencyReport>& reports, TransportKind kind) {
    std::printf("%-28s %14s %16s %16s\n", "scenario", "auth_ms", "state_ms", "interruption_ms");
    for (const auto& r : reports)
        std::printf("%-28s %14.3f %16.3f %16.3f\n", r.scenario.c_str(), r.auth_latency, r.state_transfer_latency,
                    r.service_interruption);
    if (kind == TransportKind::Loopback) std::printf("(loopback transport: wall-clock timings, indicative only)\n");
}

void finish(const std::vector<LatencyReport>& reports, const std::string& dir, TransportKind kind) {
    emit_report(reports, dir);
    print(reports, kind);
    std::printf("reports written to %s\n", dir.c_str());
}

std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) out.push_back(item);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Federated MEC testbed: authentication and state-transfer scenarios"};
    app.require_subcommand(1);
    app.fallthrough();
    Globals g;
    app.add_option("--config", g.config_path, "Scenario config (JSON); default is the embedded one");
    app.add_option("--out", g.out_dir, "Directory for CSV reports");
    app.add_option("--transport", g.transport, "sim or loopback")->check(CLI::IsMember({"sim", "loopback"}));
    app.add_option("--seed", g.seed, "Override the config seed");

    std::string code;
    auto* auth = app.add_subcommand("auth", "Authentication scenario (CUA..MPT); all eight when omitted");
    auth->add_option("--scenario", code, "Scenario code");

    std::string sizes = "10k,1m,10m", paths = "cloud,proxy,proxy-prefetch";
    bool sizes_given = false;
    auto* sweep = app.add_subcommand("state-sweep", "State transfer latency per size and path");
    sweep->add_option("--sizes", sizes, "Comma list, k/m suffixes")->each([&](const std::string&) { sizes_given = true; });
    sweep->add_option("--paths", paths, "Comma list of cloud, proxy, proxy-prefetch");

    auto* breakdown = app.add_subcommand("breakdown", "Stage breakdown with and without optimizations");

    int scenario = 0;
    auto* interruption = app.add_subcommand("interruption", "Service interruption; all three when omitted");
    interruption->add_option("--scenario", scenario, "1, 2 or 3");

    auto* all = app.add_subcommand("all", "Every experiment");

    bool print_default = false, print_effective = false;
    auto* config = app.add_subcommand("config", "Config utilities");
    config->add_flag("--print-default", print_default, "Dump the embedded default config");
    config->add_flag("--print", print_effective, "Dump the effective config after --config/--seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    try {
        if (config->parsed()) {
            if (print_default) {
                std::cout << default_config_text();
                return 0;
            }
            std::cout << dump_config(load(g));
            return 0;
        }
        const ScenarioConfig cfg = load(g);
        const TransportKind kind = transport_of(g);
        auto sweep_sizes = [&] { return sizes_given ? parse_sizes(sizes) : cfg.sweep_sizes; };
        auto sweep_paths = [&] {
            std::vector<SweepPath> out;
            for (const auto& p : split(paths)) out.push_back(parse_sweep_path(p));
            if (out.empty()) throw Error(Errc::ConfigError, "no paths given");
            return out;
        };
        auto sweep_reports = [&] {
            std::vector<LatencyReport> out;
            for (auto& p : run_state_sweep(sweep_sizes(), sweep_paths(), cfg, kind)) out.push_back(std::move(p.report));
            return out;
        };
        auto interruption_reports = [&](int which) {
            std::vector<LatencyReport> out;
            for (int s = 1; s <= 3; ++s)
                if (which == 0 || which == s) out.push_back(run_interruption(s, cfg, kind));
            if (out.empty()) interruption_toggles(which); // throws ConfigMismatch
            return out;
        };

        if (auth->parsed()) {
            auto reports = code.empty() ? run_all_auth(cfg, kind)
                                        : std::vector<LatencyReport>{run_auth_scenario(code, cfg, kind)};
            finish(reports, g.out_dir, kind);
        } else if (sweep->parsed()) {
            finish(sweep_reports(), g.out_dir, kind);
        } else if (breakdown->parsed()) {
            auto b = run_breakdown(cfg, kind);
            finish({b.without, b.with}, g.out_dir, kind);
        } else if (interruption->parsed()) {
            finish(interruption_reports(scenario), g.out_dir, kind);
        } else if (all->parsed()) {
            finish(run_all_auth(cfg, kind), g.out_dir + "/auth", kind);
            finish(sweep_reports(), g.out_dir + "/state-sweep", kind);
            auto b = run_breakdown(cfg, kind);
            finish({b.without, b.with}, g.out_dir + "/breakdown", kind);
            finish(interruption_reports(0), g.out_dir + "/interruption", kind);
        }
    } catch (const Error& e) {
        std::fprintf(stderr, "fs3a: %s\n", e.what());
        switch (e.code()) {
        case Errc::ConfigError:
        case Errc::ConfigMismatch: return kExitConfig;
        case Errc::IoFailure: return 1;
        default: return kExitInvariant;
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "fs3a: %s\n", e.what());
        return 1;
    }
    return 0;
}
