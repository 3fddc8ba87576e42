#include "fs3a/harness/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "fs3a/error.hpp"

namespace fs3a::harness {

namespace {

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::IoFailure, "cannot open " + p.string());
    out << text;
    if (!out) throw Error(Errc::IoFailure, "cannot write " + p.string());
}

constexpr const char* kStageOrder[] = {"U1", "U2", "U3", "M1", "M2", "M3"};
constexpr const char* kSegmentOrder[] = {"attach", "auth", "mec_to_mec", "mec_to_ue"};

} // namespace

std::string stages_csv(const std::vector<LatencyReport>& reports) {
    std::string s = "scenario,stage,start_ms,end_ms,duration_ms\n";
    for (const auto& r : reports)
        for (const char* name : kStageOrder) {
            auto it = r.stages.find(name);
            if (it == r.stages.end()) continue;
            s += r.scenario + "," + name + "," + fmt(it->second.start_ms) + "," + fmt(it->second.end_ms) + "," +
                 fmt(it->second.duration()) + "\n";
        }
    return s;
}

std::string totals_csv(const std::vector<LatencyReport>& reports) {
    std::string s = "scenario,auth_latency_ms,state_transfer_latency_ms,service_interruption_ms\n";
    for (const auto& r : reports)
        s += r.scenario + "," + fmt(r.auth_latency) + "," + fmt(r.state_transfer_latency) + "," +
             fmt(r.service_interruption) + "\n";
    return s;
}

std::string segments_csv(const std::vector<LatencyReport>& reports) {
    std::string s = "scenario,segment,duration_ms\n";
    for (const auto& r : reports)
        for (const char* name : kSegmentOrder) {
            auto it = r.segments.find(name);
            if (it != r.segments.end()) s += r.scenario + "," + name + "," + fmt(it->second) + "\n";
        }
    return s;
}

void emit_report(const std::vector<LatencyReport>& reports, const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(Errc::IoFailure, "cannot create " + dir + ": " + ec.message());
    const std::filesystem::path base(dir);
    write_file(base / "stages.csv", stages_csv(reports));
    write_file(base / "totals.csv", totals_csv(reports));
    write_file(base / "segments.csv", segments_csv(reports));
}

} // namespace fs3a::harness
