#pragma once

#include <string>
#include <vector>

#include "fs3a/harness/scenarios.hpp"

namespace fs3a::harness {

// scenario,stage,start_ms,end_ms,duration_ms; stages in U1..U3, M1..M3 order.
std::string stages_csv(const std::vector<LatencyReport>& reports);
// scenario,auth_latency_ms,state_transfer_latency_ms,service_interruption_ms
std::string totals_csv(const std::vector<LatencyReport>& reports);
// scenario,segment,duration_ms (interruption decomposition)
std::string segments_csv(const std::vector<LatencyReport>& reports);

// Writes stages.csv, totals.csv and segments.csv under `dir` (created if
// missing). Throws Error{IoFailure}.
void emit_report(const std::vector<LatencyReport>& reports, const std::string& dir);

} // namespace fs3a::harness
