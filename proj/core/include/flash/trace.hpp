#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flash/report.hpp"

namespace flash {

/// CSV with header `cycle,kind,subject,value,detail`, one row per event.
/// Output is a pure function of the event list. Throws std::ios_base::failure
/// when the sink goes bad.
void write_trace_csv(const std::vector<TraceEvent>& events, std::ostream& sink);
std::string trace_csv(const std::vector<TraceEvent>& events);

/// JSON object with fields in the fixed order status, total_cycles, modules,
/// fifos, outputs, then the optional deadlock_cycle, seed and registers.
void write_report_json(const SimReport& r, std::ostream& sink);
std::string report_json(const SimReport& r);

/// First difference between two traces, or nullopt when identical.
std::optional<std::string> first_divergence(const std::vector<TraceEvent>& a,
                                            const std::vector<TraceEvent>& b);

/// First difference in the fields two simulators must agree on: status,
/// total and deadlock cycles, per-module busy/stall, per-fifo totals and
/// outputs.
std::optional<std::string> first_divergence(const SimReport& a, const SimReport& b);

}  // namespace flash
