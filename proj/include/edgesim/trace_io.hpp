#pragma once

#include <string>

#include "edgesim/harness.hpp"
#include "edgesim/rejo.hpp"

namespace edgesim {

inline constexpr const char* kTraceFormat = "edgesim-trace-v1";
inline constexpr const char* kSummaryFormat = "edgesim-summary-v1";
inline constexpr const char* kBoundsFormat = "edgesim-bounds-v1";
inline constexpr const char* kSweepFormat = "edgesim-sweep-v1";

// Formats a double with 12 significant digits, locale-independent.
std::string format_number(double x);

// Versioned per-slot CSV: t, queue, totals, then per-station activation,
// local fraction and metric columns. Errors on an empty run.
void write_trace(const RunResult& result, const std::string& path);

std::string summary_to_json(const RunResult& result);
void write_summary(const RunResult& result, const std::string& path);

std::string bounds_to_json(const BoundsReport& report);
void write_bounds(const BoundsReport& report, const std::string& path);

std::string sweep_to_json(const SweepResult& result);
void write_sweep_csv(const SweepResult& result, const std::string& path);
void write_sweep_json(const SweepResult& result, const std::string& path);

// Per-iteration search log: iteration, station, proposed_mode, objective,
// acceptance, accepted.
void write_rejo_trace(const RejoTrace& trace, const std::string& path);

}  // namespace edgesim
