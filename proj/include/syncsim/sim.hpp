#pragma once

// Deterministic discrete-event simulation of the full chain:
//   RTC --PPS/NMEA--> MC --PTP--> OBC, with the MC's trigger engine fanning
// out to sensor lines. Single-threaded; events are ordered by (true time,
// kind priority, insertion sequence), so equal-time events process in a
// fixed, reproducible order.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "syncsim/scenario.hpp"
#include "syncsim/trigger.hpp"

namespace syncsim {

struct LineReport {
    int line_id = -1;
    IntervalStats stats;
};

struct SimReport {
    double mc_lock_time_s = -1.0;  // -1: never locked
    double obc_lock_time_s = -1.0;

    std::int64_t max_abs_mc_offset_after_lock_ns = 0;
    std::int64_t max_abs_obc_offset_after_lock_ns = 0;
    std::int64_t obc_p99_abs_offset_after_lock_ns = 0; // nearest-rank p99

    std::vector<LineReport> line_stats; // ascending expected period

    std::int64_t pps_edges = 0;
    std::int64_t pps_captures = 0;
    std::int64_t holdover_entries = 0;
    std::int64_t mc_steps = 0;
    std::int64_t obc_steps = 0;

    std::int64_t ptp_exchanges_completed = 0;
    std::int64_t ptp_messages_dropped = 0;
    std::int64_t ptp_orphans = 0;
    std::int64_t ptp_timeouts = 0;

    std::int64_t triggers_emitted = 0;
    std::int64_t measurements_arrived = 0;
    std::int64_t matched = 0;
    std::int64_t unmatched_triggers = 0;
    std::int64_t unmatched_measurements = 0;
    double match_rate = 0.0; // matched / triggers on sensor-fed lines

    std::int64_t nmea_sentences = 0;
    std::int64_t rate_clamp_warnings = 0;
};

struct OffsetRow {
    std::int64_t t_ns = 0; // true time since scenario start
    std::optional<std::int64_t> rtc_mc_offset_ns;
    std::optional<std::int64_t> mc_obc_offset_ns;
};

struct NmeaLogEntry {
    std::int64_t edge_seq = 0;
    std::string sentence; // full sentence including CRLF
};

struct SimOutputs {
    std::int64_t start_unix_s = 0;       // origin for relative timestamps
    std::vector<OffsetRow> offsets;      // merged on t_ns, ascending
    std::vector<TriggerEvent> triggers;  // emission order across all lines
    std::vector<NmeaLogEntry> nmea;
    SimReport report;
};

// Runs the scenario to completion. The scenario is validated first
// (validate_scenario), so a structurally bad one throws before any event.
SimOutputs run_simulation(const Scenario& sc);

// File emitters. Paths are created/truncated; write failures are Errors.
void export_offset_trace(const SimOutputs& out, const std::string& path);
void export_trigger_log(const SimOutputs& out, const std::string& path);
void export_trigger_table(const SimReport& report, const std::string& path);
void export_nmea_log(const SimOutputs& out, const std::string& path);
void export_report(const SimReport& report, const std::string& path);

// The Table-1 style text block, shared by export_trigger_table and the
// stats subcommand.
std::string render_trigger_table(const std::vector<LineReport>& lines);

// Rebuilds per-line interval statistics from a triggers.csv written by
// export_trigger_log. The expected period is recovered as the median
// scheduled interval (exact for grid-scheduled lines).
std::vector<LineReport> stats_from_trigger_log(const std::string& path);

} // namespace syncsim
