#pragma once

// Scenario files: flat key = value lines grouped under [section] headers,
// '#' comments, unknown keys rejected. Loading is purely syntactic plus
// per-value range checks; structural validation (trigger divisibility and
// friends) happens when the scenario is run or explicitly validated.

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "syncsim/oscillator.hpp"
#include "syncsim/pps.hpp"
#include "syncsim/ptp.hpp"
#include "syncsim/trigger.hpp"

namespace syncsim {

struct NodeParams {
    OscillatorModel osc{};
    std::int64_t tick_hz = 1'000'000'000;
    std::int64_t initial_offset_ns = 0;
};

enum class TriggerBaseSource { Internal, Tov };

struct Scenario {
    double duration_s = 600.0;
    std::uint64_t master_seed = 1;
    std::int64_t start_unix_s = 1'704'067'200; // 2024-01-01T00:00:00Z
    std::string out_dir = "out";

    NodeParams rtc{.tick_hz = 1'000'000'000};
    double rtc_edge_jitter_ns_sigma = 0.0;
    double rtc_pps_drop_prob = 0.0;

    NodeParams mc{.tick_hz = 24'000'000};
    NodeParams obc{.tick_hz = 1'000'000'000};

    DisciplineConfig mc_servo{};  // library defaults are tuned for this leg
    DisciplineConfig obc_servo{
        .servo = {.kp = 300000.0, .ki = 22500.0, .output_clamp_ppm = 500.0},
        .step_threshold_ns = 1'000'000,
        .lock_threshold_ns = 5'000,
        .lock_consecutive = 5,
    };

    LinkModel::Config link{};
    double ptp_sync_interval_s = 1.0;
    double ptp_exchange_timeout_s = 2.0;
    bool ptp_start_after_mc_lock = true;

    std::int64_t base_frequency_hz = 800;
    std::int64_t emission_jitter_max_ns = 250;
    TriggerBaseSource base_source = TriggerBaseSource::Internal;
    double base_tov_rate_hz = 0.0; // required when base_source = tov
    bool triggers_start_after_mc_lock = true;
    std::vector<TriggerLineConfig> lines; // empty: default 800/20/10 Hz set

    bool sensors_enabled = true;
    std::int64_t sensor_latency_ns = 100'000;
    double sensor_latency_jitter_ns_sigma = 0.0;
    double sensor_drop_prob = 0.0;
    std::int64_t match_window_ns = 500'000;

    bool nmea_enabled = true;
    std::int64_t nmea_emit_delay_ms = 50;

    // Configured lines, or the default three-line set (800, 20, 10 Hz) when
    // none are given. Not yet validated.
    std::vector<TriggerLineConfig> resolved_lines() const;
};

// Parses scenario text. origin names the source in error messages.
Scenario parse_scenario(std::string_view text, std::string_view origin);

// Loads and parses a scenario file. Missing/unreadable file: ScenarioFileError.
Scenario load_scenario(const std::string& path);

// Structural checks that go beyond single values: trigger line resolution,
// servo gain sanity, TOV base rate presence. Throws ConfigError.
void validate_scenario(const Scenario& sc);

// Canonical text form with every value resolved (defaults included).
// Parseable as a scenario itself.
std::string render_scenario(const Scenario& sc);

} // namespace syncsim
