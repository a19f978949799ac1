#pragma once

// Multi-rate trigger engine. One base timer on the MC clock drives N output
// lines; each line fires every `divisor` base ticks (optionally phase
// shifted). Lines may instead be slaved to an external time-of-validity
// (TOV) edge, and the base timer itself can be TOV-driven.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "syncsim/oscillator.hpp"
#include "syncsim/rng.hpp"
#include "syncsim/time.hpp"

namespace syncsim {

enum class TriggerMode { Internal, ExternalTov };

struct TriggerLineConfig {
    int id = -1;
    std::int64_t divisor = 0;   // 0: derive from rate_hz
    double rate_hz = 0.0;       // sugar; must divide the base rate exactly
    std::int64_t phase_ticks = 0;
    TriggerMode mode = TriggerMode::Internal;
    double pulse_width_us = 10.0;
    std::int64_t service_delay_ns = 0; // fixed extra latency on emitted_time
    double tov_rate_hz = 0.0;   // ExternalTov lines: true rate of the source
};

struct TriggerEvent {
    int line_id = -1;
    std::int64_t seq = 0;        // per-line counter, 0-based
    std::int64_t tick_index = -1; // base tick that fired it; -1 for TOV lines
    TimeInstant scheduled_time;  // exact local grid time (or TOV capture)
    TimeInstant emitted_time;    // MC reading plus service delay and jitter
};

// Checks divisors/rates against the base frequency and resolves rate_hz
// sugar into divisors. Throws ConfigError on non-dividing rates, divisor or
// phase out of range, duplicate line ids, or an empty line set.
std::vector<TriggerLineConfig> validate_config(std::int64_t base_frequency_hz,
                                               std::vector<TriggerLineConfig> lines);

class TriggerEngine {
public:
    TriggerEngine(std::int64_t base_frequency_hz,
                  std::vector<TriggerLineConfig> lines,
                  std::int64_t emission_jitter_max_ns, NoiseStream rng);

    // Anchors base tick 0 at the given local time. Must be called once
    // before any tick.
    void start(TimeInstant local_anchor);

    // Local grid time of base tick k (internal base). k >= 0.
    TimeInstant tick_scheduled_local(std::int64_t k) const;

    // Processes the next base tick: clk must already sit at the tick's true
    // time. scheduled_local is the grid time (internal base) or the captured
    // TOV timestamp (TOV-driven base). Co-scheduled lines emit in ascending
    // line id order, each with its own jitter draw and clock sample.
    std::vector<TriggerEvent> tick(SimClock& clk, TimeInstant scheduled_local);

    // A line in ExternalTov mode fires directly off its own TOV edge: the
    // capture timestamp is both the schedule and the emission base.
    TriggerEvent external_tov_event(int line_id, SimClock& clk);

    std::int64_t tick_index() const { return tick_index_; }
    bool started() const { return started_; }
    TickPeriod base_period() const { return period_; }
    std::int64_t base_frequency_hz() const { return base_hz_; }
    const std::vector<TriggerLineConfig>& lines() const { return lines_; }
    const TriggerLineConfig& line(int line_id) const;

private:
    TimeInstant stamp(SimClock& clk, const TriggerLineConfig& line);

    std::int64_t base_hz_;
    TickPeriod period_;
    std::vector<TriggerLineConfig> lines_; // ascending id after validation
    std::int64_t jitter_max_ns_;
    NoiseStream rng_;
    TimeInstant anchor_;
    std::int64_t tick_index_ = 0; // next tick to process
    std::vector<std::int64_t> line_seq_;
    bool started_ = false;
};

struct IntervalStats {
    double expected_us = 0.0;
    double mean_us = 0.0;
    double std_us = 0.0; // population standard deviation
    std::int64_t count = 0; // number of intervals
};

// Interval statistics for one line's events (in emission order), measured on
// emitted_time. Expected period comes from the divisor and base period.
// Fewer than two events leave no interval to measure: ContractError.
IntervalStats interval_stats(std::span<const TriggerEvent> events,
                             std::int64_t divisor, TickPeriod base_period);

struct MeasurementRecord {
    int sensor_id = -1;
    TimeInstant arrival_time;
    std::optional<std::int64_t> hardware_seq;
};

struct MatchResult {
    TriggerEvent trigger;
    std::optional<MeasurementRecord> measurement;
    std::int64_t residual_ns = 0; // arrival - (emitted + expected latency)
};

struct MatchOutcome {
    std::vector<MatchResult> triggers; // same order as the trigger input
    std::vector<MeasurementRecord> unmatched_measurements;
    std::int64_t matched = 0;
};

// Greedy in-order matching of sensor measurements to trigger events: each
// measurement pairs with the earliest unconsumed trigger whose expected
// arrival (emitted + latency) lies within +-window. Inputs must be sorted by
// time. window_ns <= 0 is a ConfigError.
MatchOutcome match_measurements(std::span<const TriggerEvent> triggers,
                                std::span<const MeasurementRecord> measurements,
                                std::int64_t expected_latency_ns,
                                std::int64_t window_ns);

} // namespace syncsim
