#pragma once

// PPS generation and the discipline loop that keeps a clock locked to it.
//
// The RTC emits one falling edge per RTC second. The MC timestamps each edge
// in an input-capture interrupt and compares the timestamp against the label
// second the edge announces (delivered in-band over the serial link in the
// real system; carried on the edge here). A PI servo slews the MC rate, or
// the MC steps outright when the offset is beyond the step threshold.

#include <cstdint>
#include <vector>

#include "syncsim/oscillator.hpp"
#include "syncsim/rng.hpp"
#include "syncsim/servo.hpp"
#include "syncsim/time.hpp"

namespace syncsim {

struct PpsEdge {
    std::int64_t seq = 0;          // 1-based edge counter
    std::int64_t label_second = 0; // UTC second this edge marks
    TimeInstant true_time;         // when the edge physically occurs
    bool dropped = false;          // lost on the wire; the MC sees nothing
};

// RTC-driven PPS generator. Edges are pinned to the RTC's own seconds, so a
// +10 ppm RTC spaces them 10 us short of a true second. Per-edge jitter is
// zero-mean Gaussian on the physical edge and does not accumulate.
class PpsSource {
public:
    struct Config {
        double edge_jitter_ns_sigma = 0.0;
        double drop_prob = 0.0; // probability a given edge is lost to the MC
    };

    PpsSource(TimeInstant epoch_edge, std::int64_t epoch_label_second,
              SimClock rtc, Config cfg, NoiseStream jitter);

    // Generates the next edge, advancing the internal RTC by one RTC second.
    // The drop decision is drawn here (after the jitter draw) when
    // drop_prob > 0; otherwise the stream is untouched.
    PpsEdge next_edge();

    const SimClock& rtc() const { return rtc_; }
    std::int64_t edges_emitted() const { return seq_; }

private:
    SimClock rtc_;
    NoiseStream jitter_;
    Config cfg_;
    TimeInstant nominal_next_; // jitter-free edge chain, carried exactly
    std::int64_t seq_ = 0;
    std::int64_t label_ = 0;
};

struct PpsCapture {
    std::int64_t seq = 0;
    TimeInstant local_timestamp; // capture-unit reading on the slave clock
    std::int64_t label_second = 0;
};

// Timestamps an edge on clk (advancing it to the edge's true time first).
PpsCapture capture_edge(SimClock& clk, const PpsEdge& edge);

// Offset of a capture against the nearest whole second of the local
// timestamp. Sign: positive when the local clock is fast. A timestamp at
// exactly half a second is attributed to the earlier second.
TimeDelta pps_offset(const PpsCapture& cap);

struct OffsetRecord {
    std::int64_t seq = 0;
    TimeInstant local_time;
    std::int64_t offset_ns = 0;
};

struct DisciplineConfig {
    PiServo::Config servo{};
    std::int64_t step_threshold_ns = 10'000'000; // |offset| above this steps
    std::int64_t lock_threshold_ns = 100;
    int lock_consecutive = 5;
};

// Step-or-slew discipline state machine, shared by the PPS and PTP legs.
class Discipline {
public:
    Discipline() : Discipline(DisciplineConfig{}) {}
    explicit Discipline(DisciplineConfig cfg);

    // Applies one offset measurement to clk. interval_s is the local time
    // since the previous measurement.
    void update(SimClock& clk, std::int64_t seq, TimeInstant local_time,
                TimeDelta offset, double interval_s);

    // PPS leg: capture already taken, offset derived from the label second.
    void pps_tick(SimClock& clk, const PpsCapture& cap, double interval_s);

    // A scheduled reference beat did not arrive. The last rate correction is
    // held; no clock state changes.
    void enter_holdover();

    bool locked() const { return locked_; }
    bool in_holdover() const { return holdover_; }
    bool last_was_step() const { return last_was_step_; }
    std::int64_t steps_applied() const { return steps_; }
    std::int64_t updates_applied() const { return updates_; }
    const PiServo& servo() const { return servo_; }
    const DisciplineConfig& config() const { return cfg_; }
    const std::vector<OffsetRecord>& offset_history() const { return history_; }

private:
    DisciplineConfig cfg_;
    PiServo servo_;
    std::vector<OffsetRecord> history_;
    int consecutive_in_lock_ = 0;
    bool locked_ = false;
    bool holdover_ = false;
    bool last_was_step_ = false;
    std::int64_t steps_ = 0;
    std::int64_t updates_ = 0;
};

} // namespace syncsim
