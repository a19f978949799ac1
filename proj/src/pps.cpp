#include "syncsim/pps.hpp"

#include <cmath>
#include <utility>

#include "syncsim/errors.hpp"

namespace syncsim {

PpsSource::PpsSource(TimeInstant epoch_edge, std::int64_t epoch_label_second,
                     SimClock rtc, Config cfg, NoiseStream jitter)
    : rtc_(std::move(rtc)),
      jitter_(std::move(jitter)),
      cfg_(cfg),
      nominal_next_(normalize(epoch_edge)),
      label_(epoch_label_second) {
    if (cfg_.edge_jitter_ns_sigma < 0.0)
        throw ConfigError("pps edge jitter sigma must be >= 0");
    if (cfg_.drop_prob < 0.0 || cfg_.drop_prob > 1.0)
        throw ConfigError("pps drop probability must be in [0, 1]");
}

PpsEdge PpsSource::next_edge() {
    // One RTC-local second maps to 1e9/rate true ns at the current rate.
    std::int64_t gap_ns = std::llround(1e9 / rtc_.effective_rate());
    rtc_.advance(gap_ns);
    nominal_next_ = add(nominal_next_, TimeDelta::from_nanos(gap_ns));
    ++seq_;
    ++label_;

    std::int64_t jit = std::llround(jitter_.normal(cfg_.edge_jitter_ns_sigma));
    bool dropped = cfg_.drop_prob > 0.0 && jitter_.bernoulli(cfg_.drop_prob);
    return PpsEdge{seq_, label_, add(nominal_next_, TimeDelta::from_nanos(jit)), dropped};
}

PpsCapture capture_edge(SimClock& clk, const PpsEdge& edge) {
    clk.advance_to_true(edge.true_time);
    return PpsCapture{edge.seq, clk.sample(), edge.label_second};
}

TimeDelta pps_offset(const PpsCapture& cap) {
    // nanos in [0, 1e9): <= half a second reads as lateness within the
    // current second, otherwise as earliness against the next one.
    std::int64_t ns = cap.local_timestamp.nanos;
    if (ns <= NS_PER_SEC / 2)
        return TimeDelta::from_nanos(ns);
    return TimeDelta::from_nanos(ns - NS_PER_SEC);
}

Discipline::Discipline(DisciplineConfig cfg) : cfg_(cfg), servo_(cfg.servo) {
    if (cfg_.step_threshold_ns <= 0)
        throw ConfigError("step threshold must be positive");
    if (cfg_.lock_threshold_ns <= 0)
        throw ConfigError("lock threshold must be positive");
    if (cfg_.lock_consecutive < 1)
        throw ConfigError("lock_consecutive must be >= 1");
}

void Discipline::update(SimClock& clk, std::int64_t seq, TimeInstant local_time,
                        TimeDelta offset, double interval_s) {
    holdover_ = false;
    std::int64_t mag = offset.abs().nanos();
    bool step = mag > cfg_.step_threshold_ns;
    if (step) {
        clk.step(-offset);
        servo_.reset_integrator();
        consecutive_in_lock_ = 0;
        locked_ = false;
        ++steps_;
    } else {
        double ppm = servo_.update(offset, interval_s);
        clk.set_rate_adjustment(ppm);
        if (mag < cfg_.lock_threshold_ns) {
            if (++consecutive_in_lock_ >= cfg_.lock_consecutive)
                locked_ = true;
        } else {
            consecutive_in_lock_ = 0;
            locked_ = false;
        }
    }
    history_.push_back(OffsetRecord{seq, local_time, offset.nanos()});
    last_was_step_ = step;
    ++updates_;
}

void Discipline::pps_tick(SimClock& clk, const PpsCapture& cap, double interval_s) {
    // Offset against the labelled second, not the nearest one: the in-band
    // label is what lets the MC step across multi-second errors at boot.
    TimeDelta off = delta(cap.local_timestamp, TimeInstant{cap.label_second, 0});
    update(clk, cap.seq, cap.local_timestamp, off, interval_s);
}

void Discipline::enter_holdover() {
    holdover_ = true;
    locked_ = false;
    consecutive_in_lock_ = 0;
}

} // namespace syncsim
