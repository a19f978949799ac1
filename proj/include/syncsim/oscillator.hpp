#pragma once

// Imperfect-clock model: static frequency error, linear aging, random-walk
// frequency noise, white read noise, and tick quantization. The clock's
// state is a tick counter on an exact rational grid; converting ticks to a
// TimeInstant floors, so a rational period (e.g. 1e9/24e6 ns) accumulates
// no long-run rounding bias.

#include <cstdint>

#include "syncsim/rng.hpp"
#include "syncsim/time.hpp"

namespace syncsim {

// Quantization step as an exact rational number of nanoseconds (num/den).
struct TickPeriod {
    std::int64_t num = 1000;
    std::int64_t den = 24; // default 1e9/24e6 = 125/3 ns

    // Period of an integer-frequency oscillator: 1e9/hz ns, reduced.
    static TickPeriod from_frequency_hz(std::int64_t hz);
    static TickPeriod from_nanos(std::int64_t ns);

    TickPeriod reduced() const;
    double nanos() const { return static_cast<double>(num) / static_cast<double>(den); }
    bool operator==(const TickPeriod&) const = default;
};

// floor(count * period) in nanoseconds, exact through a 128-bit intermediate.
std::int64_t scale_floor_ns(std::int64_t count, TickPeriod period);

struct OscillatorModel {
    double freq_error_ppm = 0.0;     // static frequency error
    double drift_ppb_per_s = 0.0;    // linear aging of the frequency error
    double random_walk_ppb_sigma = 0.0; // per-second std of random-walk frequency noise
    double white_noise_ns_sigma = 0.0;  // per-reading timestamp jitter
    TickPeriod tick{};               // quantization step

    void validate() const; // throws ConfigError on nonpositive tick / negative sigma
};

// A node's local clock, advanced by the simulation loop in true time.
// Single-writer: only the owning loop mutates it.
//
// Effective rate = 1 + (freq_error + rate_adjust + aging + random walk) 1e-6,
// floored at zero so advancing never moves local time backwards. Frequency
// noise is rate noise (applied during advance); white phase noise is read
// noise (applied by sample(), never to state).
class SimClock {
public:
    SimClock(TimeInstant true_epoch, TimeDelta initial_offset,
             OscillatorModel osc, NoiseStream rng, double rate_clamp_ppm = 500.0);

    // Advances local time by true_elapsed_ns scaled by the effective rate,
    // quantized to the tick grid. Returns the applied local elapsed.
    // Aging and random-walk updates are applied at the start of the interval.
    TimeDelta advance(std::int64_t true_elapsed_ns);

    // Advances to an absolute true time; throws SequencingError if t is in
    // the past. Returns the applied local elapsed.
    TimeDelta advance_to_true(TimeInstant t);

    // Quantized local time, no read noise.
    TimeInstant now() const;

    // Local-time reading including white read noise (rounded to the tick
    // grid). Consumes the noise stream; state is untouched.
    TimeInstant sample();

    TimeInstant true_now() const { return true_now_; }

    // Servo interface. Values beyond the clamp are stored clamped and
    // counted as warnings, not errors.
    void set_rate_adjustment(double ppm);
    double rate_adjustment_ppm() const { return rate_adjust_ppm_; }

    // Shifts local time by exactly d (coarse alignment; the one permitted
    // monotonicity exemption, recorded in step_count).
    void step(TimeDelta d);

    // Current instantaneous rate factor (dimensionless, >= 0).
    double effective_rate() const;

    // True nanoseconds needed for the local clock to gain local_ns at the
    // current rate (first-order prediction).
    std::int64_t true_ns_for_local_ns(std::int64_t local_ns) const;

    std::int64_t ticks_since_epoch() const { return ticks_; }
    std::int64_t step_count() const { return step_count_; }
    std::int64_t clamp_warning_count() const { return clamp_warnings_; }
    const OscillatorModel& oscillator() const { return osc_; }
    double rate_clamp_ppm() const { return rate_clamp_ppm_; }

private:
    std::int64_t tick_floor_ns(std::int64_t ticks) const;
    double total_ppm() const;

    TimeInstant epoch_local_;
    TimeInstant true_now_;
    OscillatorModel osc_;
    NoiseStream rng_;
    double rate_clamp_ppm_;
    double rate_adjust_ppm_ = 0.0;
    double aging_ppb_ = 0.0;
    double random_walk_ppb_ = 0.0;
    std::int64_t ticks_ = 0;
    double tick_frac_ = 0.0; // [0, 1)
    std::int64_t step_count_ = 0;
    std::int64_t clamp_warnings_ = 0;
};

} // namespace syncsim
