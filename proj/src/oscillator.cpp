#include "syncsim/oscillator.hpp"

#include <cmath>
#include <numeric>

#include "syncsim/errors.hpp"

namespace syncsim {

std::int64_t scale_floor_ns(std::int64_t count, TickPeriod period) {
    __int128 p = static_cast<__int128>(count) * period.num;
    __int128 q = p / period.den;
    if (p % period.den != 0 && p < 0)
        --q; // floor, not truncation
    return static_cast<std::int64_t>(q);
}

TickPeriod TickPeriod::from_frequency_hz(std::int64_t hz) {
    if (hz <= 0)
        throw ConfigError("tick frequency must be positive");
    return TickPeriod{NS_PER_SEC, hz}.reduced();
}

TickPeriod TickPeriod::from_nanos(std::int64_t ns) {
    if (ns <= 0)
        throw ConfigError("tick period must be positive");
    return TickPeriod{ns, 1};
}

TickPeriod TickPeriod::reduced() const {
    std::int64_t g = std::gcd(num, den);
    return TickPeriod{num / g, den / g};
}

void OscillatorModel::validate() const {
    if (tick.num <= 0 || tick.den <= 0)
        throw ConfigError("tick granularity must be positive");
    if (random_walk_ppb_sigma < 0 || white_noise_ns_sigma < 0)
        throw ConfigError("noise sigmas must be nonnegative");
}

SimClock::SimClock(TimeInstant true_epoch, TimeDelta initial_offset,
                   OscillatorModel osc, NoiseStream rng, double rate_clamp_ppm)
    : epoch_local_(add(true_epoch, initial_offset))
    , true_now_(true_epoch)
    , osc_(osc)
    , rng_(rng)
    , rate_clamp_ppm_(rate_clamp_ppm) {
    osc_.validate();
    if (rate_clamp_ppm_ <= 0)
        throw ConfigError("rate clamp must be positive");
}

double SimClock::total_ppm() const {
    double ppm = osc_.freq_error_ppm + rate_adjust_ppm_
               + (aging_ppb_ + random_walk_ppb_) * 1e-3;
    // Effective rate never drops below zero; advance stays monotone.
    return ppm < -1e6 ? -1e6 : ppm;
}

double SimClock::effective_rate() const {
    return 1.0 + total_ppm() * 1e-6;
}

std::int64_t SimClock::tick_floor_ns(std::int64_t ticks) const {
    return scale_floor_ns(ticks, osc_.tick);
}

TimeDelta SimClock::advance(std::int64_t true_elapsed_ns) {
    if (true_elapsed_ns < 0)
        throw ContractError("advance: negative true elapsed");
    if (true_elapsed_ns == 0)
        return TimeDelta{}; // co-scheduled events: no state or stream activity

    double dt_s = static_cast<double>(true_elapsed_ns) * 1e-9;
    if (osc_.random_walk_ppb_sigma > 0)
        random_walk_ppb_ += rng_.normal() * osc_.random_walk_ppb_sigma * std::sqrt(dt_s);
    aging_ppb_ += osc_.drift_ppb_per_s * dt_s;

    // Multiply before dividing: keeps exact-integer cases exact in doubles.
    double correction_ns = static_cast<double>(true_elapsed_ns) * total_ppm() / 1e6;
    double local_ns = static_cast<double>(true_elapsed_ns) + correction_ns;
    double dticks = local_ns * static_cast<double>(osc_.tick.den)
                  / static_cast<double>(osc_.tick.num);

    std::int64_t before = ticks_;
    tick_frac_ += dticks;
    double whole = std::floor(tick_frac_);
    ticks_ += static_cast<std::int64_t>(whole);
    tick_frac_ -= whole;

    true_now_ = add(true_now_, TimeDelta::from_nanos(true_elapsed_ns));
    return TimeDelta::from_nanos(tick_floor_ns(ticks_) - tick_floor_ns(before));
}

TimeDelta SimClock::advance_to_true(TimeInstant t) {
    TimeDelta elapsed = delta(t, true_now_);
    if (elapsed.nanos() < 0)
        throw SequencingError("advance_to_true: " + to_string(t) + " precedes " + to_string(true_now_));
    return advance(elapsed.nanos());
}

TimeInstant SimClock::now() const {
    return add(epoch_local_, TimeDelta::from_nanos(tick_floor_ns(ticks_)));
}

TimeInstant SimClock::sample() {
    std::int64_t noise_ticks = 0;
    if (osc_.white_noise_ns_sigma > 0) {
        double noise_ns = rng_.normal() * osc_.white_noise_ns_sigma;
        noise_ticks = std::llround(noise_ns * static_cast<double>(osc_.tick.den)
                                   / static_cast<double>(osc_.tick.num));
    }
    return add(epoch_local_, TimeDelta::from_nanos(tick_floor_ns(ticks_ + noise_ticks)));
}

void SimClock::set_rate_adjustment(double ppm) {
    if (!std::isfinite(ppm))
        throw ContractError("set_rate_adjustment: non-finite ppm");
    if (ppm > rate_clamp_ppm_) {
        rate_adjust_ppm_ = rate_clamp_ppm_;
        ++clamp_warnings_;
    } else if (ppm < -rate_clamp_ppm_) {
        rate_adjust_ppm_ = -rate_clamp_ppm_;
        ++clamp_warnings_;
    } else {
        rate_adjust_ppm_ = ppm;
    }
}

void SimClock::step(TimeDelta d) {
    epoch_local_ = add(epoch_local_, d);
    ++step_count_;
}

std::int64_t SimClock::true_ns_for_local_ns(std::int64_t local_ns) const {
    return std::llround(static_cast<double>(local_ns) / effective_rate());
}

} // namespace syncsim
