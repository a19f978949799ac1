#include "syncsim/trigger.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "syncsim/errors.hpp"

namespace syncsim {

std::vector<TriggerLineConfig> validate_config(std::int64_t base_frequency_hz,
                                               std::vector<TriggerLineConfig> lines) {
    if (base_frequency_hz <= 0)
        throw ConfigError("base frequency must be positive");
    if (lines.empty())
        throw ConfigError("at least one trigger line is required");

    for (std::size_t i = 0; i < lines.size(); ++i) {
        TriggerLineConfig& ln = lines[i];
        if (ln.id < 0)
            ln.id = static_cast<int>(i);
        std::string tag = "line " + std::to_string(ln.id) + ": ";

        if (ln.mode == TriggerMode::ExternalTov) {
            if (!(ln.tov_rate_hz > 0.0))
                throw ConfigError(tag + "external TOV line needs tov_rate_hz > 0");
        } else {
            if (ln.divisor != 0 && ln.rate_hz != 0.0)
                throw ConfigError(tag + "specify divisor or rate_hz, not both");
            if (ln.divisor == 0) {
                if (!(ln.rate_hz > 0.0))
                    throw ConfigError(tag + "needs a divisor or a rate_hz");
                double d = static_cast<double>(base_frequency_hz) / ln.rate_hz;
                std::int64_t di = std::llround(d);
                // Exact divisibility: the resolved divisor must reproduce the
                // base rate, otherwise the line cannot sit on the tick grid.
                if (di < 1 ||
                    ln.rate_hz * static_cast<double>(di) != static_cast<double>(base_frequency_hz))
                    throw ConfigError(tag + "rate " + std::to_string(ln.rate_hz) +
                                      " Hz does not divide the base rate " +
                                      std::to_string(base_frequency_hz) + " Hz");
                ln.divisor = di;
            }
            if (ln.divisor < 1)
                throw ConfigError(tag + "divisor must be >= 1");
            if (ln.phase_ticks < 0 || ln.phase_ticks >= ln.divisor)
                throw ConfigError(tag + "phase_ticks must lie in [0, divisor)");
        }
        if (!(ln.pulse_width_us > 0.0))
            throw ConfigError(tag + "pulse width must be positive");
        if (ln.service_delay_ns < 0)
            throw ConfigError(tag + "service delay must be >= 0");
    }

    std::sort(lines.begin(), lines.end(),
              [](const TriggerLineConfig& a, const TriggerLineConfig& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < lines.size(); ++i)
        if (lines[i].id == lines[i - 1].id)
            throw ConfigError("duplicate trigger line id " + std::to_string(lines[i].id));
    return lines;
}

TriggerEngine::TriggerEngine(std::int64_t base_frequency_hz,
                             std::vector<TriggerLineConfig> lines,
                             std::int64_t emission_jitter_max_ns, NoiseStream rng)
    : base_hz_(base_frequency_hz),
      period_(TickPeriod::from_frequency_hz(base_frequency_hz)),
      lines_(validate_config(base_frequency_hz, std::move(lines))),
      jitter_max_ns_(emission_jitter_max_ns),
      rng_(std::move(rng)),
      line_seq_(lines_.size(), 0) {
    if (jitter_max_ns_ < 0)
        throw ConfigError("emission jitter must be >= 0");
}

void TriggerEngine::start(TimeInstant local_anchor) {
    if (started_)
        throw SequencingError("trigger engine already started");
    anchor_ = local_anchor;
    started_ = true;
}

TimeInstant TriggerEngine::tick_scheduled_local(std::int64_t k) const {
    if (!started_)
        throw SequencingError("trigger engine not started");
    if (k < 0)
        throw ContractError("tick index must be >= 0");
    return add(anchor_, TimeDelta::from_nanos(scale_floor_ns(k, period_)));
}

const TriggerLineConfig& TriggerEngine::line(int line_id) const {
    for (const TriggerLineConfig& ln : lines_)
        if (ln.id == line_id)
            return ln;
    throw ContractError("unknown trigger line id " + std::to_string(line_id));
}

TimeInstant TriggerEngine::stamp(SimClock& clk, const TriggerLineConfig& line) {
    TimeInstant reading = clk.sample();
    std::int64_t jit = jitter_max_ns_ > 0
        ? std::llround(rng_.uniform_under(static_cast<double>(jitter_max_ns_)))
        : 0;
    return add(reading, TimeDelta::from_nanos(line.service_delay_ns + jit));
}

std::vector<TriggerEvent> TriggerEngine::tick(SimClock& clk, TimeInstant scheduled_local) {
    if (!started_)
        throw SequencingError("trigger engine not started");
    std::int64_t k = tick_index_++;
    std::vector<TriggerEvent> out;
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        const TriggerLineConfig& ln = lines_[i];
        if (ln.mode != TriggerMode::Internal)
            continue;
        if (k % ln.divisor != ln.phase_ticks)
            continue;
        TriggerEvent ev;
        ev.line_id = ln.id;
        ev.seq = line_seq_[i]++;
        ev.tick_index = k;
        ev.scheduled_time = scheduled_local;
        ev.emitted_time = stamp(clk, ln);
        out.push_back(ev);
    }
    return out;
}

TriggerEvent TriggerEngine::external_tov_event(int line_id, SimClock& clk) {
    for (std::size_t i = 0; i < lines_.size(); ++i) {
        if (lines_[i].id != line_id)
            continue;
        if (lines_[i].mode != TriggerMode::ExternalTov)
            throw ContractError("line " + std::to_string(line_id) +
                                " is not in external TOV mode");
        TriggerEvent ev;
        ev.line_id = line_id;
        ev.seq = line_seq_[i]++;
        ev.tick_index = -1;
        ev.scheduled_time = clk.sample(); // captured exactly like a PPS edge
        ev.emitted_time = add(ev.scheduled_time,
                              TimeDelta::from_nanos(lines_[i].service_delay_ns +
                                                    (jitter_max_ns_ > 0
                                                         ? std::llround(rng_.uniform_under(
                                                               static_cast<double>(jitter_max_ns_)))
                                                         : 0)));
        return ev;
    }
    throw ContractError("unknown trigger line id " + std::to_string(line_id));
}

IntervalStats interval_stats(std::span<const TriggerEvent> events,
                             std::int64_t divisor, TickPeriod base_period) {
    if (divisor < 1)
        throw ContractError("interval_stats: divisor must be >= 1");
    if (events.size() < 2)
        throw ContractError("interval_stats: need at least 2 events");

    std::vector<double> diffs_us;
    diffs_us.reserve(events.size() - 1);
    for (std::size_t i = 1; i < events.size(); ++i)
        diffs_us.push_back(
            static_cast<double>(delta(events[i].emitted_time, events[i - 1].emitted_time).nanos()) /
            1000.0);

    double sum = 0.0;
    for (double d : diffs_us)
        sum += d;
    double mean = sum / static_cast<double>(diffs_us.size());
    double ss = 0.0;
    for (double d : diffs_us)
        ss += (d - mean) * (d - mean);

    IntervalStats st;
    st.expected_us = static_cast<double>(divisor) * static_cast<double>(base_period.num) /
                     (static_cast<double>(base_period.den) * 1000.0);
    st.mean_us = mean;
    st.std_us = std::sqrt(ss / static_cast<double>(diffs_us.size()));
    st.count = static_cast<std::int64_t>(diffs_us.size());
    return st;
}

MatchOutcome match_measurements(std::span<const TriggerEvent> triggers,
                                std::span<const MeasurementRecord> measurements,
                                std::int64_t expected_latency_ns,
                                std::int64_t window_ns) {
    if (window_ns <= 0)
        throw ConfigError("match window must be positive");

    MatchOutcome out;
    out.triggers.reserve(triggers.size());
    for (const TriggerEvent& t : triggers)
        out.triggers.push_back(MatchResult{t, std::nullopt, 0});

    auto expected_at = [&](std::size_t i) {
        return add(out.triggers[i].trigger.emitted_time,
                   TimeDelta::from_nanos(expected_latency_ns));
    };

    std::size_t ti = 0;
    for (const MeasurementRecord& m : measurements) {
        // Retire triggers whose window closed before this arrival; they can
        // never match a later (sorted) measurement either.
        while (ti < out.triggers.size() &&
               delta(m.arrival_time, expected_at(ti)).nanos() > window_ns)
            ++ti;
        if (ti < out.triggers.size()) {
            std::int64_t r = delta(m.arrival_time, expected_at(ti)).nanos();
            if (r >= -window_ns) {
                out.triggers[ti].measurement = m;
                out.triggers[ti].residual_ns = r;
                ++out.matched;
                ++ti;
                continue;
            }
        }
        out.unmatched_measurements.push_back(m);
    }
    return out;
}

} // namespace syncsim
