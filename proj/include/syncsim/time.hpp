#pragma once

// Exact integer time arithmetic: TimeInstant (seconds + nanos) and
// TimeDelta (signed nanosecond span). All public timestamps in the
// library are normalized TimeInstant values.

#include <compare>
#include <cstdint>
#include <string>

#include "syncsim/errors.hpp"

namespace syncsim {

inline constexpr std::int64_t NS_PER_SEC = 1'000'000'000;

// Signed span between two instants, in whole nanoseconds.
class TimeDelta {
public:
    constexpr TimeDelta() = default;
    static constexpr TimeDelta from_nanos(std::int64_t ns) { return TimeDelta(ns); }
    static constexpr TimeDelta from_micros(std::int64_t us) { return TimeDelta(us * 1000); }
    static constexpr TimeDelta from_millis(std::int64_t ms) { return TimeDelta(ms * 1'000'000); }
    static constexpr TimeDelta from_seconds(std::int64_t s) { return TimeDelta(s * NS_PER_SEC); }

    constexpr std::int64_t nanos() const { return ns_; }
    constexpr double seconds() const { return static_cast<double>(ns_) * 1e-9; }
    constexpr TimeDelta abs() const { return TimeDelta(ns_ < 0 ? -ns_ : ns_); }

    constexpr TimeDelta operator-() const { return TimeDelta(-ns_); }
    constexpr TimeDelta operator+(TimeDelta rhs) const { return TimeDelta(ns_ + rhs.ns_); }
    constexpr TimeDelta operator-(TimeDelta rhs) const { return TimeDelta(ns_ - rhs.ns_); }
    constexpr TimeDelta& operator+=(TimeDelta rhs) { ns_ += rhs.ns_; return *this; }

    constexpr auto operator<=>(const TimeDelta&) const = default;

private:
    explicit constexpr TimeDelta(std::int64_t ns) : ns_(ns) {}
    std::int64_t ns_ = 0;
};

// A point on the simulation's leap-free Unix timescale. Always normalized:
// nanos in [0, 1e9). Ordering is lexicographic on (seconds, nanos).
struct TimeInstant {
    std::int64_t seconds = 0;
    std::int64_t nanos = 0;

    constexpr auto operator<=>(const TimeInstant&) const = default;
};

// Renormalizes arbitrary (seconds, nanos) to nanos in [0, 1e9).
// Throws RangeError if the seconds field would overflow.
TimeInstant normalize(TimeInstant t);

// a - b as an exact nanosecond span. Throws RangeError when the span
// does not fit a 64-bit count.
TimeDelta delta(TimeInstant a, TimeInstant b);

// a + d, normalized. Throws RangeError on overflow.
TimeInstant add(TimeInstant a, TimeDelta d);

inline TimeInstant make_instant(std::int64_t seconds, std::int64_t nanos) {
    return normalize(TimeInstant{seconds, nanos});
}

// Decimal seconds with nanosecond precision, e.g. "12.000000345".
std::string to_string(TimeInstant t);

} // namespace syncsim
