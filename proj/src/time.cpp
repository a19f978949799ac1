#include "syncsim/time.hpp"

#include <cstdio>
#include <limits>

namespace syncsim {

namespace {

using int128 = __int128;

constexpr std::int64_t I64_MAX = std::numeric_limits<std::int64_t>::max();
constexpr std::int64_t I64_MIN = std::numeric_limits<std::int64_t>::min();

std::int64_t checked_narrow(int128 v, const char* what) {
    if (v > int128(I64_MAX) || v < int128(I64_MIN))
        throw RangeError(std::string(what) + " overflows 64-bit range");
    return static_cast<std::int64_t>(v);
}

} // namespace

TimeInstant normalize(TimeInstant t) {
    // Floor division so nanos lands in [0, 1e9) for negative inputs too.
    std::int64_t carry = t.nanos / NS_PER_SEC;
    std::int64_t rem = t.nanos % NS_PER_SEC;
    if (rem < 0) {
        rem += NS_PER_SEC;
        carry -= 1;
    }
    std::int64_t secs = checked_narrow(int128(t.seconds) + int128(carry), "normalize: seconds");
    return TimeInstant{secs, rem};
}

TimeDelta delta(TimeInstant a, TimeInstant b) {
    int128 ns = (int128(a.seconds) - int128(b.seconds)) * NS_PER_SEC
              + (int128(a.nanos) - int128(b.nanos));
    return TimeDelta::from_nanos(checked_narrow(ns, "delta: span"));
}

TimeInstant add(TimeInstant a, TimeDelta d) {
    std::int64_t ds = d.nanos() / NS_PER_SEC;
    std::int64_t dn = d.nanos() % NS_PER_SEC;
    std::int64_t secs = checked_narrow(int128(a.seconds) + int128(ds), "add: seconds");
    return normalize(TimeInstant{secs, a.nanos + dn});
}

std::string to_string(TimeInstant t) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%lld.%09lld",
                  static_cast<long long>(t.seconds), static_cast<long long>(t.nanos));
    return buf;
}

} // namespace syncsim
