#include <doctest.h>

#include <cmath>

#include "syncsim/errors.hpp"
#include "syncsim/oscillator.hpp"

using namespace syncsim;

namespace {

SimClock make_clock(OscillatorModel osc, std::int64_t initial_offset_ns = 0,
                    std::uint64_t seed = 0) {
    return SimClock(TimeInstant{0, 0}, TimeDelta::from_nanos(initial_offset_ns), osc,
                    NoiseStream(seed, "osc.test"));
}

} // namespace

TEST_CASE("tick period reduction") {
    TickPeriod p = TickPeriod::from_frequency_hz(24'000'000);
    CHECK(p.num == 125);
    CHECK(p.den == 3);
    CHECK(p.nanos() == doctest::Approx(41.6667).epsilon(1e-4));

    CHECK(TickPeriod::from_frequency_hz(1'000'000'000) == TickPeriod{1, 1});
    CHECK(TickPeriod::from_nanos(250) == TickPeriod{250, 1});
    CHECK_THROWS_AS(TickPeriod::from_frequency_hz(0), ConfigError);
    CHECK_THROWS_AS(TickPeriod::from_nanos(-1), ConfigError);
}

TEST_CASE("scale_floor_ns floors on the rational grid") {
    TickPeriod p{125, 3};
    CHECK(scale_floor_ns(0, p) == 0);
    CHECK(scale_floor_ns(1, p) == 41);   // 41.67
    CHECK(scale_floor_ns(2, p) == 83);   // 83.33
    CHECK(scale_floor_ns(3, p) == 125);  // exact
    CHECK(scale_floor_ns(-1, p) == -42); // floor, not truncation
    CHECK(scale_floor_ns(24'000'000, p) == 1'000'000'000);
}

TEST_CASE("perfect clock tracks true time exactly") {
    SimClock c = make_clock(OscillatorModel{.tick = {1, 1}});
    CHECK(c.now() == TimeInstant{0, 0});
    TimeDelta applied = c.advance(NS_PER_SEC);
    CHECK(applied.nanos() == NS_PER_SEC);
    CHECK(c.now() == TimeInstant{1, 0});
    CHECK(c.true_now() == TimeInstant{1, 0});
}

TEST_CASE("static frequency error is exact for integer ppm") {
    SimClock fast = make_clock(OscillatorModel{.freq_error_ppm = 10.0, .tick = {1, 1}});
    CHECK(fast.advance(NS_PER_SEC).nanos() == 1'000'010'000);

    SimClock slow = make_clock(OscillatorModel{.freq_error_ppm = -10.0, .tick = {1, 1}});
    CHECK(slow.advance(NS_PER_SEC).nanos() == 999'990'000);
}

TEST_CASE("24 MHz quantization floors readings to the tick grid") {
    SimClock c = make_clock(OscillatorModel{.tick = {125, 3}});
    CHECK(c.advance(100).nanos() == 83); // 2.4 ticks -> 2 ticks -> 83 ns
    CHECK(c.now() == TimeInstant{0, 83});
    // one true second is exactly 24e6 ticks; the fractional 0.4 tick carries
    c.advance(NS_PER_SEC - 100);
    CHECK(c.ticks_since_epoch() == 24'000'000);
    CHECK(c.now() == TimeInstant{1, 0});
}

TEST_CASE("initial offset shifts local time") {
    SimClock c = make_clock(OscillatorModel{.tick = {1, 1}}, 50'000'000);
    CHECK(c.now() == TimeInstant{0, 50'000'000});
    c.advance(NS_PER_SEC);
    CHECK(c.now() == TimeInstant{1, 50'000'000});
}

TEST_CASE("aging accumulates linearly") {
    // 1 ppb/s for 1000 s -> +1 ppm at the start of the next interval
    SimClock c = make_clock(OscillatorModel{.drift_ppb_per_s = 1.0, .tick = {1, 1}});
    c.advance(1000 * NS_PER_SEC);
    CHECK(c.effective_rate() == doctest::Approx(1.0 + 1e-6).epsilon(1e-12));
    CHECK(c.advance(NS_PER_SEC).nanos() == doctest::Approx(1'000'001'001).epsilon(1e-9));
}

TEST_CASE("random walk is deterministic per seed and absent at sigma 0") {
    OscillatorModel noisy{.random_walk_ppb_sigma = 5.0, .tick = {1, 1}};
    SimClock a = make_clock(noisy, 0, 7);
    SimClock b = make_clock(noisy, 0, 7);
    for (int i = 0; i < 100; ++i)
        CHECK(a.advance(NS_PER_SEC).nanos() == b.advance(NS_PER_SEC).nanos());

    SimClock quiet = make_clock(OscillatorModel{.tick = {1, 1}}, 0, 7);
    for (int i = 0; i < 100; ++i)
        CHECK(quiet.advance(NS_PER_SEC).nanos() == NS_PER_SEC);
}

TEST_CASE("white noise is read noise, not state") {
    OscillatorModel osc{.white_noise_ns_sigma = 100.0, .tick = {1, 1}};
    SimClock c = make_clock(osc, 0, 3);
    c.advance(NS_PER_SEC);
    TimeInstant clean = c.now();
    bool saw_noise = false;
    for (int i = 0; i < 50; ++i) {
        TimeInstant s = c.sample();
        if (s != clean)
            saw_noise = true;
        CHECK(c.now() == clean); // state untouched by sampling
    }
    CHECK(saw_noise);
}

TEST_CASE("sample with zero sigma equals now and consumes nothing") {
    OscillatorModel osc{.random_walk_ppb_sigma = 1.0, .tick = {1, 1}};
    SimClock a = make_clock(osc, 0, 5);
    SimClock b = make_clock(osc, 0, 5);
    CHECK(a.sample() == a.now());
    // identical draw sequences afterwards
    for (int i = 0; i < 20; ++i)
        CHECK(a.advance(NS_PER_SEC).nanos() == b.advance(NS_PER_SEC).nanos());
}

TEST_CASE("rate adjustment clamps with a warning") {
    SimClock c = make_clock(OscillatorModel{.tick = {1, 1}});
    c.set_rate_adjustment(100.0);
    CHECK(c.rate_adjustment_ppm() == 100.0);
    CHECK(c.clamp_warning_count() == 0);
    c.set_rate_adjustment(10'000.0);
    CHECK(c.rate_adjustment_ppm() == 500.0);
    CHECK(c.clamp_warning_count() == 1);
    c.set_rate_adjustment(-10'000.0);
    CHECK(c.rate_adjustment_ppm() == -500.0);
    CHECK(c.clamp_warning_count() == 2);
    CHECK_THROWS_AS(c.set_rate_adjustment(std::nan("")), ContractError);
}

TEST_CASE("step shifts local time exactly and is counted") {
    SimClock c = make_clock(OscillatorModel{.tick = {1, 1}});
    c.advance(NS_PER_SEC);
    c.step(TimeDelta::from_nanos(-250));
    CHECK(c.now() == TimeInstant{0, 999'999'750});
    CHECK(c.step_count() == 1);
}

TEST_CASE("advance contract violations") {
    SimClock c = make_clock(OscillatorModel{.tick = {1, 1}});
    CHECK_THROWS_AS(c.advance(-1), ContractError);
    c.advance_to_true(TimeInstant{2, 0});
    CHECK_THROWS_AS(c.advance_to_true(TimeInstant{1, 0}), SequencingError);
    CHECK(c.advance_to_true(TimeInstant{2, 0}).nanos() == 0); // same instant ok
}

TEST_CASE("true_ns_for_local_ns inverts the current rate") {
    SimClock c = make_clock(OscillatorModel{.freq_error_ppm = -10.0, .tick = {1, 1}});
    CHECK(c.true_ns_for_local_ns(NS_PER_SEC) == 1'000'010'000);
    SimClock u = make_clock(OscillatorModel{.tick = {1, 1}});
    CHECK(u.true_ns_for_local_ns(12345) == 12345);
}

TEST_CASE("oscillator model validation") {
    OscillatorModel bad{.random_walk_ppb_sigma = -1.0, .tick = {1, 1}};
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    OscillatorModel bad_tick{.tick = {0, 1}};
    CHECK_THROWS_AS(bad_tick.validate(), ConfigError);
}
