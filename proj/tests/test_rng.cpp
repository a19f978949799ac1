#include <doctest.h>

#include <cmath>

#include "syncsim/rng.hpp"

using namespace syncsim;

TEST_CASE("sub_seed is stable and label-sensitive") {
    CHECK(sub_seed(42, "link") == sub_seed(42, "link"));
    CHECK(sub_seed(42, "link") != sub_seed(42, "rtc.osc"));
    CHECK(sub_seed(42, "link") != sub_seed(43, "link"));
}

TEST_CASE("labeled streams are independent of draw order elsewhere") {
    NoiseStream a1(7, "a");
    NoiseStream b(7, "b");
    for (int i = 0; i < 100; ++i)
        (void)b.uniform();
    NoiseStream a2(7, "a");
    for (int i = 0; i < 10; ++i)
        CHECK(a1.uniform() == a2.uniform());
}

TEST_CASE("uniform stays in [0, 1) and fills the range") {
    NoiseStream s(1, "u");
    double lo = 1.0, hi = 0.0;
    for (int i = 0; i < 100'000; ++i) {
        double x = s.uniform();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
        lo = std::min(lo, x);
        hi = std::max(hi, x);
    }
    CHECK(lo < 0.01);
    CHECK(hi > 0.99);
}

TEST_CASE("bernoulli frequency tracks p") {
    NoiseStream s(2, "b");
    int hits = 0;
    const int n = 100'000;
    for (int i = 0; i < n; ++i)
        hits += s.bernoulli(0.3) ? 1 : 0;
    // 3 sigma of a binomial(n, 0.3)
    CHECK(std::abs(hits / double(n) - 0.3) < 3.0 * std::sqrt(0.3 * 0.7 / n));
}

TEST_CASE("normal has unit variance and zero mean") {
    NoiseStream s(3, "n");
    const int n = 200'000;
    double sum = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
        double x = s.normal();
        sum += x;
        ss += x * x;
    }
    double mean = sum / n;
    double var = ss / n - mean * mean;
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("normal(0) does not consume the stream") {
    NoiseStream a(9, "z");
    NoiseStream b(9, "z");
    CHECK(a.normal(0.0) == 0.0);
    // a's engine untouched: next draws line up with a fresh stream
    for (int i = 0; i < 5; ++i)
        CHECK(a.uniform() == b.uniform());
}

TEST_CASE("normal(sigma) scales") {
    NoiseStream a(11, "s");
    NoiseStream b(11, "s");
    for (int i = 0; i < 100; ++i)
        CHECK(a.normal(3.0) == doctest::Approx(3.0 * b.normal()));
}
