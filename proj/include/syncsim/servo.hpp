#pragma once

// Proportional-integral clock servo: turns measured time offsets into rate
// corrections. Shared by the PPS (RTC->MC) and PTP (MC->OBC) legs.
//
// Default gains place both poles of the 1 Hz discrete loop at 0.65
// (critically damped): with update interval T and offset x in seconds,
//   x_{k+1} = (1 - kp T 1e-6) x_k - ki T 1e-6 I_k + const,  I_{k+1} = I_k + x_k T,
// and kp = 700000 ppm/s, ki = kp^2 1e-6 / 4 = 122500 ppm/s^2 gives the
// double pole at 1 - kp T 1e-6 / 2.

#include <cstdint>

#include "syncsim/time.hpp"

namespace syncsim {

class PiServo {
public:
    struct Config {
        double kp = 700000.0;          // ppm per second of offset
        double ki = 122500.0;          // ppm per second^2 of integrated offset
        double output_clamp_ppm = 500.0; // symmetric output bound
    };

    PiServo() : PiServo(Config{}) {}
    explicit PiServo(Config cfg);

    // Rate correction in ppm for a measured offset over the interval since
    // the previous update. Sign convention: a positive offset (local clock
    // fast) yields a negative correction. The integrator is frozen on any
    // update whose output hit the clamp (anti-windup).
    double update(double offset_s, double interval_s);
    double update(TimeDelta offset, double interval_s) {
        return update(offset.seconds(), interval_s);
    }

    void reset_integrator() { integrator_ = 0.0; }

    double integrator() const { return integrator_; }
    bool last_output_clamped() const { return last_clamped_; }
    const Config& config() const { return cfg_; }

private:
    Config cfg_;
    double integrator_ = 0.0;
    bool last_clamped_ = false;
};

} // namespace syncsim
