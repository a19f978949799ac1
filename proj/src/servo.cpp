#include "syncsim/servo.hpp"

#include <algorithm>
#include <cmath>

#include "syncsim/errors.hpp"

namespace syncsim {

PiServo::PiServo(Config cfg) : cfg_(cfg) {
    if (!(std::isfinite(cfg_.kp) && std::isfinite(cfg_.ki) &&
          std::isfinite(cfg_.output_clamp_ppm)))
        throw ConfigError("servo gains must be finite");
    if (cfg_.kp < 0.0 || cfg_.ki < 0.0)
        throw ConfigError("servo gains must be non-negative");
    if (cfg_.output_clamp_ppm <= 0.0)
        throw ConfigError("servo output clamp must be positive");
}

double PiServo::update(double offset_s, double interval_s) {
    if (!std::isfinite(offset_s))
        throw ContractError("servo update: offset must be finite");
    if (!(interval_s > 0.0) || !std::isfinite(interval_s))
        throw ContractError("servo update: interval must be positive");

    double raw = -(cfg_.kp * offset_s + cfg_.ki * integrator_);
    double out = std::clamp(raw, -cfg_.output_clamp_ppm, cfg_.output_clamp_ppm);
    last_clamped_ = (out != raw);
    if (!last_clamped_)
        integrator_ += offset_s * interval_s;
    return out;
}

} // namespace syncsim
