#include "syncsim/scenario.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "syncsim/errors.hpp"

namespace syncsim {
namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

struct Cursor {
    std::string origin;
    int lineno = 0;

    [[noreturn]] void value_error(std::string_view key, std::string_view why) const {
        throw ScenarioValueError(origin + ":" + std::to_string(lineno) + ": key '" +
                                 std::string(key) + "': " + std::string(why));
    }
    [[noreturn]] void syntax_error(std::string_view why) const {
        throw ScenarioSyntaxError(origin + ":" + std::to_string(lineno) + ": " +
                                  std::string(why));
    }
    [[noreturn]] void unknown(std::string_view what) const {
        throw ScenarioUnknownKeyError(origin + ":" + std::to_string(lineno) + ": " +
                                      std::string(what));
    }

    double f64(std::string_view key, std::string_view v) const {
        std::string s(v);
        char* end = nullptr;
        errno = 0;
        double x = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
            value_error(key, "expected a number, got '" + s + "'");
        return x;
    }
    std::int64_t i64(std::string_view key, std::string_view v) const {
        std::string s(v);
        char* end = nullptr;
        errno = 0;
        long long x = std::strtoll(s.c_str(), &end, 10);
        if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
            value_error(key, "expected an integer, got '" + s + "'");
        return x;
    }
    std::uint64_t u64(std::string_view key, std::string_view v) const {
        std::string s(v);
        char* end = nullptr;
        errno = 0;
        unsigned long long x = std::strtoull(s.c_str(), &end, 10);
        if (s.empty() || s.front() == '-' || end != s.c_str() + s.size() || errno == ERANGE)
            value_error(key, "expected an unsigned integer, got '" + s + "'");
        return x;
    }
    bool boolean(std::string_view key, std::string_view v) const {
        if (v == "true")
            return true;
        if (v == "false")
            return false;
        value_error(key, "expected true or false, got '" + std::string(v) + "'");
    }

    double nonneg(std::string_view key, double x) const {
        if (!(x >= 0.0))
            value_error(key, "must be >= 0");
        return x;
    }
    double positive(std::string_view key, double x) const {
        if (!(x > 0.0))
            value_error(key, "must be > 0");
        return x;
    }
    std::int64_t nonneg_i(std::string_view key, std::int64_t x) const {
        if (x < 0)
            value_error(key, "must be >= 0");
        return x;
    }
    std::int64_t positive_i(std::string_view key, std::int64_t x) const {
        if (x <= 0)
            value_error(key, "must be > 0");
        return x;
    }
    double prob(std::string_view key, double x) const {
        if (!(x >= 0.0 && x <= 1.0))
            value_error(key, "must be in [0, 1]");
        return x;
    }
};

// [rtc]/[mc]/[obc] share the oscillator keys; [rtc] adds the PPS ones.
bool node_key(const Cursor& cur, NodeParams& node, std::string_view key,
              std::string_view val) {
    if (key == "freq_error_ppm")
        node.osc.freq_error_ppm = cur.f64(key, val);
    else if (key == "drift_ppb_per_s")
        node.osc.drift_ppb_per_s = cur.f64(key, val);
    else if (key == "random_walk_ppb_sigma")
        node.osc.random_walk_ppb_sigma = cur.nonneg(key, cur.f64(key, val));
    else if (key == "white_noise_ns_sigma")
        node.osc.white_noise_ns_sigma = cur.nonneg(key, cur.f64(key, val));
    else if (key == "tick_hz")
        node.tick_hz = cur.positive_i(key, cur.i64(key, val));
    else if (key == "initial_offset_ns")
        node.initial_offset_ns = cur.i64(key, val);
    else
        return false;
    return true;
}

bool servo_key(const Cursor& cur, DisciplineConfig& dc, std::string_view key,
               std::string_view val) {
    if (key == "kp")
        dc.servo.kp = cur.nonneg(key, cur.f64(key, val));
    else if (key == "ki")
        dc.servo.ki = cur.nonneg(key, cur.f64(key, val));
    else if (key == "output_clamp_ppm")
        dc.servo.output_clamp_ppm = cur.positive(key, cur.f64(key, val));
    else if (key == "step_threshold_ns")
        dc.step_threshold_ns = cur.positive_i(key, cur.i64(key, val));
    else if (key == "lock_threshold_ns")
        dc.lock_threshold_ns = cur.positive_i(key, cur.i64(key, val));
    else if (key == "lock_consecutive")
        dc.lock_consecutive = static_cast<int>(cur.positive_i(key, cur.i64(key, val)));
    else
        return false;
    return true;
}

} // namespace

std::vector<TriggerLineConfig> Scenario::resolved_lines() const {
    if (!lines.empty())
        return lines;
    std::vector<TriggerLineConfig> def(3);
    def[0].id = 0;
    def[0].rate_hz = 800.0;
    def[1].id = 1;
    def[1].rate_hz = 20.0;
    def[2].id = 2;
    def[2].rate_hz = 10.0;
    return def;
}

Scenario parse_scenario(std::string_view text, std::string_view origin) {
    Scenario sc;
    Cursor cur{std::string(origin), 0};
    std::string section; // empty = top level

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos
                                                                             : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++cur.lineno;

        std::size_t hash = raw.find('#');
        if (hash != std::string_view::npos)
            raw = raw.substr(0, hash);
        std::string_view line = trim(raw);
        if (line.empty())
            continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                cur.syntax_error("unterminated section header");
            std::string_view name = trim(line.substr(1, line.size() - 2));
            if (name != "rtc" && name != "mc" && name != "obc" && name != "mc_servo" &&
                name != "obc_servo" && name != "link" && name != "ptp" &&
                name != "triggers" && name != "line" && name != "sensors" && name != "nmea")
                cur.unknown("unknown section [" + std::string(name) + "]");
            section = std::string(name);
            if (section == "line")
                sc.lines.emplace_back();
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string_view::npos)
            cur.syntax_error("expected key = value");
        std::string_view key = trim(line.substr(0, eq));
        std::string_view val = trim(line.substr(eq + 1));
        if (key.empty())
            cur.syntax_error("empty key");
        if (val.empty())
            cur.value_error(key, "empty value");

        if (section.empty()) {
            if (key == "duration_s")
                sc.duration_s = cur.positive(key, cur.f64(key, val));
            else if (key == "master_seed")
                sc.master_seed = cur.u64(key, val);
            else if (key == "start_unix_s")
                sc.start_unix_s = cur.i64(key, val);
            else if (key == "out_dir")
                sc.out_dir = std::string(val);
            else
                cur.unknown("unknown top-level key '" + std::string(key) + "'");
        } else if (section == "rtc") {
            if (node_key(cur, sc.rtc, key, val)) {
            } else if (key == "edge_jitter_ns_sigma")
                sc.rtc_edge_jitter_ns_sigma = cur.nonneg(key, cur.f64(key, val));
            else if (key == "pps_drop_prob")
                sc.rtc_pps_drop_prob = cur.prob(key, cur.f64(key, val));
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [rtc]");
        } else if (section == "mc") {
            if (!node_key(cur, sc.mc, key, val))
                cur.unknown("unknown key '" + std::string(key) + "' in [mc]");
        } else if (section == "obc") {
            if (!node_key(cur, sc.obc, key, val))
                cur.unknown("unknown key '" + std::string(key) + "' in [obc]");
        } else if (section == "mc_servo") {
            if (!servo_key(cur, sc.mc_servo, key, val))
                cur.unknown("unknown key '" + std::string(key) + "' in [mc_servo]");
        } else if (section == "obc_servo") {
            if (!servo_key(cur, sc.obc_servo, key, val))
                cur.unknown("unknown key '" + std::string(key) + "' in [obc_servo]");
        } else if (section == "link") {
            if (key == "delay_m2s_ns")
                sc.link.delay_m2s_ns = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "delay_s2m_ns")
                sc.link.delay_s2m_ns = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "jitter_ns_sigma")
                sc.link.jitter_ns_sigma = cur.nonneg(key, cur.f64(key, val));
            else if (key == "drop_prob")
                sc.link.drop_prob = cur.prob(key, cur.f64(key, val));
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [link]");
        } else if (section == "ptp") {
            if (key == "sync_interval_s")
                sc.ptp_sync_interval_s = cur.positive(key, cur.f64(key, val));
            else if (key == "exchange_timeout_s")
                sc.ptp_exchange_timeout_s = cur.positive(key, cur.f64(key, val));
            else if (key == "start_after_mc_lock")
                sc.ptp_start_after_mc_lock = cur.boolean(key, val);
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [ptp]");
        } else if (section == "triggers") {
            if (key == "base_frequency_hz")
                sc.base_frequency_hz = cur.positive_i(key, cur.i64(key, val));
            else if (key == "emission_jitter_max_ns")
                sc.emission_jitter_max_ns = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "base_source") {
                if (val == "internal")
                    sc.base_source = TriggerBaseSource::Internal;
                else if (val == "tov")
                    sc.base_source = TriggerBaseSource::Tov;
                else
                    cur.value_error(key, "expected internal or tov");
            } else if (key == "tov_rate_hz")
                sc.base_tov_rate_hz = cur.positive(key, cur.f64(key, val));
            else if (key == "start_after_mc_lock")
                sc.triggers_start_after_mc_lock = cur.boolean(key, val);
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [triggers]");
        } else if (section == "line") {
            TriggerLineConfig& ln = sc.lines.back();
            if (key == "id")
                ln.id = static_cast<int>(cur.nonneg_i(key, cur.i64(key, val)));
            else if (key == "divisor")
                ln.divisor = cur.positive_i(key, cur.i64(key, val));
            else if (key == "rate_hz")
                ln.rate_hz = cur.positive(key, cur.f64(key, val));
            else if (key == "phase_ticks")
                ln.phase_ticks = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "mode") {
                if (val == "internal")
                    ln.mode = TriggerMode::Internal;
                else if (val == "external_tov")
                    ln.mode = TriggerMode::ExternalTov;
                else
                    cur.value_error(key, "expected internal or external_tov");
            } else if (key == "pulse_width_us")
                ln.pulse_width_us = cur.positive(key, cur.f64(key, val));
            else if (key == "service_delay_ns")
                ln.service_delay_ns = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "tov_rate_hz")
                ln.tov_rate_hz = cur.positive(key, cur.f64(key, val));
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [line]");
        } else if (section == "sensors") {
            if (key == "enabled")
                sc.sensors_enabled = cur.boolean(key, val);
            else if (key == "latency_ns")
                sc.sensor_latency_ns = cur.nonneg_i(key, cur.i64(key, val));
            else if (key == "latency_jitter_ns_sigma")
                sc.sensor_latency_jitter_ns_sigma = cur.nonneg(key, cur.f64(key, val));
            else if (key == "drop_prob")
                sc.sensor_drop_prob = cur.prob(key, cur.f64(key, val));
            else if (key == "match_window_ns")
                sc.match_window_ns = cur.positive_i(key, cur.i64(key, val));
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [sensors]");
        } else if (section == "nmea") {
            if (key == "enabled")
                sc.nmea_enabled = cur.boolean(key, val);
            else if (key == "emit_delay_ms")
                sc.nmea_emit_delay_ms = cur.nonneg_i(key, cur.i64(key, val));
            else
                cur.unknown("unknown key '" + std::string(key) + "' in [nmea]");
        }
    }
    return sc;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ScenarioFileError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad())
        throw ScenarioFileError("error reading scenario file: " + path);
    return parse_scenario(buf.str(), path);
}

void validate_scenario(const Scenario& sc) {
    sc.rtc.osc.validate();
    sc.mc.osc.validate();
    sc.obc.osc.validate();
    PiServo{sc.mc_servo.servo};
    PiServo{sc.obc_servo.servo};
    Discipline{sc.mc_servo};
    Discipline{sc.obc_servo};
    LinkModel{sc.link, NoiseStream{0}};
    if (sc.base_source == TriggerBaseSource::Tov && !(sc.base_tov_rate_hz > 0.0))
        throw ConfigError("base_source = tov requires tov_rate_hz in [triggers]");
    validate_config(sc.base_frequency_hz, sc.resolved_lines());
}

std::string render_scenario(const Scenario& sc) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%g", v);
        return std::string(buf);
    };
    auto flag = [](bool b) { return b ? "true" : "false"; };

    out << "duration_s = " << num(sc.duration_s) << "\n"
        << "master_seed = " << sc.master_seed << "\n"
        << "start_unix_s = " << sc.start_unix_s << "\n"
        << "out_dir = " << sc.out_dir << "\n";

    auto node = [&](const char* name, const NodeParams& n) {
        out << "\n[" << name << "]\n"
            << "freq_error_ppm = " << num(n.osc.freq_error_ppm) << "\n"
            << "drift_ppb_per_s = " << num(n.osc.drift_ppb_per_s) << "\n"
            << "random_walk_ppb_sigma = " << num(n.osc.random_walk_ppb_sigma) << "\n"
            << "white_noise_ns_sigma = " << num(n.osc.white_noise_ns_sigma) << "\n"
            << "tick_hz = " << n.tick_hz << "\n"
            << "initial_offset_ns = " << n.initial_offset_ns << "\n";
    };
    node("rtc", sc.rtc);
    out << "edge_jitter_ns_sigma = " << num(sc.rtc_edge_jitter_ns_sigma) << "\n"
        << "pps_drop_prob = " << num(sc.rtc_pps_drop_prob) << "\n";
    node("mc", sc.mc);
    node("obc", sc.obc);

    auto servo = [&](const char* name, const DisciplineConfig& dc) {
        out << "\n[" << name << "]\n"
            << "kp = " << num(dc.servo.kp) << "\n"
            << "ki = " << num(dc.servo.ki) << "\n"
            << "output_clamp_ppm = " << num(dc.servo.output_clamp_ppm) << "\n"
            << "step_threshold_ns = " << dc.step_threshold_ns << "\n"
            << "lock_threshold_ns = " << dc.lock_threshold_ns << "\n"
            << "lock_consecutive = " << dc.lock_consecutive << "\n";
    };
    servo("mc_servo", sc.mc_servo);
    servo("obc_servo", sc.obc_servo);

    out << "\n[link]\n"
        << "delay_m2s_ns = " << sc.link.delay_m2s_ns << "\n"
        << "delay_s2m_ns = " << sc.link.delay_s2m_ns << "\n"
        << "jitter_ns_sigma = " << num(sc.link.jitter_ns_sigma) << "\n"
        << "drop_prob = " << num(sc.link.drop_prob) << "\n";

    out << "\n[ptp]\n"
        << "sync_interval_s = " << num(sc.ptp_sync_interval_s) << "\n"
        << "exchange_timeout_s = " << num(sc.ptp_exchange_timeout_s) << "\n"
        << "start_after_mc_lock = " << flag(sc.ptp_start_after_mc_lock) << "\n";

    out << "\n[triggers]\n"
        << "base_frequency_hz = " << sc.base_frequency_hz << "\n"
        << "emission_jitter_max_ns = " << sc.emission_jitter_max_ns << "\n"
        << "base_source = "
        << (sc.base_source == TriggerBaseSource::Internal ? "internal" : "tov") << "\n";
    if (sc.base_tov_rate_hz > 0.0)
        out << "tov_rate_hz = " << num(sc.base_tov_rate_hz) << "\n";
    out << "start_after_mc_lock = " << flag(sc.triggers_start_after_mc_lock) << "\n";

    for (const TriggerLineConfig& ln : sc.resolved_lines()) {
        out << "\n[line]\n"
            << "id = " << ln.id << "\n";
        if (ln.mode == TriggerMode::Internal) {
            // divisor wins once resolved, so the rendering stays parseable
            if (ln.divisor > 0)
                out << "divisor = " << ln.divisor << "\n";
            else
                out << "rate_hz = " << num(ln.rate_hz) << "\n";
            out << "phase_ticks = " << ln.phase_ticks << "\n"
                << "mode = internal\n";
        } else {
            out << "mode = external_tov\n"
                << "tov_rate_hz = " << num(ln.tov_rate_hz) << "\n";
        }
        out << "pulse_width_us = " << num(ln.pulse_width_us) << "\n"
            << "service_delay_ns = " << ln.service_delay_ns << "\n";
    }

    out << "\n[sensors]\n"
        << "enabled = " << flag(sc.sensors_enabled) << "\n"
        << "latency_ns = " << sc.sensor_latency_ns << "\n"
        << "latency_jitter_ns_sigma = " << num(sc.sensor_latency_jitter_ns_sigma) << "\n"
        << "drop_prob = " << num(sc.sensor_drop_prob) << "\n"
        << "match_window_ns = " << sc.match_window_ns << "\n";

    out << "\n[nmea]\n"
        << "enabled = " << flag(sc.nmea_enabled) << "\n"
        << "emit_delay_ms = " << sc.nmea_emit_delay_ms << "\n";
    return out.str();
}

} // namespace syncsim
