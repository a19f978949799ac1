#include "syncsim/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <sstream>

#include "syncsim/errors.hpp"
#include "syncsim/nmea.hpp"
#include "syncsim/pps.hpp"
#include "syncsim/ptp.hpp"

namespace syncsim {
namespace {

// Tie-break priority at equal true time. PPS capture beats base tick beats
// PTP arrival beats measurement; remaining kinds slot in around them. Equal
// (time, kind) falls back to insertion order.
enum class EvKind : int {
    PpsEdge = 0,
    BaseTick = 1,
    TovEdge = 2,
    HoldoverCheck = 3,
    PtpSend = 4,
    PtpArrival = 5,
    MeasArrival = 6,
    NmeaEmit = 7,
};

struct Ev {
    std::int64_t t_ns = 0; // true time since scenario start
    EvKind kind = EvKind::PpsEdge;
    std::uint64_t order = 0; // insertion sequence

    PpsEdge edge{};               // PpsEdge; HoldoverCheck reuses edge.seq
    TimeInstant scheduled_local{}; // BaseTick
    int line_id = -1;             // TovEdge, MeasArrival
    bool tov_is_base = false;     // TovEdge
    std::int64_t tov_index = 0;   // TovEdge cadence index
    std::uint32_t ptp_seq = 0;    // PtpSend
    bool to_master = false;       // PtpArrival
    PtpMessage msg{};             // PtpArrival
    MeasurementRecord meas{};     // MeasArrival
};

struct EvAfter {
    bool operator()(const Ev& a, const Ev& b) const {
        if (a.t_ns != b.t_ns)
            return a.t_ns > b.t_ns;
        if (a.kind != b.kind)
            return static_cast<int>(a.kind) > static_cast<int>(b.kind);
        return a.order > b.order;
    }
};

std::string format_t_s(std::int64_t t_ns) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%lld.%09lld",
                  static_cast<long long>(t_ns / NS_PER_SEC),
                  static_cast<long long>(t_ns % NS_PER_SEC));
    return buf;
}

// Expected-period cell: integral values print bare (1250), otherwise three
// decimals, so the noiseless table reads exactly like the reference one.
std::string format_expected_us(double v) {
    char buf[48];
    if (v == std::floor(v) && std::abs(v) < 1e15)
        std::snprintf(buf, sizeof buf, "%.0f", v);
    else
        std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string format_3dp(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

class Sim {
public:
    explicit Sim(const Scenario& sc)
        : sc_(sc),
          start_{sc.start_unix_s, 0},
          duration_ns_(std::llround(sc.duration_s * 1e9)),
          pps_(make_pps(sc)),
          mc_(start_, TimeDelta::from_nanos(sc.mc.initial_offset_ns), node_osc(sc.mc),
              NoiseStream(sc.master_seed, "mc.osc")),
          obc_(start_, TimeDelta::from_nanos(sc.obc.initial_offset_ns), node_osc(sc.obc),
               NoiseStream(sc.master_seed, "obc.osc")),
          mc_disc_(sc.mc_servo),
          obc_disc_(sc.obc_servo),
          slave_(PtpSlave::Config{sc.ptp_exchange_timeout_s}),
          link_(sc.link, NoiseStream(sc.master_seed, "link")),
          engine_(sc.base_frequency_hz, sc.resolved_lines(), sc.emission_jitter_max_ns,
                  NoiseStream(sc.master_seed, "trigger.emit")),
          sensor_rng_(sc.master_seed, "sensor") {}

    SimOutputs run();

private:
    static OscillatorModel node_osc(const NodeParams& n) {
        OscillatorModel m = n.osc;
        m.tick = TickPeriod::from_frequency_hz(n.tick_hz);
        return m;
    }

    static PpsSource make_pps(const Scenario& sc) {
        TimeInstant start{sc.start_unix_s, 0};
        SimClock rtc(start, TimeDelta{}, node_osc(sc.rtc),
                     NoiseStream(sc.master_seed, "rtc.osc"));
        TimeInstant epoch_edge = add(start, TimeDelta::from_nanos(sc.rtc.initial_offset_ns));
        return PpsSource(epoch_edge, sc.start_unix_s, std::move(rtc),
                         PpsSource::Config{sc.rtc_edge_jitter_ns_sigma, sc.rtc_pps_drop_prob},
                         NoiseStream(sc.master_seed, "rtc.pps"));
    }

    void push(Ev ev) {
        ev.order = next_order_++;
        queue_.push(std::move(ev));
    }

    std::int64_t rel_ns(TimeInstant t) const { return delta(t, start_).nanos(); }

    void schedule_next_pps_edge() {
        PpsEdge e = pps_.next_edge();
        Ev ev;
        ev.t_ns = rel_ns(e.true_time);
        ev.kind = EvKind::PpsEdge;
        ev.edge = e;
        push(std::move(ev));
    }

    void schedule_next_base_tick(std::int64_t now_ns) {
        std::int64_t k = engine_.tick_index();
        TimeInstant local = engine_.tick_scheduled_local(k);
        std::int64_t dt_local = delta(local, mc_.now()).nanos();
        if (dt_local < 0)
            dt_local = 0; // a forward step can jump the grid; fire immediately
        Ev ev;
        ev.t_ns = now_ns + mc_.true_ns_for_local_ns(dt_local);
        ev.kind = EvKind::BaseTick;
        ev.scheduled_local = local;
        push(std::move(ev));
    }

    void schedule_tov(std::int64_t anchor_ns, std::int64_t k, double rate_hz,
                      int line_id, bool is_base) {
        Ev ev;
        ev.t_ns = anchor_ns + std::llround(static_cast<double>(k) * 1e9 / rate_hz);
        ev.kind = EvKind::TovEdge;
        ev.line_id = line_id;
        ev.tov_is_base = is_base;
        ev.tov_index = k;
        push(std::move(ev));
    }

    void schedule_ptp_send(std::int64_t now_ns, std::uint32_t seq) {
        std::int64_t dt_local = std::llround(sc_.ptp_sync_interval_s * 1e9);
        Ev ev;
        ev.t_ns = now_ns + mc_.true_ns_for_local_ns(dt_local);
        ev.kind = EvKind::PtpSend;
        ev.ptp_seq = seq;
        push(std::move(ev));
    }

    void send_to_slave(std::int64_t now_ns, const PtpMessage& msg) {
        auto arr = link_.transmit(LinkModel::Direction::MasterToSlave,
                                  add(start_, TimeDelta::from_nanos(now_ns)));
        if (!arr)
            return;
        Ev ev;
        ev.t_ns = rel_ns(*arr);
        ev.kind = EvKind::PtpArrival;
        ev.to_master = false;
        ev.msg = msg;
        push(std::move(ev));
    }

    void send_to_master(std::int64_t now_ns, const PtpMessage& msg) {
        auto arr = link_.transmit(LinkModel::Direction::SlaveToMaster,
                                  add(start_, TimeDelta::from_nanos(now_ns)));
        if (!arr)
            return;
        Ev ev;
        ev.t_ns = rel_ns(*arr);
        ev.kind = EvKind::PtpArrival;
        ev.to_master = true;
        ev.msg = msg;
        push(std::move(ev));
    }

    void start_triggers(std::int64_t now_ns) {
        if (triggers_started_)
            return;
        triggers_started_ = true;
        engine_.start(mc_.now());
        if (sc_.base_source == TriggerBaseSource::Internal) {
            schedule_next_base_tick(now_ns);
        } else {
            tov_base_anchor_ns_ = now_ns;
            schedule_tov(now_ns, 1, sc_.base_tov_rate_hz, -1, true);
        }
        for (const TriggerLineConfig& ln : engine_.lines()) {
            if (ln.mode != TriggerMode::ExternalTov)
                continue;
            tov_line_anchor_ns_[ln.id] = now_ns;
            schedule_tov(now_ns, 1, ln.tov_rate_hz, ln.id, false);
        }
    }

    void start_ptp(std::int64_t now_ns) {
        if (ptp_started_)
            return;
        ptp_started_ = true;
        schedule_ptp_send(now_ns, 1);
    }

    void record_trigger(std::int64_t now_ns, const TriggerEvent& tev) {
        out_.triggers.push_back(tev);
        if (!sc_.sensors_enabled)
            return;
        if (sc_.sensor_drop_prob > 0.0 && sensor_rng_.bernoulli(sc_.sensor_drop_prob))
            return;
        std::int64_t lat = sc_.sensor_latency_ns;
        if (sc_.sensor_latency_jitter_ns_sigma > 0.0)
            lat += std::llround(sensor_rng_.normal(sc_.sensor_latency_jitter_ns_sigma));
        if (lat < 0)
            lat = 0;
        Ev ev;
        ev.t_ns = now_ns + lat;
        ev.kind = EvKind::MeasArrival;
        ev.line_id = tev.line_id;
        ev.meas = MeasurementRecord{tev.line_id,
                                    add(tev.emitted_time, TimeDelta::from_nanos(lat)),
                                    tev.seq};
        push(std::move(ev));
    }

    void on_pps_edge(const Ev& ev);
    void on_base_tick(const Ev& ev);
    void on_tov_edge(const Ev& ev);
    void on_holdover_check(const Ev& ev);
    void on_ptp_send(const Ev& ev);
    void on_ptp_arrival(const Ev& ev);
    void finalize();

    Scenario sc_;
    TimeInstant start_;
    std::int64_t duration_ns_;

    PpsSource pps_;
    SimClock mc_;
    SimClock obc_;
    Discipline mc_disc_;
    Discipline obc_disc_;
    PtpMaster master_;
    PtpSlave slave_;
    LinkModel link_;
    TriggerEngine engine_;
    NoiseStream sensor_rng_;

    std::priority_queue<Ev, std::vector<Ev>, EvAfter> queue_;
    std::uint64_t next_order_ = 0;
    std::int64_t last_pop_ns_ = -1;

    bool triggers_started_ = false;
    bool ptp_started_ = false;
    std::int64_t tov_base_anchor_ns_ = 0;
    std::map<int, std::int64_t> tov_line_anchor_ns_;

    std::int64_t last_capture_seq_ = 0;
    std::optional<TimeInstant> prev_capture_local_;
    std::optional<TimeInstant> prev_obc_update_local_;
    std::int64_t mc_lock_ns_ = -1;
    std::int64_t obc_lock_ns_ = -1;
    std::vector<std::int64_t> obc_abs_post_lock_;

    std::map<std::int64_t, OffsetRow> offset_rows_;
    std::map<int, std::vector<MeasurementRecord>> meas_by_line_;
    SimOutputs out_;
};

void Sim::on_pps_edge(const Ev& ev) {
    ++out_.report.pps_edges;
    schedule_next_pps_edge();

    if (sc_.nmea_enabled) {
        Ev ne;
        ne.t_ns = ev.t_ns + sc_.nmea_emit_delay_ms * 1'000'000;
        ne.kind = EvKind::NmeaEmit;
        ne.edge = ev.edge;
        push(std::move(ne));
    }

    if (ev.edge.dropped)
        return; // edge lost on the wire; the discipline sees nothing

    PpsCapture cap = capture_edge(mc_, ev.edge);
    ++out_.report.pps_captures;
    last_capture_seq_ = cap.seq;

    double interval_s = 1.0;
    if (prev_capture_local_)
        interval_s = delta(cap.local_timestamp, *prev_capture_local_).seconds();

    mc_disc_.pps_tick(mc_, cap, interval_s);
    // Post-update reading, so a step re-bases the next interval measurement.
    prev_capture_local_ = mc_.now();
    std::int64_t off = mc_disc_.offset_history().back().offset_ns;
    offset_rows_[ev.t_ns].t_ns = ev.t_ns;
    offset_rows_[ev.t_ns].rtc_mc_offset_ns = off;

    if (mc_disc_.locked() && mc_lock_ns_ < 0) {
        mc_lock_ns_ = ev.t_ns;
        if (sc_.triggers_start_after_mc_lock)
            start_triggers(ev.t_ns);
        if (sc_.ptp_start_after_mc_lock)
            start_ptp(ev.t_ns);
    }
    if (mc_lock_ns_ >= 0) {
        std::int64_t mag = off < 0 ? -off : off;
        if (mag > out_.report.max_abs_mc_offset_after_lock_ns)
            out_.report.max_abs_mc_offset_after_lock_ns = mag;
    }

    // Watchdog for the next edge: 1.5 nominal periods with no capture is a
    // lost reference.
    Ev hc;
    hc.t_ns = ev.t_ns + 1'500'000'000;
    hc.kind = EvKind::HoldoverCheck;
    hc.edge.seq = cap.seq + 1;
    push(std::move(hc));
}

void Sim::on_holdover_check(const Ev& ev) {
    if (last_capture_seq_ >= ev.edge.seq)
        return;
    if (!mc_disc_.in_holdover()) {
        mc_disc_.enter_holdover();
        ++out_.report.holdover_entries;
    }
}

void Sim::on_base_tick(const Ev& ev) {
    mc_.advance_to_true(add(start_, TimeDelta::from_nanos(ev.t_ns)));
    for (const TriggerEvent& tev : engine_.tick(mc_, ev.scheduled_local))
        record_trigger(ev.t_ns, tev);
    schedule_next_base_tick(ev.t_ns);
}

void Sim::on_tov_edge(const Ev& ev) {
    mc_.advance_to_true(add(start_, TimeDelta::from_nanos(ev.t_ns)));
    if (ev.tov_is_base) {
        // TOV-driven base: the captured edge timestamp is the tick schedule.
        TimeInstant captured = mc_.sample();
        for (const TriggerEvent& tev : engine_.tick(mc_, captured))
            record_trigger(ev.t_ns, tev);
        schedule_tov(tov_base_anchor_ns_, ev.tov_index + 1, sc_.base_tov_rate_hz, -1, true);
    } else {
        record_trigger(ev.t_ns, engine_.external_tov_event(ev.line_id, mc_));
        schedule_tov(tov_line_anchor_ns_[ev.line_id], ev.tov_index + 1,
                     engine_.line(ev.line_id).tov_rate_hz, ev.line_id, false);
    }
}

void Sim::on_ptp_send(const Ev& ev) {
    mc_.advance_to_true(add(start_, TimeDelta::from_nanos(ev.t_ns)));
    auto [sync, follow] = master_.emit_sync(mc_, ev.ptp_seq);
    send_to_slave(ev.t_ns, sync);
    send_to_slave(ev.t_ns, follow);
    schedule_ptp_send(ev.t_ns, ev.ptp_seq + 1);
}

void Sim::on_ptp_arrival(const Ev& ev) {
    if (ev.to_master) {
        mc_.advance_to_true(add(start_, TimeDelta::from_nanos(ev.t_ns)));
        PtpMessage resp = master_.on_delay_req(mc_, ev.msg);
        send_to_slave(ev.t_ns, resp);
        return;
    }

    obc_.advance_to_true(add(start_, TimeDelta::from_nanos(ev.t_ns)));
    switch (ev.msg.kind) {
    case PtpMessageKind::Sync:
        slave_.on_sync(obc_, ev.msg);
        break;
    case PtpMessageKind::FollowUp: {
        auto req = slave_.on_follow_up(obc_, ev.msg);
        if (req)
            send_to_master(ev.t_ns, *req);
        break;
    }
    case PtpMessageKind::DelayResp: {
        auto s = slave_.on_delay_resp(obc_, ev.msg);
        if (s) {
            double interval_s = sc_.ptp_sync_interval_s;
            TimeInstant now_local = obc_.now();
            if (prev_obc_update_local_)
                interval_s = delta(now_local, *prev_obc_update_local_).seconds();

            obc_disc_.update(obc_, s->seq, now_local,
                             TimeDelta::from_nanos(s->offset_ns), interval_s);
            prev_obc_update_local_ = obc_.now();
            offset_rows_[ev.t_ns].t_ns = ev.t_ns;
            offset_rows_[ev.t_ns].mc_obc_offset_ns = s->offset_ns;

            if (obc_disc_.locked() && obc_lock_ns_ < 0)
                obc_lock_ns_ = ev.t_ns;
            if (obc_lock_ns_ >= 0) {
                std::int64_t mag = s->offset_ns < 0 ? -s->offset_ns : s->offset_ns;
                obc_abs_post_lock_.push_back(mag);
                if (mag > out_.report.max_abs_obc_offset_after_lock_ns)
                    out_.report.max_abs_obc_offset_after_lock_ns = mag;
            }
        }
        break;
    }
    default:
        throw IntegrityError("unexpected PTP message kind at slave");
    }
    slave_.purge_stale(obc_.now());
}

void Sim::finalize() {
    SimReport& rep = out_.report;
    rep.mc_lock_time_s = mc_lock_ns_ < 0 ? -1.0 : static_cast<double>(mc_lock_ns_) * 1e-9;
    rep.obc_lock_time_s = obc_lock_ns_ < 0 ? -1.0 : static_cast<double>(obc_lock_ns_) * 1e-9;

    if (!obc_abs_post_lock_.empty()) {
        std::vector<std::int64_t> v = obc_abs_post_lock_;
        std::sort(v.begin(), v.end());
        std::size_t n = v.size();
        std::size_t rank = static_cast<std::size_t>(
            std::ceil(0.99 * static_cast<double>(n)));
        rep.obc_p99_abs_offset_after_lock_ns = v[rank == 0 ? 0 : rank - 1];
    }

    rep.triggers_emitted = static_cast<std::int64_t>(out_.triggers.size());
    rep.mc_steps = mc_.step_count();
    rep.obc_steps = obc_.step_count();
    rep.rate_clamp_warnings = mc_.clamp_warning_count() + obc_.clamp_warning_count();
    rep.ptp_exchanges_completed = slave_.completed_count();
    rep.ptp_messages_dropped = link_.dropped_count();
    rep.ptp_orphans = slave_.orphan_count();
    rep.ptp_timeouts = slave_.timeout_count();
    rep.nmea_sentences = static_cast<std::int64_t>(out_.nmea.size());

    // Per-line interval statistics, ordered by ascending expected period.
    std::map<int, std::vector<TriggerEvent>> by_line;
    for (const TriggerEvent& t : out_.triggers)
        by_line[t.line_id].push_back(t);
    for (const TriggerLineConfig& ln : engine_.lines()) {
        const auto it = by_line.find(ln.id);
        LineReport lr;
        lr.line_id = ln.id;
        std::int64_t divisor = 1;
        TickPeriod period = engine_.base_period();
        if (ln.mode == TriggerMode::Internal) {
            divisor = ln.divisor;
        } else {
            period = TickPeriod{std::llround(1e9 / ln.tov_rate_hz), 1};
        }
        if (it != by_line.end() && it->second.size() >= 2) {
            lr.stats = interval_stats(it->second, divisor, period);
        } else {
            lr.stats.expected_us = static_cast<double>(divisor) *
                                   static_cast<double>(period.num) /
                                   (static_cast<double>(period.den) * 1000.0);
        }
        rep.line_stats.push_back(lr);
    }
    std::sort(rep.line_stats.begin(), rep.line_stats.end(),
              [](const LineReport& a, const LineReport& b) {
                  if (a.stats.expected_us != b.stats.expected_us)
                      return a.stats.expected_us < b.stats.expected_us;
                  return a.line_id < b.line_id;
              });

    // Trigger-measurement association, per line.
    if (sc_.sensors_enabled) {
        const std::vector<MeasurementRecord> none;
        for (auto& [line_id, trigs] : by_line) {
            auto mit = meas_by_line_.find(line_id);
            const std::vector<MeasurementRecord>& meas =
                mit == meas_by_line_.end() ? none : mit->second;
            MatchOutcome mo = match_measurements(trigs, meas, sc_.sensor_latency_ns,
                                                 sc_.match_window_ns);
            rep.matched += mo.matched;
            rep.unmatched_measurements +=
                static_cast<std::int64_t>(mo.unmatched_measurements.size());
            for (const MatchResult& mr : mo.triggers)
                if (!mr.measurement)
                    ++rep.unmatched_triggers;
        }
        if (rep.triggers_emitted > 0)
            rep.match_rate = static_cast<double>(rep.matched) /
                             static_cast<double>(rep.triggers_emitted);
    }

    out_.offsets.reserve(offset_rows_.size());
    for (auto& [t, row] : offset_rows_)
        out_.offsets.push_back(row);
}

SimOutputs Sim::run() {
    out_.start_unix_s = sc_.start_unix_s;
    schedule_next_pps_edge();
    if (!sc_.triggers_start_after_mc_lock)
        start_triggers(0);
    if (!sc_.ptp_start_after_mc_lock)
        start_ptp(0);

    while (!queue_.empty()) {
        Ev ev = queue_.top();
        queue_.pop();
        if (ev.t_ns > duration_ns_)
            break; // heap order: everything left is later still
        if (ev.t_ns < last_pop_ns_)
            throw IntegrityError("event queue popped backwards: " +
                                 std::to_string(ev.t_ns) + " after " +
                                 std::to_string(last_pop_ns_));
        last_pop_ns_ = ev.t_ns;

        switch (ev.kind) {
        case EvKind::PpsEdge:
            on_pps_edge(ev);
            break;
        case EvKind::BaseTick:
            on_base_tick(ev);
            break;
        case EvKind::TovEdge:
            on_tov_edge(ev);
            break;
        case EvKind::HoldoverCheck:
            on_holdover_check(ev);
            break;
        case EvKind::PtpSend:
            on_ptp_send(ev);
            break;
        case EvKind::PtpArrival:
            on_ptp_arrival(ev);
            break;
        case EvKind::MeasArrival:
            ++out_.report.measurements_arrived;
            meas_by_line_[ev.line_id].push_back(ev.meas);
            break;
        case EvKind::NmeaEmit:
            out_.nmea.push_back(NmeaLogEntry{
                ev.edge.seq, format_zda(TimeInstant{ev.edge.label_second, 0})});
            break;
        }
    }

    finalize();
    return out_;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f)
        throw Error("cannot open for writing: " + path);
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    f.flush();
    if (!f)
        throw Error("write failed: " + path);
}

} // namespace

SimOutputs run_simulation(const Scenario& sc) {
    validate_scenario(sc);
    Sim sim(sc);
    return sim.run();
}

void export_offset_trace(const SimOutputs& out, const std::string& path) {
    std::string buf = "t_s,rtc_mc_offset_ns,mc_obc_offset_ns\n";
    for (const OffsetRow& row : out.offsets) {
        buf += format_t_s(row.t_ns);
        buf += ',';
        if (row.rtc_mc_offset_ns)
            buf += std::to_string(*row.rtc_mc_offset_ns);
        buf += ',';
        if (row.mc_obc_offset_ns)
            buf += std::to_string(*row.mc_obc_offset_ns);
        buf += '\n';
    }
    write_file(path, buf);
}

void export_trigger_log(const SimOutputs& out, const std::string& path) {
    // scheduled/emitted are local-clock instants in ns, relative to the
    // scenario start second.
    std::string buf = "line_id,seq,scheduled_ns,emitted_ns\n";
    buf.reserve(buf.size() + out.triggers.size() * 48);
    const TimeInstant origin{out.start_unix_s, 0};
    char line[128];
    for (const TriggerEvent& t : out.triggers) {
        std::snprintf(line, sizeof line, "%d,%lld,%lld,%lld\n", t.line_id,
                      static_cast<long long>(t.seq),
                      static_cast<long long>(delta(t.scheduled_time, origin).nanos()),
                      static_cast<long long>(delta(t.emitted_time, origin).nanos()));
        buf += line;
    }
    write_file(path, buf);
}

std::string render_trigger_table(const std::vector<LineReport>& lines) {
    std::ostringstream out;
    out << "Line  Expected [µs]  Mean [µs]      Std [µs]   Intervals\n";
    for (const LineReport& lr : lines) {
        char row[160];
        std::snprintf(row, sizeof row, "%-5d %-14s %-14s %-10s %lld\n", lr.line_id,
                      format_expected_us(lr.stats.expected_us).c_str(),
                      format_3dp(lr.stats.mean_us).c_str(),
                      format_3dp(lr.stats.std_us).c_str(),
                      static_cast<long long>(lr.stats.count));
        out << row;
    }
    return out.str();
}

void export_trigger_table(const SimReport& report, const std::string& path) {
    write_file(path, render_trigger_table(report.line_stats));
}

void export_nmea_log(const SimOutputs& out, const std::string& path) {
    std::string buf;
    for (const NmeaLogEntry& e : out.nmea) {
        buf += std::to_string(e.edge_seq);
        buf += ' ';
        buf += e.sentence; // sentence carries its own CRLF line ending
    }
    write_file(path, buf);
}

void export_report(const SimReport& r, const std::string& path) {
    std::ostringstream out;
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.9g", v);
        return std::string(buf);
    };
    out << "mc_lock_time_s = " << num(r.mc_lock_time_s) << "\n"
        << "obc_lock_time_s = " << num(r.obc_lock_time_s) << "\n"
        << "max_abs_mc_offset_after_lock_ns = " << r.max_abs_mc_offset_after_lock_ns << "\n"
        << "max_abs_obc_offset_after_lock_ns = " << r.max_abs_obc_offset_after_lock_ns << "\n"
        << "obc_p99_abs_offset_after_lock_ns = " << r.obc_p99_abs_offset_after_lock_ns << "\n"
        << "pps_edges = " << r.pps_edges << "\n"
        << "pps_captures = " << r.pps_captures << "\n"
        << "holdover_entries = " << r.holdover_entries << "\n"
        << "mc_steps = " << r.mc_steps << "\n"
        << "obc_steps = " << r.obc_steps << "\n"
        << "ptp_exchanges_completed = " << r.ptp_exchanges_completed << "\n"
        << "ptp_messages_dropped = " << r.ptp_messages_dropped << "\n"
        << "ptp_orphans = " << r.ptp_orphans << "\n"
        << "ptp_timeouts = " << r.ptp_timeouts << "\n"
        << "triggers_emitted = " << r.triggers_emitted << "\n"
        << "measurements_arrived = " << r.measurements_arrived << "\n"
        << "matched = " << r.matched << "\n"
        << "unmatched_triggers = " << r.unmatched_triggers << "\n"
        << "unmatched_measurements = " << r.unmatched_measurements << "\n"
        << "match_rate = " << num(r.match_rate) << "\n"
        << "nmea_sentences = " << r.nmea_sentences << "\n"
        << "rate_clamp_warnings = " << r.rate_clamp_warnings << "\n";
    for (const LineReport& lr : r.line_stats) {
        out << "line_" << lr.line_id << "_expected_us = " << num(lr.stats.expected_us) << "\n"
            << "line_" << lr.line_id << "_mean_us = " << num(lr.stats.mean_us) << "\n"
            << "line_" << lr.line_id << "_std_us = " << num(lr.stats.std_us) << "\n"
            << "line_" << lr.line_id << "_intervals = " << lr.stats.count << "\n";
    }
    write_file(path, out.str());
}

std::vector<LineReport> stats_from_trigger_log(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error("cannot open trigger log: " + path);
    std::string header;
    if (!std::getline(in, header) || header != "line_id,seq,scheduled_ns,emitted_ns")
        throw ParseError("trigger log: bad header in " + path);

    struct Acc {
        std::vector<std::int64_t> scheduled, emitted;
    };
    std::map<int, Acc> acc;
    std::string line;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        int id;
        long long seq, sched, emit;
        if (std::sscanf(line.c_str(), "%d,%lld,%lld,%lld", &id, &seq, &sched, &emit) != 4)
            throw ParseError("trigger log: bad row at line " + std::to_string(lineno));
        acc[id].scheduled.push_back(sched);
        acc[id].emitted.push_back(emit);
    }

    std::vector<LineReport> reports;
    for (auto& [id, a] : acc) {
        if (a.emitted.size() < 2)
            throw ContractError("trigger log: line " + std::to_string(id) +
                                " has fewer than 2 events");
        // The expected period is not stored in the log; recover it as the
        // median scheduled interval (exact for grid-scheduled lines).
        std::vector<std::int64_t> sdiff;
        sdiff.reserve(a.scheduled.size() - 1);
        for (std::size_t i = 1; i < a.scheduled.size(); ++i)
            sdiff.push_back(a.scheduled[i] - a.scheduled[i - 1]);
        std::nth_element(sdiff.begin(), sdiff.begin() + sdiff.size() / 2, sdiff.end());
        double expected_us = static_cast<double>(sdiff[sdiff.size() / 2]) / 1000.0;

        double sum = 0.0;
        std::vector<double> diffs;
        diffs.reserve(a.emitted.size() - 1);
        for (std::size_t i = 1; i < a.emitted.size(); ++i) {
            diffs.push_back(static_cast<double>(a.emitted[i] - a.emitted[i - 1]) / 1000.0);
            sum += diffs.back();
        }
        double mean = sum / static_cast<double>(diffs.size());
        double ss = 0.0;
        for (double d : diffs)
            ss += (d - mean) * (d - mean);

        LineReport lr;
        lr.line_id = id;
        lr.stats.expected_us = expected_us;
        lr.stats.mean_us = mean;
        lr.stats.std_us = std::sqrt(ss / static_cast<double>(diffs.size()));
        lr.stats.count = static_cast<std::int64_t>(diffs.size());
        reports.push_back(lr);
    }
    std::sort(reports.begin(), reports.end(), [](const LineReport& a, const LineReport& b) {
        if (a.stats.expected_us != b.stats.expected_us)
            return a.stats.expected_us < b.stats.expected_us;
        return a.line_id < b.line_id;
    });
    return reports;
}

} // namespace syncsim
