#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "syncsim/errors.hpp"
#include "syncsim/sim.hpp"

using namespace syncsim;
namespace fs = std::filesystem;

namespace {

Scenario parse(std::string_view text) {
    return parse_scenario(text, "test");
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("noiseless chain locks and stays at zero") {
    SimOutputs out = run_simulation(parse(
        "duration_s = 12\n"
        "[triggers]\n"
        "emission_jitter_max_ns = 0\n"));
    const SimReport& r = out.report;

    CHECK(r.mc_lock_time_s == doctest::Approx(5.0));
    CHECK(r.obc_lock_time_s > r.mc_lock_time_s);
    CHECK(r.obc_lock_time_s < 11.0);
    CHECK(r.max_abs_mc_offset_after_lock_ns == 0);
    CHECK(r.max_abs_obc_offset_after_lock_ns == 0);
    CHECK(r.obc_p99_abs_offset_after_lock_ns == 0);
    CHECK(r.mc_steps == 0);
    CHECK(r.obc_steps == 0);
    CHECK(r.holdover_entries == 0);
    CHECK(r.pps_edges >= 11);
    CHECK(r.pps_captures == r.pps_edges);
    CHECK(r.rate_clamp_warnings == 0);
    CHECK(r.ptp_exchanges_completed > 0);
    CHECK(r.ptp_messages_dropped == 0);
    CHECK(r.ptp_orphans == 0);
    CHECK(r.ptp_timeouts == 0);

    std::int64_t rtc_rows = 0, obc_rows = 0;
    for (const OffsetRow& row : out.offsets) {
        if (row.rtc_mc_offset_ns) {
            ++rtc_rows;
            CHECK(*row.rtc_mc_offset_ns == 0);
        }
        if (row.mc_obc_offset_ns) {
            ++obc_rows;
            CHECK(*row.mc_obc_offset_ns == 0);
        }
    }
    CHECK(rtc_rows == r.pps_captures);
    CHECK(obc_rows == r.ptp_exchanges_completed);

    REQUIRE(r.line_stats.size() == 3);
    CHECK(r.line_stats[0].stats.expected_us == 1250.0);
    CHECK(r.line_stats[0].stats.mean_us == 1250.0);
    CHECK(r.line_stats[0].stats.std_us == 0.0);
    CHECK(r.line_stats[1].stats.expected_us == 50'000.0);
    CHECK(r.line_stats[2].stats.expected_us == 100'000.0);
    CHECK(r.triggers_emitted > 5000);
    CHECK(static_cast<std::int64_t>(out.triggers.size()) == r.triggers_emitted);
    CHECK(r.nmea_sentences >= r.pps_edges - 1);

    // conservation: every trigger and every arrival is accounted for exactly once
    CHECK(r.matched + r.unmatched_triggers == r.triggers_emitted);
    CHECK(r.matched + r.unmatched_measurements == r.measurements_arrived);
    CHECK(r.unmatched_measurements == 0);
    CHECK(r.match_rate ==
          doctest::Approx(static_cast<double>(r.matched) /
                          static_cast<double>(r.triggers_emitted)));
}

TEST_CASE("identical scenarios replay identically") {
    Scenario sc = parse(
        "duration_s = 12\n"
        "master_seed = 7\n"
        "[rtc]\n"
        "edge_jitter_ns_sigma = 10\n"
        "[mc]\n"
        "freq_error_ppm = 5\n"
        "random_walk_ppb_sigma = 1\n"
        "initial_offset_ns = 300000\n"
        "[obc]\n"
        "freq_error_ppm = -20\n"
        "white_noise_ns_sigma = 1000\n"
        "initial_offset_ns = 2500000\n"
        "[link]\n"
        "jitter_ns_sigma = 2000\n"
        "[ptp]\n"
        "start_after_mc_lock = false\n"
        "[triggers]\n"
        "start_after_mc_lock = false\n"
        "[sensors]\n"
        "latency_jitter_ns_sigma = 500\n"
        "drop_prob = 0.05\n");
    SimOutputs a = run_simulation(sc);
    SimOutputs b = run_simulation(sc);

    REQUIRE(a.offsets.size() == b.offsets.size());
    for (std::size_t i = 0; i < a.offsets.size(); ++i) {
        CHECK(a.offsets[i].t_ns == b.offsets[i].t_ns);
        CHECK(a.offsets[i].rtc_mc_offset_ns == b.offsets[i].rtc_mc_offset_ns);
        CHECK(a.offsets[i].mc_obc_offset_ns == b.offsets[i].mc_obc_offset_ns);
    }
    REQUIRE(a.triggers.size() == b.triggers.size());
    for (std::size_t i = 0; i < a.triggers.size(); ++i) {
        CHECK(a.triggers[i].line_id == b.triggers[i].line_id);
        CHECK(a.triggers[i].seq == b.triggers[i].seq);
        CHECK(a.triggers[i].scheduled_time == b.triggers[i].scheduled_time);
        CHECK(a.triggers[i].emitted_time == b.triggers[i].emitted_time);
    }
    REQUIRE(a.nmea.size() == b.nmea.size());
    for (std::size_t i = 0; i < a.nmea.size(); ++i) {
        CHECK(a.nmea[i].edge_seq == b.nmea[i].edge_seq);
        CHECK(a.nmea[i].sentence == b.nmea[i].sentence);
    }
    CHECK(a.report.triggers_emitted == b.report.triggers_emitted);
    CHECK(a.report.matched == b.report.matched);
    CHECK(a.report.ptp_exchanges_completed == b.report.ptp_exchanges_completed);
    CHECK(a.report.mc_lock_time_s == b.report.mc_lock_time_s);

    SUBCASE("and a different seed diverges") {
        Scenario other = sc;
        other.master_seed = 8;
        SimOutputs c = run_simulation(other);
        bool same = a.offsets.size() == c.offsets.size();
        if (same)
            for (std::size_t i = 0; i < a.offsets.size(); ++i)
                same = same && a.offsets[i].rtc_mc_offset_ns == c.offsets[i].rtc_mc_offset_ns;
        CHECK_FALSE(same);
    }
}

TEST_CASE("link noise stream is independent of the RTC and PPS streams") {
    // Turning on link drops must not move a single PPS edge or NMEA byte:
    // those derive from the rtc.* streams only. MC noise is zeroed because
    // its advance partitioning legitimately changes with the event set.
    std::string base =
        "duration_s = 20\n"
        "[rtc]\n"
        "edge_jitter_ns_sigma = 10\n"
        "[mc]\n"
        "freq_error_ppm = 5\n"
        "initial_offset_ns = 300000\n"
        "[obc]\n"
        "freq_error_ppm = -20\n"
        "white_noise_ns_sigma = 1000\n"
        "[ptp]\n"
        "start_after_mc_lock = false\n"
        "[link]\n"
        "jitter_ns_sigma = 2000\n";
    std::string dropped = base + "drop_prob = 0.5\n";

    SimOutputs a = run_simulation(parse(base));
    SimOutputs b = run_simulation(parse(dropped));

    CHECK(b.report.ptp_messages_dropped > 0);
    CHECK(a.report.pps_edges == b.report.pps_edges);
    CHECK(a.report.pps_captures == b.report.pps_captures);

    REQUIRE(a.nmea.size() == b.nmea.size());
    for (std::size_t i = 0; i < a.nmea.size(); ++i)
        CHECK(a.nmea[i].sentence == b.nmea[i].sentence);

    std::vector<std::int64_t> ta, tb;
    for (const OffsetRow& row : a.offsets)
        if (row.rtc_mc_offset_ns)
            ta.push_back(row.t_ns);
    for (const OffsetRow& row : b.offsets)
        if (row.rtc_mc_offset_ns)
            tb.push_back(row.t_ns);
    CHECK(ta == tb);
}

TEST_CASE("dropped PPS edges push the MC into holdover") {
    SimOutputs out = run_simulation(parse(
        "duration_s = 40\n"
        "[rtc]\n"
        "pps_drop_prob = 0.35\n"
        "[sensors]\n"
        "enabled = false\n"));
    const SimReport& r = out.report;
    CHECK(r.pps_edges >= 39);
    CHECK(r.pps_captures < r.pps_edges);
    CHECK(r.holdover_entries >= 1);
    CHECK(r.nmea_sentences >= r.pps_edges - 1); // NMEA rides the edge, not the capture
}

TEST_CASE("TOV-driven base timer keeps the divisor grid") {
    SimOutputs out = run_simulation(parse(
        "duration_s = 12\n"
        "[triggers]\n"
        "base_frequency_hz = 400\n"
        "base_source = tov\n"
        "tov_rate_hz = 400\n"
        "start_after_mc_lock = false\n"
        "emission_jitter_max_ns = 0\n"
        "[line]\n"
        "id = 0\n"
        "divisor = 2\n"
        "[sensors]\n"
        "enabled = false\n"
        "[nmea]\n"
        "enabled = false\n"));
    REQUIRE(out.report.line_stats.size() == 1);
    const IntervalStats& st = out.report.line_stats[0].stats;
    CHECK(st.expected_us == 5000.0);
    CHECK(st.mean_us == 5000.0);
    CHECK(st.std_us == 0.0);
    CHECK(st.count > 2000);
}

TEST_CASE("external TOV lines fire from their own cadence") {
    SimOutputs out = run_simulation(parse(
        "duration_s = 12\n"
        "[triggers]\n"
        "start_after_mc_lock = false\n"
        "emission_jitter_max_ns = 0\n"
        "[line]\n"
        "id = 0\n"
        "rate_hz = 800\n"
        "[line]\n"
        "id = 9\n"
        "mode = external_tov\n"
        "tov_rate_hz = 2\n"
        "[sensors]\n"
        "enabled = false\n"
        "[nmea]\n"
        "enabled = false\n"));
    std::int64_t tov_events = 0;
    for (const TriggerEvent& ev : out.triggers)
        if (ev.line_id == 9) {
            ++tov_events;
            CHECK(ev.tick_index == -1);
        }
    CHECK(tov_events >= 20);
    REQUIRE(out.report.line_stats.size() == 2);
    CHECK(out.report.line_stats[1].line_id == 9);
    CHECK(out.report.line_stats[1].stats.expected_us == 500'000.0);
    CHECK(out.report.line_stats[1].stats.mean_us ==
          doctest::Approx(500'000.0).epsilon(1e-6));
}

TEST_CASE("a lossy PTP link times out but still completes exchanges") {
    SimOutputs out = run_simulation(parse(
        "duration_s = 40\n"
        "[link]\n"
        "drop_prob = 0.3\n"
        "[ptp]\n"
        "start_after_mc_lock = false\n"
        "[sensors]\n"
        "enabled = false\n"
        "[nmea]\n"
        "enabled = false\n"));
    const SimReport& r = out.report;
    CHECK(r.ptp_messages_dropped > 0);
    CHECK(r.ptp_timeouts > 0);
    CHECK(r.ptp_exchanges_completed > 0);
    CHECK(r.ptp_orphans == 0); // drops lose messages, they never duplicate them
}

TEST_CASE("exports round-trip through the stats reader") {
    SimOutputs out = run_simulation(parse("duration_s = 12\n"));
    fs::path dir = fs::temp_directory_path() / "syncsim_unit_exports";
    fs::create_directories(dir);

    export_trigger_log(out, (dir / "triggers.csv").string());
    export_trigger_table(out.report, (dir / "trigger_stats.txt").string());
    auto recovered = stats_from_trigger_log((dir / "triggers.csv").string());
    CHECK(render_trigger_table(recovered) == slurp(dir / "trigger_stats.txt"));

    export_offset_trace(out, (dir / "offsets.csv").string());
    std::string csv = slurp(dir / "offsets.csv");
    CHECK(csv.rfind("t_s,rtc_mc_offset_ns,mc_obc_offset_ns\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') ==
          static_cast<std::ptrdiff_t>(out.offsets.size()) + 1);

    export_nmea_log(out, (dir / "nmea.log").string());
    std::string log = slurp(dir / "nmea.log");
    CHECK(std::count(log.begin(), log.end(), '\n') ==
          static_cast<std::ptrdiff_t>(out.nmea.size()));
    CHECK(log.find("$GPZDA,") != std::string::npos);

    export_report(out.report, (dir / "report.txt").string());
    std::string rep = slurp(dir / "report.txt");
    CHECK(rep.find("mc_lock_time_s = ") != std::string::npos);
    CHECK(rep.find("triggers_emitted = ") != std::string::npos);
    CHECK(rep.find("line_0_expected_us = ") != std::string::npos);
}
