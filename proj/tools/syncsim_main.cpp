#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "syncsim/errors.hpp"
#include "syncsim/scenario.hpp"
#include "syncsim/sim.hpp"

namespace {

int cmd_run(const std::string& scenario_path, const std::string& out_override,
            bool have_seed, std::uint64_t seed) {
    syncsim::Scenario sc = syncsim::load_scenario(scenario_path);
    if (have_seed)
        sc.master_seed = seed;
    if (!out_override.empty())
        sc.out_dir = out_override;

    syncsim::SimOutputs out = syncsim::run_simulation(sc);

    std::filesystem::create_directories(sc.out_dir);
    const std::string dir = sc.out_dir + "/";
    syncsim::export_offset_trace(out, dir + "offsets.csv");
    syncsim::export_trigger_log(out, dir + "triggers.csv");
    syncsim::export_trigger_table(out.report, dir + "trigger_stats.txt");
    syncsim::export_nmea_log(out, dir + "nmea.log");
    syncsim::export_report(out.report, dir + "report.txt");

    const syncsim::SimReport& r = out.report;
    std::cout << "wrote " << sc.out_dir
              << "/{offsets.csv,triggers.csv,trigger_stats.txt,nmea.log,report.txt}\n"
              << "mc lock: " << r.mc_lock_time_s << " s, obc lock: " << r.obc_lock_time_s
              << " s\n"
              << "post-lock max |offset|: mc " << r.max_abs_mc_offset_after_lock_ns
              << " ns, obc " << r.max_abs_obc_offset_after_lock_ns << " ns\n"
              << "triggers: " << r.triggers_emitted << ", matched: " << r.matched
              << ", nmea: " << r.nmea_sentences << "\n";
    return 0;
}

int cmd_stats(const std::string& log_path) {
    std::cout << syncsim::render_trigger_table(syncsim::stats_from_trigger_log(log_path));
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    syncsim::Scenario sc = syncsim::load_scenario(scenario_path);
    syncsim::validate_scenario(sc);
    sc.lines = syncsim::validate_config(sc.base_frequency_hz, sc.resolved_lines());
    std::cout << syncsim::render_scenario(sc);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"simulator for the RTC -> MC -> OBC time sync and trigger chain"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir, log_path;
    std::uint64_t seed = 0;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write trace files");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory (overrides out_dir)");
    CLI::Option* seed_opt =
        run->add_option("--seed", seed, "master seed (overrides master_seed)");

    CLI::App* stats = app.add_subcommand("stats", "recompute the interval table from triggers.csv");
    stats->add_option("trigger-log", log_path, "trigger log file")->required();

    CLI::App* validate = app.add_subcommand("validate", "check a scenario and print the resolved config");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (run->parsed())
            return cmd_run(scenario_path, out_dir, seed_opt->count() > 0, seed);
        if (stats->parsed())
            return cmd_stats(log_path);
        return cmd_validate(scenario_path);
    } catch (const syncsim::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 1;
    } catch (const syncsim::ConfigError& e) {
        std::cerr << "scenario error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
