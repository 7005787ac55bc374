#include <CLI11.hpp>
#include <cstdio>

#include "bellmux/io/errors.hpp"
#include "bellmux/io/tasks.hpp"

using namespace bellmux;

int main(int argc, char** argv) {
  CLI::App app{"Multiplexed quantum-memory Bell-source simulator and analysis toolkit"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("--quiet", quiet, "suppress progress output");

  // simulate
  std::string sim_config, sim_out = "events.csv";
  std::uint64_t seed_val = 0, shots_val = 0;
  int threads_val = 0;
  auto* sim = app.add_subcommand("simulate", "generate an event file from a config");
  sim->add_option("--config", sim_config, "config file")->required();
  sim->add_option("--out", sim_out, "output event file (.csv or .csv.gz)");
  auto* sim_seed = sim->add_option("--seed", seed_val, "seed override");
  auto* sim_shots = sim->add_option("--shots", shots_val, "shots-per-entry override");
  auto* sim_threads = sim->add_option("--threads", threads_val, "worker threads (0 = hardware)");

  // analyze
  std::string an_events, an_out = "out", an_task = "visibility", an_config;
  auto* an = app.add_subcommand("analyze", "run an analysis task on an event file");
  an->add_option("events", an_events, "event file")->required();
  an->add_option("--task", an_task, "bell | visibility | lifetime | g2");
  an->add_option("--out", an_out, "output directory");
  auto* an_config_opt = an->add_option("--config", an_config, "config override");
  auto* an_seed = an->add_option("--seed", seed_val, "bootstrap seed override");

  // report
  std::string rep_dir = "out", rep_config;
  auto* rep = app.add_subcommand("report", "summary table from prior task outputs");
  rep->add_option("--out", rep_dir, "directory holding task outputs");
  auto* rep_config_opt = rep->add_option("--config", rep_config, "config for closed-form rows");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (sim->parsed()) {
      SimulateOptions opt;
      opt.config_path = sim_config;
      opt.out_path = sim_out;
      opt.quiet = quiet;
      if (sim_seed->count()) opt.seed = seed_val;
      if (sim_shots->count()) opt.shots = shots_val;
      if (sim_threads->count()) opt.threads = threads_val;
      cmd_simulate(opt);
    } else if (an->parsed()) {
      AnalyzeOptions opt;
      opt.events_path = an_events;
      opt.out_dir = an_out;
      opt.task = an_task;
      opt.quiet = quiet;
      if (an_config_opt->count()) opt.config_path = an_config;
      if (an_seed->count()) opt.seed = seed_val;
      cmd_analyze(opt);
    } else if (rep->parsed()) {
      ReportOptions opt;
      opt.out_dir = rep_dir;
      opt.quiet = quiet;
      if (rep_config_opt->count()) opt.config_path = rep_config;
      cmd_report(opt);
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return 2;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
