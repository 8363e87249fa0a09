#include "hbdiag_cli/cli.hpp"

#include <cstdlib>
#include <ostream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "commands.hpp"
#include "hbdiag/errors.hpp"

namespace hbdiag::cli {

namespace {

void configure_logging() {
  static bool configured = false;
  if (!configured) {
    spdlog::set_default_logger(spdlog::stderr_logger_st("hbdiag"));
    spdlog::set_pattern("[%l] %v");
    configured = true;
  }
  auto level = spdlog::level::warn;
  if (const char* env = std::getenv("HBDIAG_LOG_LEVEL")) level = spdlog::level::from_str(env);
  spdlog::set_level(level);
}

void add_feature_flags(CLI::App* cmd, FeatureFlags& f) {
  cmd->add_option("--window", f.window, "Sliding window size in samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--stride", f.stride, "Window stride (0: same as --window)")
      ->capture_default_str();
  cmd->add_option("--rate-window", f.rate_window, "Beats per heart-rate estimate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--grid-size", f.grid_size, "Points on the alignment grid")
      ->check(CLI::Range(std::size_t{2}, std::size_t{1} << 20))
      ->capture_default_str();
  cmd->add_option("--lhr-eps", f.lhr_eps, "Flat-window threshold for the local heartbeat ratio")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--r2-threshold", f.r2_threshold, "R-squared accepted by the polynomial fit")
      ->capture_default_str();
  cmd->add_option("--max-degree", f.max_degree, "Highest polynomial degree tried")
      ->check(CLI::Range(1, 20))
      ->capture_default_str();
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  configure_logging();

  CLI::App app{"Heartbeat-based performance anomaly diagnosis", "hbdiag"};
  app.set_config("--config", "", "TOML config file; [section] per subcommand")
      ->check(CLI::ExistingFile);
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1);

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a labelled synthetic corpus");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--runs", sim.runs, "Number of runs")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--seed", sim.seed, "Master seed")->capture_default_str();
  simulate->add_option("--mix", sim.mix, "Class proportions normal,memoryleak,shutdown")
      ->delimiter(',')
      ->expected(3);
  simulate->add_option("--profiles", sim.profiles, "Workload profiles")
      ->delimiter(',')
      ->capture_default_str();
  simulate->add_option("--beats", sim.beats, "Beats per thread")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--threads", sim.threads, "Threads per run")->check(CLI::PositiveNumber)->capture_default_str();
  simulate->add_option("--jitter", sim.jitter, "Lognormal sigma of inter-beat intervals")->capture_default_str();
  simulate->add_option("--train-fraction", sim.train_fraction, "Share of each class used for training")->capture_default_str();
  simulate->add_option("--leak-slowdown", sim.leak_slowdown, "Interval inflation reached at the end of a leaking run")->capture_default_str();
  simulate->add_option("--shutdown-offset", sim.shutdown_offset, "Shutdown offset fraction range lo,hi")
      ->delimiter(',')
      ->expected(2);

  TrainOptions tr;
  auto* train = app.add_subcommand("train", "Train normal feature ranges from a manifest");
  train->add_option("--manifest", tr.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  train->add_option("--out", tr.out, "Ranges output file")->capture_default_str();
  train->add_option("--confidence", tr.confidence, "Central interval coverage")->capture_default_str();
  train->add_option("--features-csv", tr.features_csv, "Also write the training feature vectors");
  add_feature_flags(train, tr.features);

  DiagnoseOptions dg;
  auto* diagnose = app.add_subcommand("diagnose", "Diagnose every thread of a heartbeat log");
  diagnose->add_option("--ranges", dg.ranges, "Trained ranges file")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--log", dg.log, "Heartbeat log to diagnose")->required()->check(CLI::ExistingFile);
  diagnose->add_option("--profile", dg.profile, "Profile whose reference to use");
  diagnose->add_option("--out", dg.out, "Status output file")->capture_default_str();

  EvaluateOptions ev;
  auto* evaluate = app.add_subcommand("evaluate", "Repeated train/diagnose cycles with macro F1");
  evaluate->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--predictions", ev.predictions, "Score stored predictions instead of running cycles")
      ->check(CLI::ExistingFile);
  evaluate->add_option("--repeats", ev.repeats, "Number of random splits")->capture_default_str();
  evaluate->add_option("--split-seed", ev.split_seed, "Seed of the first split; repeat r uses seed+r")->capture_default_str();
  evaluate->add_option("--train-fraction", ev.train_fraction, "Share of each class used for training")->capture_default_str();
  evaluate->add_option("--confidence", ev.confidence, "Central interval coverage")->capture_default_str();
  evaluate->add_option("--json", ev.json_out, "Write the reports as JSON");
  add_feature_flags(evaluate, ev.features);

  OverheadOptions ov;
  auto* overhead = app.add_subcommand("overhead", "Relative CPU overhead of instrumentation");
  overhead->add_option("--with", ov.with, "CPU usage with heartbeats");
  overhead->add_option("--without", ov.without, "CPU usage without heartbeats");
  overhead->add_option("--measurements", ov.measurements, "JSON file with e_alpha and e_beta")
      ->check(CLI::ExistingFile);
  overhead->add_option("--json", ov.json_out, "Write the result as JSON");

  ExportRatesOptions ex;
  auto* export_rates = app.add_subcommand("export-rates", "Write derived heart-rate series as CSV");
  export_rates->add_option("--log", ex.log, "Heartbeat log")->required()->check(CLI::ExistingFile);
  export_rates->add_option("--out", ex.out, "CSV output file")->required();
  export_rates->add_option("--rate-window", ex.rate_window, "Beats per estimate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  }

  try {
    if (*simulate) return cmd_simulate(sim, out, err);
    if (*train) return cmd_train(tr, out, err);
    if (*diagnose) return cmd_diagnose(dg, out, err);
    if (*evaluate) return cmd_evaluate(ev, out, err);
    if (*overhead) return cmd_overhead(ov, out, err);
    if (*export_rates) return cmd_export_rates(ex, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kUsageError;
}

}  // namespace hbdiag::cli
