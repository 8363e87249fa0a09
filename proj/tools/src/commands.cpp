#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "hbdiag/diagnosis.hpp"
#include "hbdiag/errors.hpp"
#include "hbdiag/json_io.hpp"
#include "hbdiag/manifest.hpp"
#include "hbdiag/synth.hpp"
#include "hbdiag/workflow.hpp"
#include "hbdiag_cli/cli.hpp"

namespace hbdiag::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

void write_json_file(const fs::path& path, const json& j) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(ErrorKind::io, "cannot write " + path.string());
  f << j.dump(2) << '\n';
  if (!f) throw Error(ErrorKind::io, "write failed for " + path.string());
}

json read_json_file(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::io, "cannot open " + path.string());
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::parse, path.string() + ": " + e.what());
  }
}

// Macro F1 over classes with support, warning about any that are empty.
double reported_macro_f(const EvaluationReport& rep, std::ostream& err) {
  bool any_empty = false;
  for (auto s : kAllStatuses) {
    if (rep.metrics(s).support == 0) {
      any_empty = true;
      fmt::print(err, "warning: class '{}' has no labelled samples; excluded from macro F1\n",
                 to_string(s));
    }
  }
  return any_empty ? macro_f_present_classes(rep) : rep.macro_f;
}

void print_features_header(std::ostream& out) {
  fmt::print(out, "{:<8}{:<12}{:>12}{:>12}{:>12}{:>12}{:>16}{:>18}  {}\n", "thread", "status", "gtr",
             "ltr", "ghr", "lhr", "dtw", "lb", "note");
}

}  // namespace

FeatureConfig FeatureFlags::to_config() const {
  FeatureConfig cfg;
  cfg.window.size = window;
  cfg.window.stride = stride == 0 ? window : stride;
  cfg.rate_window = rate_window;
  cfg.grid_size = grid_size;
  cfg.lhr_eps = lhr_eps;
  cfg.fit.r2_threshold = r2_threshold;
  cfg.fit.max_degree = max_degree;
  try {
    cfg.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return cfg;
}

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream&) {
  DatasetOptions d;
  if (o.mix.size() != 3) throw UsageError("--mix expects three proportions");
  d.mix = {o.mix[0], o.mix[1], o.mix[2]};
  d.n_runs = o.runs;
  d.seed = o.seed;
  d.train_fraction = o.train_fraction;
  d.leak_end_slowdown = o.leak_slowdown;
  if (o.shutdown_offset.size() != 2) throw UsageError("--shutdown-offset expects lo,hi");
  d.shutdown_offset_lo = o.shutdown_offset[0];
  d.shutdown_offset_hi = o.shutdown_offset[1];
  d.profiles.clear();
  try {
    for (const auto& name : o.profiles) {
      auto p = builtin_profile(name, o.beats, o.jitter);
      p.num_threads = o.threads;
      d.profiles.push_back(p);
    }
    d.validate();
  } catch (const Error& e) {
    throw UsageError(e.what());
  }

  spdlog::info("generating {} runs into {}", d.n_runs, o.out);
  const auto summary = build_dataset(d, o.out);

  std::array<std::size_t, 3> per_class{};
  std::size_t train = 0;
  for (const auto& [_, e] : summary.manifest) {
    ++per_class[index_of(e.label)];
    if (e.split == Split::train) ++train;
  }
  fmt::print(out, "runs: {}\n", summary.manifest.size());
  fmt::print(out, "beats: {}\n", summary.total_beats);
  fmt::print(out, "classes: normal={} memoryleak={} shutdown={}\n", per_class[0], per_class[1],
             per_class[2]);
  fmt::print(out, "split: train={} test={}\n", train, summary.manifest.size() - train);
  fmt::print(out, "manifest: {}\n", (fs::path(o.out) / "manifest.json").string());
  return kSuccess;
}

int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream&) {
  if (!(o.confidence > 0.0 && o.confidence <= 1.0)) {
    throw UsageError("--confidence must be in (0, 1]");
  }
  const auto cfg = o.features.to_config();
  const auto manifest = read_manifest(o.manifest);
  const auto runs = load_runs(o.manifest, manifest);

  std::vector<FeatureRow> rows;
  const auto model = train_model(runs, cfg, o.confidence, o.features_csv.empty() ? nullptr : &rows);
  write_model(o.out, model);
  if (!o.features_csv.empty()) {
    std::ofstream csv(o.features_csv, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error(ErrorKind::io, "cannot write " + o.features_csv);
    write_feature_csv(csv, rows);
  }

  for (const auto& [name, p] : model.profiles) {
    fmt::print(out, "profile {}: reference {}, {} training vectors, confidence {:.4f}\n", name,
               p.reference_run, p.training_vectors, model.confidence);
    const std::pair<const char*, const Interval*> rows_out[] = {
        {"dtw", &p.ranges.dtw}, {"lb", &p.ranges.lb},   {"gtr", &p.ranges.gtr},
        {"ltr", &p.ranges.ltr}, {"ghr", &p.ranges.ghr}, {"lhr", &p.ranges.lhr}};
    for (const auto& [feature, iv] : rows_out) {
      fmt::print(out, "  {:<4} [{:.4f}, {:.4f}]\n", feature, iv->lo, iv->hi);
    }
  }
  fmt::print(out, "ranges: {}\n", o.out);
  return kSuccess;
}

int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out, std::ostream&) {
  const auto model = read_model(o.ranges);
  std::string profile = o.profile;
  if (profile.empty()) {
    if (model.profiles.size() != 1) {
      throw UsageError("ranges file holds several profiles; pass --profile");
    }
    profile = model.profiles.begin()->first;
  }
  auto it = model.profiles.find(profile);
  if (it == model.profiles.end()) {
    throw Error(ErrorKind::configuration, "no trained reference for profile '" + profile + "'");
  }
  const auto candidate = ingest_log(o.log);
  const auto result = diagnose_run(candidate, it->second.reference, it->second.ranges, model.features);

  bool anomalous = false;
  json threads = json::array();
  print_features_header(out);
  for (const auto& d : result) {
    anomalous = anomalous || d.status != DiagnosisStatus::normal;
    const auto& f = d.features;
    fmt::print(out, "{:<8}{:<12}{:>12.4f}{:>12.4f}{:>12.4f}{:>12.4f}{:>16.4f}{:>18.4f}  {}\n",
               d.thread_id, to_string(d.status), f.gtr, f.ltr, f.ghr, f.lhr, f.dtw, f.lb,
               d.unflagged_slowdown ? "slow-but-similar" : "");
    threads.push_back({{"thread_id", d.thread_id},
                       {"status", std::string(to_string(d.status))},
                       {"features", f},
                       {"unflagged_slowdown", d.unflagged_slowdown}});
  }
  json doc = {{"log", o.log}, {"profile", profile}, {"anomalous", anomalous}, {"threads", threads}};
  write_json_file(o.out, doc);
  return anomalous ? kAnomalyDetected : kSuccess;
}

namespace {

int evaluate_predictions(const EvaluateOptions& o, const Manifest& manifest, std::ostream& out,
                         std::ostream& err) {
  const auto doc = read_json_file(o.predictions);
  if (!doc.is_object()) throw Error(ErrorKind::parse, o.predictions + ": expected run -> statuses");
  std::vector<DiagnosisStatus> predicted;
  std::vector<DiagnosisStatus> labels;
  for (const auto& [run, value] : doc.items()) {
    auto entry = manifest.find(run);
    if (entry == manifest.end()) {
      throw Error(ErrorKind::configuration, "prediction for unknown run '" + run + "'");
    }
    const json& threads = value.is_object() ? value.at("threads") : value;
    for (const auto& t : threads) {
      const auto status = parse_status(t.at("status").get<std::string>());
      if (!status) throw Error(ErrorKind::parse, "run '" + run + "': unknown status");
      predicted.push_back(*status);
      labels.push_back(thread_label(entry->second, t.at("thread_id").get<ThreadId>()));
    }
  }
  const auto rep = evaluate(predicted, labels);
  out << format_report(rep);
  const double macro = reported_macro_f(rep, err);
  fmt::print(out, "macro F1 (reported): {:.4f}\n", macro);
  if (!o.json_out.empty()) write_json_file(o.json_out, {{"report", rep}, {"macro_f", macro}});
  return kSuccess;
}

}  // namespace

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err) {
  if (o.repeats < 1) throw UsageError("--repeats must be >= 1");
  if (!(o.confidence > 0.0 && o.confidence <= 1.0)) {
    throw UsageError("--confidence must be in (0, 1]");
  }
  if (!(o.train_fraction > 0.0 && o.train_fraction < 1.0)) {
    throw UsageError("--train-fraction must be in (0, 1)");
  }
  const auto cfg = o.features.to_config();
  const auto manifest = read_manifest(o.manifest);
  if (!o.predictions.empty()) return evaluate_predictions(o, manifest, out, err);

  auto runs = load_runs(o.manifest, manifest);
  json repeats = json::array();
  double sum = 0.0;
  for (std::size_t r = 0; r < o.repeats; ++r) {
    const std::uint64_t seed = o.split_seed + r;
    resplit(runs, o.train_fraction, seed);
    const auto cycle = run_cycle(runs, cfg, o.confidence);
    fmt::print(out, "repeat {} (split seed {})\n", r + 1, seed);
    out << format_report(cycle.report);
    const double macro = reported_macro_f(cycle.report, err);
    sum += macro;
    repeats.push_back({{"split_seed", seed}, {"report", cycle.report}, {"macro_f", macro}});
    out << '\n';
  }
  const double mean = sum / static_cast<double>(o.repeats);
  fmt::print(out, "mean macro F1 over {} repeats: {:.4f}\n", o.repeats, mean);
  if (!o.json_out.empty()) {
    write_json_file(o.json_out, {{"repeats", repeats}, {"mean_macro_f", mean}});
  }
  return kSuccess;
}

int cmd_overhead(const OverheadOptions& o, std::ostream& out, std::ostream&) {
  double e_alpha = 0.0;
  double e_beta = 0.0;
  if (!o.measurements.empty()) {
    if (o.with || o.without) throw UsageError("use either --measurements or --with/--without");
    const auto doc = read_json_file(o.measurements);
    if (!doc.contains("e_alpha") || !doc.contains("e_beta")) {
      throw Error(ErrorKind::parse, o.measurements + ": expected keys e_alpha and e_beta");
    }
    e_alpha = doc["e_alpha"].get<double>();
    e_beta = doc["e_beta"].get<double>();
  } else {
    if (!o.with || !o.without) throw UsageError("overhead needs --with and --without");
    e_alpha = *o.with;
    e_beta = *o.without;
  }
  const double overhead = compute_overhead(e_alpha, e_beta);
  fmt::print(out, "overhead: {:.2f}%\n", overhead * 100.0);
  if (!o.json_out.empty()) {
    write_json_file(o.json_out, {{"e_alpha", e_alpha}, {"e_beta", e_beta}, {"overhead", overhead}});
  }
  return kSuccess;
}

int cmd_export_rates(const ExportRatesOptions& o, std::ostream& out, std::ostream&) {
  const auto seqs = ingest_log(o.log);
  std::ofstream csv(o.out, std::ios::binary | std::ios::trunc);
  if (!csv) throw Error(ErrorKind::io, "cannot write " + o.out);
  csv << "thread_id,t_s,rate\n";
  std::size_t points = 0;
  for (const auto& s : seqs) {
    const auto rates = derive_heart_rate(s, o.rate_window);
    for (const auto& p : rates.points()) {
      fmt::print(csv, "{},{:.9f},{:.4f}\n", s.thread_id(), p.t, p.rate);
    }
    points += rates.size();
  }
  fmt::print(out, "wrote {} rate points for {} threads to {}\n", points, seqs.size(), o.out);
  return kSuccess;
}

}  // namespace hbdiag::cli
