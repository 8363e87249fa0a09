#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hbdiag/features.hpp"

namespace hbdiag::cli {

/// Bad flag values; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FeatureFlags {
  std::size_t window = 10;
  std::size_t stride = 0;  // 0: same as window
  std::size_t rate_window = 1;
  std::size_t grid_size = 100;
  double lhr_eps = 1e-9;
  double r2_threshold = 0.9;
  int max_degree = 10;

  FeatureConfig to_config() const;
};

struct SimulateOptions {
  std::string out;
  std::size_t runs = 600;
  std::uint64_t seed = 7;
  std::vector<double> mix{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
  std::vector<std::string> profiles{"NPB-cg"};
  std::size_t beats = 2000;
  unsigned threads = 4;
  double jitter = 0.05;
  double train_fraction = 0.3;
  double leak_slowdown = 0.5;
  std::vector<double> shutdown_offset{0.2, 0.9};
};

struct TrainOptions {
  std::string manifest;
  std::string out = "ranges.json";
  double confidence = 0.95;
  std::string features_csv;
  FeatureFlags features;
};

struct DiagnoseOptions {
  std::string ranges;
  std::string log;
  std::string profile;
  std::string out = "statuses.json";
};

struct EvaluateOptions {
  std::string manifest;
  std::string predictions;
  std::size_t repeats = 3;
  std::uint64_t split_seed = 1;
  double train_fraction = 0.3;
  double confidence = 0.95;
  std::string json_out;
  FeatureFlags features;
};

struct OverheadOptions {
  std::optional<double> with;
  std::optional<double> without;
  std::string measurements;
  std::string json_out;
};

struct ExportRatesOptions {
  std::string log;
  std::string out;
  std::size_t rate_window = 1;
};

int cmd_simulate(const SimulateOptions& o, std::ostream& out, std::ostream& err);
int cmd_train(const TrainOptions& o, std::ostream& out, std::ostream& err);
int cmd_diagnose(const DiagnoseOptions& o, std::ostream& out, std::ostream& err);
int cmd_evaluate(const EvaluateOptions& o, std::ostream& out, std::ostream& err);
int cmd_overhead(const OverheadOptions& o, std::ostream& out, std::ostream& err);
int cmd_export_rates(const ExportRatesOptions& o, std::ostream& out, std::ostream& err);

}  // namespace hbdiag::cli
