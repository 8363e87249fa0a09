#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hbdiag/features.hpp"
#include "hbdiag/heartbeat.hpp"
#include "hbdiag/status.hpp"

namespace hbdiag {

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  bool contains(double x) const noexcept { return lo <= x && x <= hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Trained normal intervals, grouped the way the rule tree consumes them:
/// distance {dtw, lb}, time {gtr, ltr}, heart rate {ghr, lhr}.
struct NormalRanges {
  Interval dtw;
  Interval lb;
  Interval gtr;
  Interval ltr;
  Interval ghr;
  Interval lhr;

  double mintime() const noexcept { return gtr.lo; }
  double maxtime() const noexcept { return gtr.hi; }

  bool distance_contains(const FeatureVector& f) const noexcept {
    return dtw.contains(f.dtw) && lb.contains(f.lb);
  }
  bool time_contains(const FeatureVector& f) const noexcept {
    return gtr.contains(f.gtr) && ltr.contains(f.ltr);
  }
  bool heartrate_contains(const FeatureVector& f) const noexcept {
    return ghr.contains(f.ghr) && lhr.contains(f.lhr);
  }

  void validate() const;
  friend bool operator==(const NormalRanges&, const NormalRanges&) = default;
};

inline constexpr std::size_t kMinTrainingVectors = 10;

/// Per-feature central percentile interval at `confidence` (linear
/// interpolation between order statistics). confidence 1.0 gives [min, max].
NormalRanges train_normal_ranges(std::span<const FeatureVector> normals, double confidence = 0.95);

/// Linear-interpolated empirical quantile, p in [0, 1].
double percentile(std::vector<double> values, double p);

DiagnosisStatus hsa_diagnose(const FeatureVector& f, const NormalRanges& r);

/// Rule-tree outcome together with the subset tests that produced it.
struct DiagnosisTrace {
  DiagnosisStatus status = DiagnosisStatus::normal;
  bool distance_in_range = true;
  bool time_in_range = true;
  bool heartrate_in_range = true;
  // Distances and heart rate in range but GTR above maxtime: no rule fires.
  bool unflagged_slowdown = false;
};

DiagnosisTrace hsa_trace(const FeatureVector& f, const NormalRanges& r);

struct ThreadDiagnosis {
  ThreadId thread_id = 0;
  DiagnosisStatus status = DiagnosisStatus::normal;
  FeatureVector features;
  bool unflagged_slowdown = false;
};

/// Runs every candidate thread against the reference thread with the same id.
/// Results are ordered by thread id.
std::vector<ThreadDiagnosis> diagnose_run(std::span<const HeartbeatSequence> candidate,
                                          const std::map<ThreadId, HeartbeatSequence>& reference,
                                          const NormalRanges& ranges,
                                          const FeatureConfig& cfg = {});

struct ClassMetrics {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t support = 0;
};

struct EvaluationReport {
  std::array<ClassMetrics, 3> per_class{};
  // confusion[label][prediction]
  std::array<std::array<std::size_t, 3>, 3> confusion{};
  double macro_f = 0.0;
  std::size_t total = 0;

  const ClassMetrics& metrics(DiagnosisStatus s) const { return per_class[index_of(s)]; }
};

EvaluationReport evaluate(std::span<const DiagnosisStatus> predictions,
                          std::span<const DiagnosisStatus> labels);

/// Mean F1 over the classes that have at least one labelled sample.
double macro_f_present_classes(const EvaluationReport& report);

std::string format_report(const EvaluationReport& report);

/// Relative CPU-usage increase (with - without) / without.
double compute_overhead(double e_alpha, double e_beta);

}  // namespace hbdiag
