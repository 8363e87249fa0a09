#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hbdiag/align.hpp"
#include "hbdiag/heartbeat.hpp"

namespace hbdiag {

/// The six rule inputs for a (candidate, reference) pair.
struct FeatureVector {
  double gtr = 0.0;  // global time ratio
  double ltr = 0.0;  // local time ratio
  double ghr = 0.0;  // global heartbeat ratio
  double lhr = 0.0;  // local heartbeat ratio
  double dtw = 0.0;  // beats/s accumulated
  double lb = 0.0;   // (beats/s)^2 accumulated

  bool finite() const noexcept;
  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct Envelope {
  std::vector<double> upper;
  std::vector<double> lower;
  std::size_t window = 0;
};

enum class DtwCost { absolute, squared };

// Time ratios use raw timestamps of the candidate c against the reference q.
double global_time_ratio(const HeartbeatSequence& c, const HeartbeatSequence& q);
double local_time_ratio(const HeartbeatSequence& c, const HeartbeatSequence& q,
                        const WindowConfig& cfg);

double global_heartbeat_ratio(std::span<const double> c, std::span<const double> q);
double global_heartbeat_ratio(const HeartRateSeries& c, const HeartRateSeries& q);

/// Mean over windows of (c[i+w]-c[i]) / (q[i+w]-q[i]). Windows whose reference
/// delta is below eps in magnitude are skipped.
double local_heartbeat_ratio(std::span<const double> c, std::span<const double> q,
                             const WindowConfig& cfg, double eps = 1e-9);
double local_heartbeat_ratio(const HeartRateSeries& c, const HeartRateSeries& q,
                             const WindowConfig& cfg, double eps = 1e-9);

/// Cumulative DTW cost D(m-1, n-1) with D(0,0) = cost(q0, c0). A band
/// excludes cells with |i - j| > band.
double dtw_distance(std::span<const double> q, std::span<const double> c,
                    DtwCost cost = DtwCost::absolute,
                    std::optional<std::size_t> band = std::nullopt);
double dtw_distance(const HeartRateSeries& q, const HeartRateSeries& c,
                    DtwCost cost = DtwCost::absolute,
                    std::optional<std::size_t> band = std::nullopt);

/// Running max/min of q over [i-w, i+w], truncated at both ends.
Envelope envelope(std::span<const double> q, std::size_t w);
Envelope envelope(const HeartRateSeries& q, std::size_t w);

/// Squared distance of c from the envelope of q.
double lb_keogh(std::span<const double> q, std::span<const double> c, std::size_t w);
double lb_keogh(const HeartRateSeries& q, const HeartRateSeries& c, std::size_t w);

struct FeatureConfig {
  WindowConfig window = WindowConfig::non_overlapping(10);
  std::size_t rate_window = 1;
  std::size_t grid_size = 100;
  double lhr_eps = 1e-9;
  AutoFitOptions fit;

  void validate() const;
};

/// Candidate c against reference q. GTR/LTR come from raw timestamps; the
/// rate features are computed on the aligned rate curves, with the envelope
/// window equal to cfg.window.size.
FeatureVector extract_features(const HeartbeatSequence& c, const HeartbeatSequence& q,
                               const FeatureConfig& cfg = {});

struct FeatureRow {
  std::string run;
  ThreadId thread_id = 0;
  FeatureVector features;
};

inline constexpr std::string_view kFeatureCsvHeader = "run,thread_id,gtr,ltr,ghr,lhr,dtw,lb";

void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows);

}  // namespace hbdiag
