#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hbdiag/heartbeat.hpp"
#include "hbdiag/manifest.hpp"

namespace hbdiag {

struct WorkloadProfile {
  std::string name;
  double base_rate = 100.0;  // beats/s per thread
  unsigned num_threads = 4;
  double duration_s = 10.0;
  double jitter = 0.05;  // lognormal sigma of the inter-beat interval

  void validate() const;
  std::size_t beats_per_thread() const;
};

/// Heart rates of the six instrumented benchmarks, each sized to
/// `beats_per_thread` beats on four threads.
std::vector<WorkloadProfile> builtin_profiles(std::size_t beats_per_thread = 2000,
                                              double jitter = 0.05);
WorkloadProfile builtin_profile(std::string_view name, std::size_t beats_per_thread = 2000,
                                double jitter = 0.05);

enum class AnomalyKind { memoryleak, shutdown };

struct AnomalySpec {
  AnomalyKind kind = AnomalyKind::memoryleak;
  double leak_slowdown = 0.0;  // relative interval inflation per second
  double offset_lo = 0.2;      // shutdown offset fraction range, within (0, 1]
  double offset_hi = 0.9;
  std::size_t victim_count = 1;
  std::vector<ThreadId> victims;  // explicit victims override victim_count
  std::uint64_t rng_seed = 0;

  void validate() const;
};

std::vector<HeartbeatSequence> gen_normal(const WorkloadProfile& profile, std::uint64_t seed);

/// Inflates each inter-beat interval ending at original time t by
/// (1 + leak_slowdown * t). Beat counts are preserved.
std::vector<HeartbeatSequence> inject_memory_leak(std::span<const HeartbeatSequence> seqs,
                                                  const AnomalySpec& spec);

struct ShutdownInjection {
  std::vector<HeartbeatSequence> sequences;
  std::vector<ThreadId> victims;
  double offset_fraction = 1.0;
};

/// Truncates the victim threads after offset_fraction of their completion
/// time.
ShutdownInjection inject_shutdown(std::span<const HeartbeatSequence> seqs, const AnomalySpec& spec);

struct ClassMix {
  double normal = 1.0 / 3.0;
  double memoryleak = 1.0 / 3.0;
  double shutdown = 1.0 / 3.0;

  void validate() const;
  std::array<std::size_t, 3> counts(std::size_t n_runs) const;
};

/// Defaults describe the standard corpus: NPB-cg, 200 runs per class.
struct DatasetOptions {
  std::vector<WorkloadProfile> profiles = {builtin_profile("NPB-cg")};
  ClassMix mix;
  std::size_t n_runs = 600;
  std::uint64_t seed = 7;
  double train_fraction = 0.3;
  // Interval inflation reached at the end of a leaking run; converted to a
  // per-second slowdown from each profile's duration.
  double leak_end_slowdown = 0.5;
  double shutdown_offset_lo = 0.2;
  double shutdown_offset_hi = 0.9;

  void validate() const;
};

struct DatasetSummary {
  Manifest manifest;
  std::size_t total_beats = 0;
};

/// Writes one log per run plus manifest.json into out_dir.
DatasetSummary build_dataset(const DatasetOptions& options, const std::filesystem::path& out_dir);

/// Regenerates a run's sequences in memory exactly as build_dataset wrote them.
std::vector<HeartbeatSequence> generate_run(const WorkloadProfile& profile, DiagnosisStatus label,
                                            std::uint64_t run_seed, const DatasetOptions& options,
                                            std::vector<ThreadId>* victims = nullptr);

/// Stratified by (profile, label): round(train_fraction * group size) runs of
/// each group go to train, chosen by a shuffle seeded with split_seed.
void assign_split(Manifest& manifest, double train_fraction, std::uint64_t split_seed);

/// Well-mixed 64-bit hash used to derive per-run and per-thread seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept;

}  // namespace hbdiag
