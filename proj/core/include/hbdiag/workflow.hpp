#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hbdiag/diagnosis.hpp"
#include "hbdiag/features.hpp"
#include "hbdiag/manifest.hpp"

namespace hbdiag {

// Dataset-level plumbing shared by the CLI and the acceptance suite.

struct LoadedRun {
  std::string name;
  ManifestEntry entry;
  std::filesystem::path log_path;  // resolved against the manifest location
  std::vector<HeartbeatSequence> threads;
};

std::vector<LoadedRun> load_runs(const std::filesystem::path& manifest_path,
                                 const Manifest& manifest);

/// Latest completion time over all threads of a run.
std::uint64_t run_completion_ns(std::span<const HeartbeatSequence> threads);

std::map<ThreadId, HeartbeatSequence> by_thread(std::span<const HeartbeatSequence> threads);

/// The run with median completion time (lower median, ties broken by name).
const LoadedRun& select_reference(std::span<const LoadedRun* const> normals);

struct TrainedProfile {
  std::string reference_run;
  std::string reference_log;
  std::map<ThreadId, HeartbeatSequence> reference;
  NormalRanges ranges;
  std::size_t training_vectors = 0;
};

struct TrainedModel {
  FeatureConfig features;
  double confidence = 0.95;
  std::map<std::string, TrainedProfile> profiles;
};

/// Trains one profile from the normal runs marked Split::train. Every
/// training thread, including the reference's own, contributes a vector.
/// When training_rows is given it receives every training vector.
TrainedModel train_model(std::span<const LoadedRun> runs, const FeatureConfig& cfg,
                         double confidence = 0.95,
                         std::vector<FeatureRow>* training_rows = nullptr);

struct ThreadOutcome {
  std::string run;
  ThreadId thread_id = 0;
  DiagnosisStatus label = DiagnosisStatus::normal;
  ThreadDiagnosis diagnosis;
};

struct CycleResult {
  TrainedModel model;
  std::vector<ThreadOutcome> outcomes;
  EvaluationReport report;
};

/// Diagnoses every thread of the runs marked Split::test.
std::vector<ThreadOutcome> diagnose_test_runs(std::span<const LoadedRun> runs,
                                              const TrainedModel& model);

/// train_model + diagnose_test_runs + evaluate on the splits stored in runs.
CycleResult run_cycle(std::span<const LoadedRun> runs, const FeatureConfig& cfg,
                      double confidence = 0.95);

/// Re-draws the train/test split of already-loaded runs.
void resplit(std::vector<LoadedRun>& runs, double train_fraction, std::uint64_t split_seed);

}  // namespace hbdiag
