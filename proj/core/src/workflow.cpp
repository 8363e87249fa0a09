#include "hbdiag/workflow.hpp"

#include <algorithm>

#include "hbdiag/errors.hpp"
#include "hbdiag/synth.hpp"

namespace hbdiag {

std::vector<LoadedRun> load_runs(const std::filesystem::path& manifest_path,
                                 const Manifest& manifest) {
  std::vector<LoadedRun> runs;
  runs.reserve(manifest.size());
  for (const auto& [name, entry] : manifest) {
    auto log = resolve_log_path(manifest_path, entry);
    auto threads = ingest_log(log);
    runs.push_back({name, entry, std::move(log), std::move(threads)});
  }
  return runs;
}

std::uint64_t run_completion_ns(std::span<const HeartbeatSequence> threads) {
  std::uint64_t latest = 0;
  for (const auto& s : threads) latest = std::max(latest, s.completion_time_ns());
  return latest;
}

std::map<ThreadId, HeartbeatSequence> by_thread(std::span<const HeartbeatSequence> threads) {
  std::map<ThreadId, HeartbeatSequence> out;
  for (const auto& s : threads) out.emplace(s.thread_id(), s);
  return out;
}

const LoadedRun& select_reference(std::span<const LoadedRun* const> normals) {
  if (normals.empty()) throw Error(ErrorKind::insufficient_training, "no normal runs to choose from");
  std::vector<const LoadedRun*> sorted(normals.begin(), normals.end());
  std::sort(sorted.begin(), sorted.end(), [](const LoadedRun* a, const LoadedRun* b) {
    const auto ca = run_completion_ns(a->threads);
    const auto cb = run_completion_ns(b->threads);
    return ca != cb ? ca < cb : a->name < b->name;
  });
  return *sorted[(sorted.size() - 1) / 2];
}

TrainedModel train_model(std::span<const LoadedRun> runs, const FeatureConfig& cfg,
                         double confidence, std::vector<FeatureRow>* training_rows) {
  cfg.validate();
  std::map<std::string, std::vector<const LoadedRun*>> normals;
  for (const auto& run : runs) {
    if (run.entry.split == Split::train && run.entry.label == DiagnosisStatus::normal) {
      normals[run.entry.profile].push_back(&run);
    }
  }
  if (normals.empty()) {
    throw Error(ErrorKind::insufficient_training, "no normal runs in the training split");
  }

  TrainedModel model;
  model.features = cfg;
  model.confidence = confidence;
  for (const auto& [profile, group] : normals) {
    const auto& ref = select_reference(group);
    TrainedProfile tp;
    tp.reference_run = ref.name;
    tp.reference_log = ref.log_path.string();
    tp.reference = by_thread(ref.threads);

    std::vector<FeatureVector> vectors;
    for (const auto* run : group) {
      for (const auto& seq : run->threads) {
        auto ref_thread = tp.reference.find(seq.thread_id());
        if (ref_thread == tp.reference.end()) {
          throw Error(ErrorKind::configuration, "run '" + run->name + "': reference '" + ref.name +
                                                    "' has no thread " +
                                                    std::to_string(seq.thread_id()));
        }
        vectors.push_back(extract_features(seq, ref_thread->second, cfg));
        if (training_rows) training_rows->push_back({run->name, seq.thread_id(), vectors.back()});
      }
    }
    try {
      tp.ranges = train_normal_ranges(vectors, confidence);
    } catch (const Error& e) {
      throw Error(e.kind(), "profile '" + profile + "': " + e.what() + " (" +
                                std::to_string(group.size()) + " normal training runs)");
    }
    tp.training_vectors = vectors.size();
    model.profiles.emplace(profile, std::move(tp));
  }
  return model;
}

std::vector<ThreadOutcome> diagnose_test_runs(std::span<const LoadedRun> runs,
                                              const TrainedModel& model) {
  std::vector<ThreadOutcome> out;
  for (const auto& run : runs) {
    if (run.entry.split != Split::test) continue;
    auto it = model.profiles.find(run.entry.profile);
    if (it == model.profiles.end()) {
      throw Error(ErrorKind::configuration,
                  "run '" + run.name + "': no trained profile '" + run.entry.profile + "'");
    }
    std::vector<ThreadDiagnosis> diag;
    try {
      diag = diagnose_run(run.threads, it->second.reference, it->second.ranges, model.features);
    } catch (const Error& e) {
      throw Error(e.kind(), "run '" + run.name + "': " + e.what());
    }
    for (const auto& d : diag) {
      out.push_back({run.name, d.thread_id, thread_label(run.entry, d.thread_id), d});
    }
  }
  return out;
}

CycleResult run_cycle(std::span<const LoadedRun> runs, const FeatureConfig& cfg,
                      double confidence) {
  CycleResult result;
  result.model = train_model(runs, cfg, confidence);
  result.outcomes = diagnose_test_runs(runs, result.model);
  std::vector<DiagnosisStatus> predicted;
  std::vector<DiagnosisStatus> labels;
  for (const auto& o : result.outcomes) {
    predicted.push_back(o.diagnosis.status);
    labels.push_back(o.label);
  }
  result.report = evaluate(predicted, labels);
  return result;
}

void resplit(std::vector<LoadedRun>& runs, double train_fraction, std::uint64_t split_seed) {
  Manifest m;
  for (const auto& r : runs) m.emplace(r.name, r.entry);
  assign_split(m, train_fraction, split_seed);
  for (auto& r : runs) r.entry.split = m.at(r.name).split;
}

}  // namespace hbdiag
