#include "hbdiag/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>
#include <random>

#include "hbdiag/errors.hpp"

namespace hbdiag {

namespace {

struct NamedRate {
  const char* name;
  double rate;
};

// Average heart rates (beats/s) of the instrumented benchmarks.
constexpr NamedRate kBenchmarkRates[] = {
    {"NPB-bt", 97519.4},   {"NPB-lu", 346877.5}, {"NPB-cg", 176311.3},
    {"NPB-sp", 528756.4},  {"Jacobi", 5488.1},   {"Arraybench", 31695.64},
};

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t round_ns(double ns) { return static_cast<std::uint64_t>(std::llround(ns)); }

}  // namespace

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

void WorkloadProfile::validate() const {
  auto bad = [&](const std::string& what) {
    throw Error(ErrorKind::configuration, "profile '" + name + "': " + what);
  };
  if (!(base_rate > 0.0) || !std::isfinite(base_rate)) bad("base_rate must be positive");
  if (base_rate > 1e8) bad("base_rate above 1e8 beats/s is below timestamp resolution");
  if (num_threads < 1) bad("num_threads must be >= 1");
  if (!(duration_s > 0.0) || !std::isfinite(duration_s)) bad("duration_s must be positive");
  if (!(jitter >= 0.0 && jitter < 1.0)) bad("jitter must be in [0, 1)");
  if (beats_per_thread() < 2) bad("profile yields fewer than 2 beats per thread");
}

std::size_t WorkloadProfile::beats_per_thread() const {
  return static_cast<std::size_t>(std::llround(duration_s * base_rate));
}

std::vector<WorkloadProfile> builtin_profiles(std::size_t beats_per_thread, double jitter) {
  std::vector<WorkloadProfile> out;
  for (const auto& b : kBenchmarkRates) {
    out.push_back({b.name, b.rate, 4, static_cast<double>(beats_per_thread) / b.rate, jitter});
  }
  return out;
}

WorkloadProfile builtin_profile(std::string_view name, std::size_t beats_per_thread,
                                double jitter) {
  for (auto& p : builtin_profiles(beats_per_thread, jitter)) {
    if (p.name == name) return p;
  }
  throw Error(ErrorKind::configuration, "unknown profile '" + std::string(name) + "'");
}

void AnomalySpec::validate() const {
  if (kind == AnomalyKind::memoryleak) {
    if (!(leak_slowdown >= 0.0) || !std::isfinite(leak_slowdown)) {
      throw Error(ErrorKind::configuration, "leak_slowdown must be >= 0");
    }
  } else {
    if (!(offset_lo > 0.0 && offset_lo <= offset_hi && offset_hi <= 1.0)) {
      throw Error(ErrorKind::configuration, "shutdown offset range must satisfy 0 < lo <= hi <= 1");
    }
    if (victims.empty() && victim_count < 1) {
      throw Error(ErrorKind::configuration, "shutdown needs at least one victim thread");
    }
  }
}

std::vector<HeartbeatSequence> gen_normal(const WorkloadProfile& profile, std::uint64_t seed) {
  profile.validate();
  const std::size_t beats = profile.beats_per_thread();
  const double interval_ns = 1e9 / profile.base_rate;
  const double sigma = profile.jitter;
  std::vector<HeartbeatSequence> out;
  out.reserve(profile.num_threads);
  std::vector<std::uint64_t> ts(beats);
  for (ThreadId t = 0; t < profile.num_threads; ++t) {
    std::mt19937_64 rng(mix_seed(seed, t));
    std::normal_distribution<double> z(0.0, 1.0);
    double clock = 0.0;
    for (std::size_t i = 0; i < beats; ++i) {
      // Mean-preserving lognormal factor; exactly 1 when sigma == 0.
      const double factor = std::exp(sigma * z(rng) - 0.5 * sigma * sigma);
      clock += interval_ns * factor;
      ts[i] = round_ns(clock);
    }
    out.push_back(HeartbeatSequence::from_timestamps(t, ts));
  }
  return out;
}

std::vector<HeartbeatSequence> inject_memory_leak(std::span<const HeartbeatSequence> seqs,
                                                  const AnomalySpec& spec) {
  if (spec.kind != AnomalyKind::memoryleak) {
    throw Error(ErrorKind::misuse, "inject_memory_leak called with a non-memoryleak spec");
  }
  spec.validate();
  std::vector<HeartbeatSequence> out;
  out.reserve(seqs.size());
  for (const auto& seq : seqs) {
    std::vector<std::uint64_t> ts;
    ts.reserve(seq.size());
    std::uint64_t prev = 0;
    double clock = 0.0;
    for (const auto& r : seq.records()) {
      const double interval = static_cast<double>(r.timestamp_ns - prev);
      const double t_s = static_cast<double>(r.timestamp_ns) * 1e-9;
      clock += interval * (1.0 + spec.leak_slowdown * t_s);
      ts.push_back(round_ns(clock));
      prev = r.timestamp_ns;
    }
    out.push_back(HeartbeatSequence::from_timestamps(seq.thread_id(), ts));
  }
  return out;
}

ShutdownInjection inject_shutdown(std::span<const HeartbeatSequence> seqs, const AnomalySpec& spec) {
  if (spec.kind != AnomalyKind::shutdown) {
    throw Error(ErrorKind::misuse, "inject_shutdown called with a non-shutdown spec");
  }
  spec.validate();
  if (seqs.empty()) throw Error(ErrorKind::empty_input, "no sequences to inject into");

  std::mt19937_64 rng(spec.rng_seed);
  ShutdownInjection out;
  if (!spec.victims.empty()) {
    out.victims = spec.victims;
    for (auto v : out.victims) {
      const bool present = std::any_of(seqs.begin(), seqs.end(),
                                       [v](const auto& s) { return s.thread_id() == v; });
      if (!present) {
        throw Error(ErrorKind::configuration, "victim thread " + std::to_string(v) + " not in run");
      }
    }
  } else {
    std::vector<ThreadId> ids;
    for (const auto& s : seqs) ids.push_back(s.thread_id());
    std::shuffle(ids.begin(), ids.end(), rng);
    ids.resize(std::min(spec.victim_count, ids.size()));
    std::sort(ids.begin(), ids.end());
    out.victims = ids;
  }

  out.offset_fraction = spec.offset_lo;
  if (spec.offset_hi > spec.offset_lo) {
    out.offset_fraction = std::uniform_real_distribution<double>(spec.offset_lo, spec.offset_hi)(rng);
  }

  out.sequences.reserve(seqs.size());
  for (const auto& seq : seqs) {
    const bool victim =
        std::find(out.victims.begin(), out.victims.end(), seq.thread_id()) != out.victims.end();
    if (!victim || out.offset_fraction >= 1.0) {
      out.sequences.push_back(seq);
      continue;
    }
    const double cutoff = out.offset_fraction * static_cast<double>(seq.completion_time_ns());
    std::vector<HeartbeatRecord> kept;
    for (const auto& r : seq.records()) {
      if (static_cast<double>(r.timestamp_ns) > cutoff) break;
      kept.push_back(r);
    }
    if (kept.size() < 2) {
      throw Error(ErrorKind::degenerate_injection,
                  "shutdown at fraction " + std::to_string(out.offset_fraction) + " leaves " +
                      std::to_string(kept.size()) + " beats on thread " +
                      std::to_string(seq.thread_id()));
    }
    out.sequences.emplace_back(seq.thread_id(), std::move(kept));
  }
  return out;
}

void ClassMix::validate() const {
  if (normal < 0.0 || memoryleak < 0.0 || shutdown < 0.0) {
    throw Error(ErrorKind::configuration, "class mix proportions must be non-negative");
  }
  const double sum = normal + memoryleak + shutdown;
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorKind::configuration,
                "class mix proportions sum to " + std::to_string(sum) + ", expected 1");
  }
}

std::array<std::size_t, 3> ClassMix::counts(std::size_t n_runs) const {
  const std::array<double, 3> share = {normal, memoryleak, shutdown};
  std::array<std::size_t, 3> out{};
  std::array<double, 3> remainder{};
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    const double exact = share[c] * static_cast<double>(n_runs);
    out[c] = static_cast<std::size_t>(std::floor(exact + 1e-9));
    remainder[c] = exact - static_cast<double>(out[c]);
    assigned += out[c];
  }
  // Largest remainder, ties to the earlier class.
  while (assigned < n_runs) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < 3; ++c) {
      if (remainder[c] > remainder[best]) best = c;
    }
    ++out[best];
    remainder[best] = -1.0;
    ++assigned;
  }
  return out;
}

void DatasetOptions::validate() const {
  if (profiles.empty()) throw Error(ErrorKind::configuration, "at least one profile is required");
  for (const auto& p : profiles) p.validate();
  mix.validate();
  if (n_runs < 1) throw Error(ErrorKind::configuration, "n_runs must be >= 1");
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::configuration, "train_fraction must be in (0, 1)");
  }
  if (!(leak_end_slowdown > 0.0)) throw Error(ErrorKind::configuration, "leak slowdown must be > 0");
  if (!(shutdown_offset_lo > 0.0 && shutdown_offset_lo <= shutdown_offset_hi &&
        shutdown_offset_hi <= 1.0)) {
    throw Error(ErrorKind::configuration, "shutdown offset range must satisfy 0 < lo <= hi <= 1");
  }
}

std::vector<HeartbeatSequence> generate_run(const WorkloadProfile& profile, DiagnosisStatus label,
                                            std::uint64_t run_seed, const DatasetOptions& options,
                                            std::vector<ThreadId>* victims) {
  auto base = gen_normal(profile, run_seed);
  if (victims) victims->clear();
  switch (label) {
    case DiagnosisStatus::normal:
      return base;
    case DiagnosisStatus::memoryleak: {
      AnomalySpec spec;
      spec.kind = AnomalyKind::memoryleak;
      spec.leak_slowdown = options.leak_end_slowdown / profile.duration_s;
      return inject_memory_leak(base, spec);
    }
    case DiagnosisStatus::shutdown: {
      AnomalySpec spec;
      spec.kind = AnomalyKind::shutdown;
      spec.offset_lo = options.shutdown_offset_lo;
      spec.offset_hi = options.shutdown_offset_hi;
      spec.rng_seed = mix_seed(run_seed, 0x5d);
      auto injected = inject_shutdown(base, spec);
      if (victims) *victims = injected.victims;
      return std::move(injected.sequences);
    }
  }
  return base;
}

DatasetSummary build_dataset(const DatasetOptions& options, const std::filesystem::path& out_dir) {
  options.validate();
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::io, "cannot create " + out_dir.string() + ": " + ec.message());

  DatasetSummary summary;
  const auto counts = options.mix.counts(options.n_runs);
  std::size_t run_index = 0;
  for (auto label : kAllStatuses) {
    for (std::size_t k = 0; k < counts[index_of(label)]; ++k, ++run_index) {
      const auto& profile = options.profiles[k % options.profiles.size()];
      const auto run_seed = mix_seed(options.seed, run_index);
      char name[32];
      std::snprintf(name, sizeof name, "run_%04zu", run_index);

      ManifestEntry entry;
      entry.log_path = std::string(name) + ".csv";
      entry.label = label;
      entry.profile = profile.name;
      entry.seed = run_seed;
      const auto seqs = generate_run(profile, label, run_seed, options, &entry.victims);
      for (const auto& s : seqs) summary.total_beats += s.size();
      write_log(out_dir / entry.log_path, seqs);
      summary.manifest.emplace(name, std::move(entry));
    }
  }
  assign_split(summary.manifest, options.train_fraction, options.seed);
  write_manifest(out_dir / "manifest.json", summary.manifest);
  return summary;
}

void assign_split(Manifest& manifest, double train_fraction, std::uint64_t split_seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::configuration, "train_fraction must be in (0, 1)");
  }
  std::map<std::pair<std::string, int>, std::vector<std::string>> groups;
  for (const auto& [name, entry] : manifest) {
    groups[{entry.profile, static_cast<int>(entry.label)}].push_back(name);
  }
  std::mt19937_64 rng(mix_seed(split_seed, 0x3017));
  for (auto& [key, names] : groups) {
    std::shuffle(names.begin(), names.end(), rng);
    const auto n_train = static_cast<std::size_t>(
        std::llround(train_fraction * static_cast<double>(names.size())));
    for (std::size_t i = 0; i < names.size(); ++i) {
      manifest[names[i]].split = i < n_train ? Split::train : Split::test;
    }
  }
}

}  // namespace hbdiag
