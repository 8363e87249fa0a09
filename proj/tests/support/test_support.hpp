#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <hbdiag/heartbeat.hpp>

namespace hbdiag::testutil {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("hbdiag_" + tag + "_" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Beats at a constant interval starting at 0.
inline HeartbeatSequence uniform_sequence(ThreadId tid, std::size_t n, std::uint64_t interval_ns) {
  std::vector<std::uint64_t> ts(n);
  for (std::size_t i = 0; i < n; ++i) ts[i] = i * interval_ns;
  return HeartbeatSequence::from_timestamps(tid, ts);
}

/// Strictly increasing timestamps with random gaps in [lo, hi].
inline HeartbeatSequence random_sequence(ThreadId tid, std::size_t n, std::mt19937_64& rng,
                                         std::uint64_t lo = 1000, std::uint64_t hi = 5000) {
  std::uniform_int_distribution<std::uint64_t> gap(lo, hi);
  std::vector<std::uint64_t> ts(n);
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ts[i] = t;
    t += gap(rng);
  }
  return HeartbeatSequence::from_timestamps(tid, ts);
}

}  // namespace hbdiag::testutil
