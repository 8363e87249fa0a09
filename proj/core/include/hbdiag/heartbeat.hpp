#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace hbdiag {

using ThreadId = std::uint32_t;

/// One emitted beat. Timestamps are nanoseconds since run start.
struct HeartbeatRecord {
  ThreadId thread_id = 0;
  std::uint64_t seq = 0;
  std::uint64_t timestamp_ns = 0;

  friend bool operator==(const HeartbeatRecord&, const HeartbeatRecord&) = default;
};

/// All beats of one thread, sorted by seq.
///
/// Construction enforces the log invariants: non-empty, a single thread id,
/// seq dense from 0, and non-decreasing timestamps. Violations throw
/// Error{validation} naming the thread and the offending seq.
class HeartbeatSequence {
 public:
  HeartbeatSequence(ThreadId thread_id, std::vector<HeartbeatRecord> records);

  /// Builds records with seq 0..n-1 from raw timestamps.
  static HeartbeatSequence from_timestamps(ThreadId thread_id,
                                           std::span<const std::uint64_t> timestamps_ns);

  ThreadId thread_id() const noexcept { return thread_id_; }
  std::span<const HeartbeatRecord> records() const noexcept { return records_; }
  std::size_t size() const noexcept { return records_.size(); }
  std::uint64_t completion_time_ns() const noexcept { return records_.back().timestamp_ns; }
  std::uint64_t timestamp_ns(std::size_t i) const { return records_.at(i).timestamp_ns; }
  std::vector<std::uint64_t> timestamps_ns() const;

  friend bool operator==(const HeartbeatSequence&, const HeartbeatSequence&) = default;

 private:
  ThreadId thread_id_;
  std::vector<HeartbeatRecord> records_;
};

struct RatePoint {
  double t = 0.0;     // seconds
  double rate = 0.0;  // beats per second

  friend bool operator==(const RatePoint&, const RatePoint&) = default;
};

/// Per-thread heart-rate curve. t strictly increasing, rate > 0.
class HeartRateSeries {
 public:
  HeartRateSeries(ThreadId source_thread, std::vector<RatePoint> points);

  ThreadId source_thread() const noexcept { return source_thread_; }
  std::span<const RatePoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  bool empty() const noexcept { return points_.empty(); }

  std::vector<double> times() const;
  std::vector<double> rates() const;

 private:
  ThreadId source_thread_;
  std::vector<RatePoint> points_;
};

/// Sliding-window layout shared by the local ratio features.
///
/// Windows start at 0, stride, 2*stride, ... and span `size` samples
/// (index i to i+size), so a series of n samples yields
/// (n-1-size)/stride + 1 windows when n > size.
struct WindowConfig {
  std::size_t size = 10;
  std::size_t stride = 10;

  static WindowConfig non_overlapping(std::size_t w) { return {w, w}; }

  void validate() const;
  std::size_t window_count(std::size_t length) const noexcept;
};

// Canonical log: header `thread_id,seq,timestamp_ns`, LF endings, '#' lines
// are comments.
inline constexpr std::string_view kLogHeader = "thread_id,seq,timestamp_ns";

std::vector<HeartbeatSequence> parse_log(std::istream& in, const std::string& source_name);
std::vector<HeartbeatSequence> ingest_log(const std::filesystem::path& path);

void write_log(std::ostream& out, std::span<const HeartbeatSequence> sequences);
void write_log(const std::filesystem::path& path, std::span<const HeartbeatSequence> sequences);

/// Backward-looking rate over `rate_window` beats: point i sits at the time
/// of record i+rate_window with rate rate_window / elapsed seconds.
HeartRateSeries derive_heart_rate(const HeartbeatSequence& seq, std::size_t rate_window = 1);

double mean_rate(const HeartRateSeries& series);

}  // namespace hbdiag
