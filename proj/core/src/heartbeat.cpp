#include "hbdiag/heartbeat.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

#include "hbdiag/errors.hpp"

namespace hbdiag {

namespace {

std::string where(ThreadId thread, std::uint64_t seq) {
  return "thread " + std::to_string(thread) + " seq " + std::to_string(seq);
}

bool parse_u64(std::string_view field, std::uint64_t& out) {
  if (field.empty()) return false;
  const auto* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc{} && ptr == end;
}

}  // namespace

HeartbeatSequence::HeartbeatSequence(ThreadId thread_id, std::vector<HeartbeatRecord> records)
    : thread_id_(thread_id), records_(std::move(records)) {
  if (records_.empty()) {
    throw Error(ErrorKind::empty_input,
                "heartbeat sequence for thread " + std::to_string(thread_id_) + " is empty");
  }
  for (std::size_t i = 0; i < records_.size(); ++i) {
    const auto& r = records_[i];
    if (r.thread_id != thread_id_) {
      throw Error(ErrorKind::validation, "record " + where(r.thread_id, r.seq) +
                                             " placed in sequence of thread " +
                                             std::to_string(thread_id_));
    }
    if (r.seq != i) {
      throw Error(ErrorKind::validation,
                  "non-dense sequence numbers at " + where(thread_id_, r.seq) + " (expected seq " +
                      std::to_string(i) + ")");
    }
    if (i > 0 && r.timestamp_ns < records_[i - 1].timestamp_ns) {
      throw Error(ErrorKind::validation, "timestamp decreases at " + where(thread_id_, r.seq));
    }
  }
}

HeartbeatSequence HeartbeatSequence::from_timestamps(ThreadId thread_id,
                                                     std::span<const std::uint64_t> timestamps_ns) {
  std::vector<HeartbeatRecord> records;
  records.reserve(timestamps_ns.size());
  for (std::size_t i = 0; i < timestamps_ns.size(); ++i) {
    records.push_back({thread_id, i, timestamps_ns[i]});
  }
  return HeartbeatSequence(thread_id, std::move(records));
}

std::vector<std::uint64_t> HeartbeatSequence::timestamps_ns() const {
  std::vector<std::uint64_t> out;
  out.reserve(records_.size());
  for (const auto& r : records_) out.push_back(r.timestamp_ns);
  return out;
}

HeartRateSeries::HeartRateSeries(ThreadId source_thread, std::vector<RatePoint> points)
    : source_thread_(source_thread), points_(std::move(points)) {
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!(points_[i].rate > 0.0) || !std::isfinite(points_[i].rate)) {
      throw Error(ErrorKind::validation,
                  "non-positive rate at point " + std::to_string(i) + " of thread " +
                      std::to_string(source_thread_));
    }
    if (i > 0 && !(points_[i].t > points_[i - 1].t)) {
      throw Error(ErrorKind::validation, "rate series times not strictly increasing at point " +
                                             std::to_string(i) + " of thread " +
                                             std::to_string(source_thread_));
    }
  }
}

std::vector<double> HeartRateSeries::times() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.t);
  return out;
}

std::vector<double> HeartRateSeries::rates() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.rate);
  return out;
}

void WindowConfig::validate() const {
  if (size < 1) throw Error(ErrorKind::configuration, "window size must be >= 1");
  if (stride < 1) throw Error(ErrorKind::configuration, "window stride must be >= 1");
}

std::size_t WindowConfig::window_count(std::size_t length) const noexcept {
  if (size < 1 || stride < 1 || length <= size) return 0;
  return (length - 1 - size) / stride + 1;
}

std::vector<HeartbeatSequence> parse_log(std::istream& in, const std::string& source_name) {
  std::map<ThreadId, std::vector<HeartbeatRecord>> by_thread;
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;

  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::parse, source_name + ":" + std::to_string(line_no) + ": " + what);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') fail("CRLF line ending");
    if (!line.empty() && line.front() == '#') continue;
    if (!header_seen) {
      if (line != kLogHeader) fail("expected header '" + std::string(kLogHeader) + "'");
      header_seen = true;
      continue;
    }
    if (line.empty()) fail("empty row");

    std::string_view row(line);
    std::array<std::uint64_t, 3> fields{};
    std::size_t n = 0;
    std::size_t start = 0;
    while (true) {
      auto comma = row.find(',', start);
      auto field = row.substr(start, comma == std::string_view::npos ? row.npos : comma - start);
      if (n >= fields.size()) fail("too many fields");
      if (!parse_u64(field, fields[n])) fail("malformed field '" + std::string(field) + "'");
      ++n;
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (n != fields.size()) fail("expected 3 fields, got " + std::to_string(n));
    if (fields[0] > std::numeric_limits<ThreadId>::max()) fail("thread id out of range");
    auto thread = static_cast<ThreadId>(fields[0]);
    by_thread[thread].push_back({thread, fields[1], fields[2]});
  }
  if (in.bad()) throw Error(ErrorKind::io, source_name + ": read failure");
  if (!header_seen) throw Error(ErrorKind::empty_input, source_name + ": empty log");

  std::vector<HeartbeatSequence> out;
  out.reserve(by_thread.size());
  for (auto& [thread, records] : by_thread) {
    std::stable_sort(records.begin(), records.end(),
                     [](const auto& a, const auto& b) { return a.seq < b.seq; });
    for (std::size_t i = 1; i < records.size(); ++i) {
      if (records[i].seq == records[i - 1].seq) {
        throw Error(ErrorKind::validation,
                    source_name + ": duplicate record " + where(thread, records[i].seq));
      }
    }
    // Rebase so the first retained beat is seq 0; gaps are still rejected.
    const auto first = records.front().seq;
    for (auto& r : records) r.seq -= first;
    try {
      out.emplace_back(thread, std::move(records));
    } catch (const Error& e) {
      throw Error(e.kind(), source_name + ": " + e.what());
    }
  }
  return out;
}

std::vector<HeartbeatSequence> ingest_log(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot open log " + path.string());
  return parse_log(in, path.string());
}

void write_log(std::ostream& out, std::span<const HeartbeatSequence> sequences) {
  out << kLogHeader << '\n';
  std::string buf;
  for (const auto& seq : sequences) {
    for (const auto& r : seq.records()) {
      buf.clear();
      buf += std::to_string(r.thread_id);
      buf += ',';
      buf += std::to_string(r.seq);
      buf += ',';
      buf += std::to_string(r.timestamp_ns);
      buf += '\n';
      out << buf;
    }
  }
}

void write_log(const std::filesystem::path& path, std::span<const HeartbeatSequence> sequences) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "cannot write log " + path.string());
  write_log(out, sequences);
  out.flush();
  if (!out) throw Error(ErrorKind::io, "write failed for " + path.string());
}

HeartRateSeries derive_heart_rate(const HeartbeatSequence& seq, std::size_t rate_window) {
  if (rate_window < 1) throw Error(ErrorKind::configuration, "rate_window must be >= 1");
  if (seq.size() < rate_window + 1) {
    throw Error(ErrorKind::insufficient_data,
                "thread " + std::to_string(seq.thread_id()) + " has " + std::to_string(seq.size()) +
                    " beats, need " + std::to_string(rate_window + 1));
  }
  const auto records = seq.records();
  std::vector<RatePoint> points;
  points.reserve(records.size() - rate_window);
  for (std::size_t i = 0; i + rate_window < records.size(); ++i) {
    const auto t0 = records[i].timestamp_ns;
    const auto t1 = records[i + rate_window].timestamp_ns;
    if (t1 == t0) {
      throw Error(ErrorKind::degenerate_timing,
                  "zero elapsed time in rate window ending at " +
                      where(seq.thread_id(), records[i + rate_window].seq));
    }
    const double elapsed_s = static_cast<double>(t1 - t0) * 1e-9;
    const double t_s = static_cast<double>(t1) * 1e-9;
    if (!points.empty() && !(t_s > points.back().t)) {
      throw Error(ErrorKind::degenerate_timing,
                  "repeated timestamp at " + where(seq.thread_id(), records[i + rate_window].seq));
    }
    points.push_back({t_s, static_cast<double>(rate_window) / elapsed_s});
  }
  return HeartRateSeries(seq.thread_id(), std::move(points));
}

double mean_rate(const HeartRateSeries& series) {
  if (series.empty()) throw Error(ErrorKind::empty_input, "mean_rate of empty series");
  double sum = 0.0;
  for (const auto& p : series.points()) sum += p.rate;
  return sum / static_cast<double>(series.size());
}

}  // namespace hbdiag
