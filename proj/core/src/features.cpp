#include "hbdiag/features.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <deque>
#include <limits>
#include <ostream>

#include "hbdiag/errors.hpp"

namespace hbdiag {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

template <class F>
auto annotate(const char* feature, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.kind(), std::string("feature '") + feature + "': " + e.what());
  }
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

}  // namespace

bool FeatureVector::finite() const noexcept {
  return std::isfinite(gtr) && std::isfinite(ltr) && std::isfinite(ghr) && std::isfinite(lhr) &&
         std::isfinite(dtw) && std::isfinite(lb);
}

double global_time_ratio(const HeartbeatSequence& c, const HeartbeatSequence& q) {
  if (q.completion_time_ns() == 0) {
    throw Error(ErrorKind::degenerate_reference, "reference completion time is zero");
  }
  return static_cast<double>(c.completion_time_ns()) / static_cast<double>(q.completion_time_ns());
}

double local_time_ratio(const HeartbeatSequence& c, const HeartbeatSequence& q,
                        const WindowConfig& cfg) {
  cfg.validate();
  const std::size_t len = std::min(c.size(), q.size());
  const std::size_t k = cfg.window_count(len);
  if (k == 0) {
    throw Error(ErrorKind::insufficient_data, "local time ratio needs more than " +
                                                  std::to_string(cfg.size) + " beats, got " +
                                                  std::to_string(len));
  }
  const auto rc = c.records();
  const auto rq = q.records();
  double sum = 0.0;
  for (std::size_t w = 0; w < k; ++w) {
    const std::size_t i = w * cfg.stride;
    const auto dq = rq[i + cfg.size].timestamp_ns - rq[i].timestamp_ns;
    if (dq == 0) {
      throw Error(ErrorKind::degenerate_timing,
                  "reference window at beat " + std::to_string(i) + " has zero elapsed time");
    }
    const auto dc = rc[i + cfg.size].timestamp_ns - rc[i].timestamp_ns;
    sum += static_cast<double>(dc) / static_cast<double>(dq);
  }
  return sum / static_cast<double>(k);
}

double global_heartbeat_ratio(std::span<const double> c, std::span<const double> q) {
  if (c.empty() || q.empty()) throw Error(ErrorKind::empty_input, "heartbeat ratio of empty series");
  const double ref = mean_of(q);
  if (ref == 0.0) throw Error(ErrorKind::degenerate_reference, "reference mean rate is zero");
  return mean_of(c) / ref;
}

double global_heartbeat_ratio(const HeartRateSeries& c, const HeartRateSeries& q) {
  const auto rc = c.rates();
  const auto rq = q.rates();
  return global_heartbeat_ratio(rc, rq);
}

double local_heartbeat_ratio(std::span<const double> c, std::span<const double> q,
                             const WindowConfig& cfg, double eps) {
  cfg.validate();
  const std::size_t len = std::min(c.size(), q.size());
  const std::size_t k = cfg.window_count(len);
  if (k == 0) {
    throw Error(ErrorKind::insufficient_data, "local heartbeat ratio needs more than " +
                                                  std::to_string(cfg.size) + " points, got " +
                                                  std::to_string(len));
  }
  double sum = 0.0;
  std::size_t kept = 0;
  for (std::size_t w = 0; w < k; ++w) {
    const std::size_t i = w * cfg.stride;
    const double dq = q[i + cfg.size] - q[i];
    if (std::abs(dq) < eps) continue;
    sum += (c[i + cfg.size] - c[i]) / dq;
    ++kept;
  }
  if (kept == 0) {
    throw Error(ErrorKind::degenerate_reference,
                "every reference window is flat (|delta| < " + std::to_string(eps) + ")");
  }
  return sum / static_cast<double>(kept);
}

double local_heartbeat_ratio(const HeartRateSeries& c, const HeartRateSeries& q,
                             const WindowConfig& cfg, double eps) {
  const auto rc = c.rates();
  const auto rq = q.rates();
  return local_heartbeat_ratio(rc, rq, cfg, eps);
}

double dtw_distance(std::span<const double> q, std::span<const double> c, DtwCost cost,
                    std::optional<std::size_t> band) {
  if (q.empty() || c.empty()) throw Error(ErrorKind::empty_input, "dtw of empty sequence");
  const std::size_t m = q.size();
  const std::size_t n = c.size();
  const std::size_t diff = m > n ? m - n : n - m;
  if (band && *band < diff) {
    throw Error(ErrorKind::infeasible_band, "band " + std::to_string(*band) +
                                                " cannot bridge length difference " +
                                                std::to_string(diff));
  }
  auto local = [cost](double a, double b) {
    const double d = a - b;
    return cost == DtwCost::absolute ? std::abs(d) : d * d;
  };

  std::vector<double> prev(n, kInf);
  std::vector<double> cur(n, kInf);
  for (std::size_t i = 0; i < m; ++i) {
    std::size_t jlo = 0;
    std::size_t jhi = n - 1;
    if (band) {
      jlo = i > *band ? i - *band : 0;
      jhi = std::min(n - 1, i + *band);
    }
    std::fill(cur.begin(), cur.end(), kInf);
    for (std::size_t j = jlo; j <= jhi; ++j) {
      const double d = local(q[i], c[j]);
      if (i == 0 && j == 0) {
        cur[j] = d;
        continue;
      }
      double best = kInf;
      if (i > 0) best = std::min(best, prev[j]);
      if (j > 0) best = std::min(best, cur[j - 1]);
      if (i > 0 && j > 0) best = std::min(best, prev[j - 1]);
      cur[j] = d + best;
    }
    std::swap(prev, cur);
  }
  return prev[n - 1];
}

double dtw_distance(const HeartRateSeries& q, const HeartRateSeries& c, DtwCost cost,
                    std::optional<std::size_t> band) {
  const auto rq = q.rates();
  const auto rc = c.rates();
  return dtw_distance(rq, rc, cost, band);
}

Envelope envelope(std::span<const double> q, std::size_t w) {
  if (q.empty()) throw Error(ErrorKind::empty_input, "envelope of empty sequence");
  if (w < 1) throw Error(ErrorKind::configuration, "envelope window must be >= 1");
  const std::size_t n = q.size();
  Envelope env;
  env.window = w;
  env.upper.resize(n);
  env.lower.resize(n);

  // Monotone deques of indices; fronts hold the running max / min.
  std::deque<std::size_t> maxq;
  std::deque<std::size_t> minq;
  std::size_t next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t right = std::min(n - 1, i + w);
    for (; next <= right; ++next) {
      while (!maxq.empty() && q[maxq.back()] <= q[next]) maxq.pop_back();
      maxq.push_back(next);
      while (!minq.empty() && q[minq.back()] >= q[next]) minq.pop_back();
      minq.push_back(next);
    }
    const std::size_t left = i > w ? i - w : 0;
    while (maxq.front() < left) maxq.pop_front();
    while (minq.front() < left) minq.pop_front();
    env.upper[i] = q[maxq.front()];
    env.lower[i] = q[minq.front()];
  }
  return env;
}

Envelope envelope(const HeartRateSeries& q, std::size_t w) {
  const auto rq = q.rates();
  return envelope(rq, w);
}

double lb_keogh(std::span<const double> q, std::span<const double> c, std::size_t w) {
  if (q.size() != c.size()) {
    throw Error(ErrorKind::length_mismatch, "lb_keogh needs equal lengths, got " +
                                                std::to_string(q.size()) + " and " +
                                                std::to_string(c.size()));
  }
  const auto env = envelope(q, w);
  double lb = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c[i] > env.upper[i]) {
      const double d = c[i] - env.upper[i];
      lb += d * d;
    } else if (c[i] < env.lower[i]) {
      const double d = c[i] - env.lower[i];
      lb += d * d;
    }
  }
  return lb;
}

double lb_keogh(const HeartRateSeries& q, const HeartRateSeries& c, std::size_t w) {
  const auto rq = q.rates();
  const auto rc = c.rates();
  return lb_keogh(rq, rc, w);
}

void FeatureConfig::validate() const {
  window.validate();
  if (rate_window < 1) throw Error(ErrorKind::configuration, "rate_window must be >= 1");
  if (grid_size < 2) throw Error(ErrorKind::configuration, "grid_size must be >= 2");
  if (!(lhr_eps >= 0.0)) throw Error(ErrorKind::configuration, "lhr_eps must be >= 0");
  if (fit.max_degree < 1) throw Error(ErrorKind::configuration, "max_degree must be >= 1");
}

FeatureVector extract_features(const HeartbeatSequence& c, const HeartbeatSequence& q,
                               const FeatureConfig& cfg) {
  cfg.validate();
  FeatureVector f;
  f.gtr = annotate("gtr", [&] { return global_time_ratio(c, q); });
  f.ltr = annotate("ltr", [&] { return local_time_ratio(c, q, cfg.window); });

  const auto aligned = annotate("alignment", [&] {
    const auto rates_q = derive_heart_rate(q, cfg.rate_window);
    const auto rates_c = derive_heart_rate(c, cfg.rate_window);
    return align(rates_q, rates_c, cfg.grid_size, cfg.fit);
  });

  f.ghr = annotate("ghr", [&] { return global_heartbeat_ratio(aligned.rates_c, aligned.rates_q); });
  f.lhr = annotate("lhr", [&] {
    return local_heartbeat_ratio(aligned.rates_c, aligned.rates_q, cfg.window, cfg.lhr_eps);
  });
  f.dtw = annotate("dtw", [&] { return dtw_distance(aligned.rates_q, aligned.rates_c); });
  f.lb = annotate("lb", [&] { return lb_keogh(aligned.rates_q, aligned.rates_c, cfg.window.size); });
  return f;
}

void write_feature_csv(std::ostream& out, std::span<const FeatureRow> rows) {
  out << kFeatureCsvHeader << '\n';
  const auto old_precision = out.precision(17);
  for (const auto& r : rows) {
    const auto& f = r.features;
    out << r.run << ',' << r.thread_id << ',' << f.gtr << ',' << f.ltr << ',' << f.ghr << ','
        << f.lhr << ',' << f.dtw << ',' << f.lb << '\n';
  }
  out.precision(old_precision);
}

}  // namespace hbdiag
