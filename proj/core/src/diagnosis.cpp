#include "hbdiag/diagnosis.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "hbdiag/errors.hpp"

namespace hbdiag {

namespace {

void require_interval(const char* name, const Interval& iv) {
  if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi) || iv.lo > iv.hi) {
    throw Error(ErrorKind::validation, std::string("invalid interval for ") + name + ": [" +
                                           std::to_string(iv.lo) + ", " + std::to_string(iv.hi) +
                                           "]");
  }
}

double safe_ratio(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

__extension__ using int128 = __int128;

// Shortest round-trip decimal form of a finite double as significand * 10^exp.
struct Decimal {
  int128 significand = 0;
  int exponent = 0;
};

Decimal to_decimal(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific);
  std::string_view s(buf, static_cast<std::size_t>(res.ptr - buf));
  Decimal d;
  bool negative = false;
  std::size_t i = 0;
  if (s[i] == '-') {
    negative = true;
    ++i;
  }
  int frac_digits = 0;
  bool in_frac = false;
  for (; i < s.size() && s[i] != 'e'; ++i) {
    if (s[i] == '.') {
      in_frac = true;
      continue;
    }
    d.significand = d.significand * 10 + (s[i] - '0');
    if (in_frac) ++frac_digits;
  }
  int exp10 = 0;
  std::from_chars(s.data() + i + 1 + (s[i + 1] == '+' ? 1 : 0), s.data() + s.size(), exp10);
  d.exponent = exp10 - frac_digits;
  if (negative) d.significand = -d.significand;
  return d;
}

// a - b evaluated exactly on the decimal forms, then rounded once to double.
// Inputs such as 1.025 and 1.0 are decimal measurements; subtracting their
// binary approximations would leak representation error into the result.
double decimal_difference(double a, double b) {
  auto da = to_decimal(a);
  auto db = to_decimal(b);
  const int shift = std::abs(da.exponent - db.exponent);
  if (shift > 18) return a - b;
  auto& hi = da.exponent > db.exponent ? da : db;
  for (int k = 0; k < shift; ++k) hi.significand *= 10;
  hi.exponent -= shift;
  int128 diff = da.significand - db.significand;
  if (diff == 0) return 0.0;
  const bool negative = diff < 0;
  if (negative) diff = -diff;
  std::string digits;
  while (diff > 0) {
    digits.insert(digits.begin(), static_cast<char>('0' + static_cast<int>(diff % 10)));
    diff /= 10;
  }
  const std::string text = (negative ? "-" : "") + digits + "e" + std::to_string(da.exponent);
  double out = 0.0;
  std::from_chars(text.data(), text.data() + text.size(), out);
  return out;
}

}  // namespace

void NormalRanges::validate() const {
  require_interval("dtw", dtw);
  require_interval("lb", lb);
  require_interval("gtr", gtr);
  require_interval("ltr", ltr);
  require_interval("ghr", ghr);
  require_interval("lhr", lhr);
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw Error(ErrorKind::empty_input, "percentile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::configuration, "percentile outside [0,1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  if (lo + 1 >= values.size()) return values.back();
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[lo + 1] - values[lo]);
}

NormalRanges train_normal_ranges(std::span<const FeatureVector> normals, double confidence) {
  if (!(confidence > 0.0 && confidence <= 1.0)) {
    throw Error(ErrorKind::configuration, "confidence must be in (0, 1]");
  }
  if (normals.size() < kMinTrainingVectors) {
    throw Error(ErrorKind::insufficient_training,
                "need at least " + std::to_string(kMinTrainingVectors) +
                    " normal feature vectors, got " + std::to_string(normals.size()));
  }
  for (std::size_t i = 0; i < normals.size(); ++i) {
    if (!normals[i].finite()) {
      throw Error(ErrorKind::validation, "training vector " + std::to_string(i) + " is not finite");
    }
  }
  const double tail = (1.0 - confidence) / 2.0;
  auto interval = [&](double FeatureVector::*field) {
    std::vector<double> v;
    v.reserve(normals.size());
    for (const auto& f : normals) v.push_back(f.*field);
    return Interval{percentile(v, tail), percentile(v, 1.0 - tail)};
  };
  NormalRanges r;
  r.dtw = interval(&FeatureVector::dtw);
  r.lb = interval(&FeatureVector::lb);
  r.gtr = interval(&FeatureVector::gtr);
  r.ltr = interval(&FeatureVector::ltr);
  r.ghr = interval(&FeatureVector::ghr);
  r.lhr = interval(&FeatureVector::lhr);
  return r;
}

DiagnosisTrace hsa_trace(const FeatureVector& f, const NormalRanges& r) {
  DiagnosisTrace t;
  t.distance_in_range = r.distance_contains(f);
  t.time_in_range = r.time_contains(f);
  t.heartrate_in_range = r.heartrate_contains(f);

  t.status = DiagnosisStatus::normal;
  if (t.distance_in_range) {
    if (!t.time_in_range) {
      if (f.gtr < r.mintime()) t.status = DiagnosisStatus::shutdown;
      if (f.gtr > r.maxtime() && !t.heartrate_in_range) t.status = DiagnosisStatus::memoryleak;
      t.unflagged_slowdown = f.gtr > r.maxtime() && t.heartrate_in_range;
    }
  } else {
    t.status = DiagnosisStatus::memoryleak;
    if (f.gtr < r.mintime()) t.status = DiagnosisStatus::shutdown;
  }
  return t;
}

DiagnosisStatus hsa_diagnose(const FeatureVector& f, const NormalRanges& r) {
  return hsa_trace(f, r).status;
}

std::vector<ThreadDiagnosis> diagnose_run(std::span<const HeartbeatSequence> candidate,
                                          const std::map<ThreadId, HeartbeatSequence>& reference,
                                          const NormalRanges& ranges, const FeatureConfig& cfg) {
  std::vector<ThreadDiagnosis> out;
  out.reserve(candidate.size());
  for (const auto& seq : candidate) {
    auto ref = reference.find(seq.thread_id());
    if (ref == reference.end()) {
      throw Error(ErrorKind::configuration,
                  "no reference sequence for thread " + std::to_string(seq.thread_id()));
    }
    ThreadDiagnosis d;
    d.thread_id = seq.thread_id();
    try {
      d.features = extract_features(seq, ref->second, cfg);
    } catch (const Error& e) {
      throw Error(e.kind(), "thread " + std::to_string(seq.thread_id()) + ": " + e.what());
    }
    const auto trace = hsa_trace(d.features, ranges);
    d.status = trace.status;
    d.unflagged_slowdown = trace.unflagged_slowdown;
    out.push_back(d);
  }
  std::sort(out.begin(), out.end(),
            [](const auto& a, const auto& b) { return a.thread_id < b.thread_id; });
  return out;
}

EvaluationReport evaluate(std::span<const DiagnosisStatus> predictions,
                          std::span<const DiagnosisStatus> labels) {
  if (predictions.size() != labels.size()) {
    throw Error(ErrorKind::validation, "predictions (" + std::to_string(predictions.size()) +
                                           ") and labels (" + std::to_string(labels.size()) +
                                           ") differ in length");
  }
  if (labels.empty()) throw Error(ErrorKind::validation, "nothing to evaluate");

  EvaluationReport rep;
  rep.total = labels.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++rep.confusion[index_of(labels[i])][index_of(predictions[i])];
  }
  double f_sum = 0.0;
  for (std::size_t c = 0; c < 3; ++c) {
    std::size_t tp = rep.confusion[c][c];
    std::size_t predicted = 0;
    std::size_t actual = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      predicted += rep.confusion[k][c];
      actual += rep.confusion[c][k];
    }
    auto& m = rep.per_class[c];
    m.support = actual;
    m.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(predicted));
    m.recall = safe_ratio(static_cast<double>(tp), static_cast<double>(actual));
    m.f1 = safe_ratio(2.0 * m.precision * m.recall, m.precision + m.recall);
    f_sum += m.f1;
  }
  rep.macro_f = f_sum / 3.0;
  return rep;
}

double macro_f_present_classes(const EvaluationReport& report) {
  double sum = 0.0;
  std::size_t present = 0;
  for (const auto& m : report.per_class) {
    if (m.support == 0) continue;
    sum += m.f1;
    ++present;
  }
  return present == 0 ? 0.0 : sum / static_cast<double>(present);
}

std::string format_report(const EvaluationReport& report) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(4);
  os << std::left << std::setw(12) << "class" << std::right << std::setw(11) << "precision"
     << std::setw(9) << "recall" << std::setw(9) << "f1" << std::setw(9) << "support" << '\n';
  for (auto s : kAllStatuses) {
    const auto& m = report.metrics(s);
    os << std::left << std::setw(12) << to_string(s) << std::right << std::setw(11) << m.precision
       << std::setw(9) << m.recall << std::setw(9) << m.f1 << std::setw(9) << m.support << '\n';
  }
  os << "macro F1: " << report.macro_f << '\n';
  os << "confusion (rows: label, columns: prediction)\n";
  os << std::left << std::setw(12) << "";
  for (auto s : kAllStatuses) os << std::right << std::setw(12) << to_string(s);
  os << '\n';
  for (auto l : kAllStatuses) {
    os << std::left << std::setw(12) << to_string(l);
    for (auto p : kAllStatuses) {
      os << std::right << std::setw(12) << report.confusion[index_of(l)][index_of(p)];
    }
    os << '\n';
  }
  return os.str();
}

double compute_overhead(double e_alpha, double e_beta) {
  if (!(e_beta > 0.0) || !std::isfinite(e_beta)) {
    throw Error(ErrorKind::degenerate_baseline,
                "baseline CPU usage must be positive, got " + std::to_string(e_beta));
  }
  if (!std::isfinite(e_alpha)) {
    throw Error(ErrorKind::validation, "instrumented CPU usage is not finite");
  }
  return decimal_difference(e_alpha, e_beta) / e_beta;
}

}  // namespace hbdiag
