// Acceptance suite: one PASS/FAIL line per criterion, exit status is the
// number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>

#include <hbdiag/align.hpp>
#include <hbdiag/diagnosis.hpp>
#include <hbdiag/features.hpp>
#include <hbdiag/synth.hpp>
#include <hbdiag/workflow.hpp>

#include "oracles.hpp"
#include "test_support.hpp"

using namespace hbdiag;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt_double(double v, const char* spec = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Advances digits in base 3; returns false after the last combination.
bool next_ternary(std::vector<double>& v) {
  for (auto& d : v) {
    if (d < 2) {
      d += 1;
      return true;
    }
    d = 0;
  }
  return false;
}

void dtw_oracle_equivalence() {
  const auto t0 = Clock::now();
  oracle::PathCache paths;
  std::size_t checked = 0, mismatched = 0;
  double worst = 0.0;

  auto check = [&](const std::vector<double>& q, const std::vector<double>& c, bool exact) {
    const auto& p = paths.get(q.size(), c.size());
    for (bool sq : {false, true}) {
      const double expect = oracle::brute_force_dtw(q, c, p, sq);
      const double got = dtw_distance(q, c, sq ? DtwCost::squared : DtwCost::absolute);
      ++checked;
      const double rel = std::abs(got - expect) / std::max(1.0, std::abs(expect));
      worst = std::max(worst, rel);
      if (exact ? got != expect : rel > 1e-9) ++mismatched;
    }
  };

  // Exhaustive over {0,1,2} for every shape whose enumeration cost
  // (value pairs times warping paths) fits the budget; seeded samples for
  // the rest, up to 8x8.
  constexpr double kBudget = 2e8;
  std::mt19937_64 rng(20240601);
  std::uniform_int_distribution<int> digit(0, 2);
  std::size_t exhaustive_shapes = 0;
  for (std::size_t m = 1; m <= 8; ++m) {
    for (std::size_t n = 1; n <= 8; ++n) {
      const double cost = std::pow(3.0, static_cast<double>(m + n)) *
                          static_cast<double>(paths.get(m, n).size());
      if (cost <= kBudget) {
        ++exhaustive_shapes;
        std::vector<double> q(m, 0.0);
        do {
          std::vector<double> c(n, 0.0);
          do check(q, c, true);
          while (next_ternary(c));
        } while (next_ternary(q));
      } else {
        for (int s = 0; s < 200; ++s) {
          std::vector<double> q(m), c(n);
          for (auto& v : q) v = digit(rng);
          for (auto& v : c) v = digit(rng);
          check(q, c, true);
        }
      }
    }
  }
  // Real-valued pairs.
  std::uniform_real_distribution<double> real(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> len(1, 8);
  for (int s = 0; s < 500; ++s) {
    std::vector<double> q(len(rng)), c(len(rng));
    for (auto& v : q) v = real(rng);
    for (auto& v : c) v = real(rng);
    check(q, c, false);
  }
  const double secs = seconds_since(t0);
  report(mismatched == 0 && secs < 60.0, "dtw_matches_path_enumeration",
         std::to_string(exhaustive_shapes) + "/64 shapes exhaustive, " +
             std::to_string(checked) + " comparisons, " + std::to_string(mismatched) +
             " mismatches, max rel err " + fmt_double(worst) + ", " + fmt_double(secs, "%.1f") +
             " s (limit 60 s)");
}

void lb_keogh_lower_bound() {
  std::mt19937_64 rng(777);
  std::normal_distribution<double> n01;
  std::size_t violations = 0, checked = 0;
  for (int pair = 0; pair < 1000; ++pair) {
    std::vector<double> q(50), c(50);
    double a = 0, b = 0;
    for (std::size_t i = 0; i < 50; ++i) {
      a += n01(rng);
      b += n01(rng);
      q[i] = a;
      c[i] = b;
    }
    for (std::size_t w : {2u, 5u, 10u}) {
      ++checked;
      if (!(lb_keogh(q, c, w) <= dtw_distance(q, c, DtwCost::squared, w))) ++violations;
    }
  }
  report(violations == 0, "lb_keogh_lower_bounds_banded_dtw",
         std::to_string(checked) + " (pair, w) checks, " + std::to_string(violations) +
             " violations");
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / (n - 1);
  return v;
}

void polynomial_exactness() {
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> coef(-2.0, 2.0);
  std::uniform_real_distribution<double> start(0.0, 5.0);
  double min_r2 = 1.0;
  int fits = 0;
  for (int d = 1; d <= 5; ++d) {
    for (int s = 0; s < 20; ++s) {
      std::vector<double> c(d + 1);
      for (auto& v : c) v = coef(rng);
      c[d] = (c[d] >= 0 ? 1 : -1) * (0.5 + std::abs(c[d]));  // keep the leading term
      const double x0 = start(rng);
      auto x = linspace(x0, x0 + 2.0, 60);
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        double acc = 0;
        for (std::size_t p = c.size(); p-- > 0;) acc = acc * x[i] + c[p];
        y[i] = acc;
      }
      min_r2 = std::min(min_r2, r_squared(fit_polynomial(x, y, d), x, y));
      ++fits;
    }
  }
  report(min_r2 >= 1 - 1e-9, "polynomial_fit_exact_on_noise_free_data",
         std::to_string(fits) + " fits of degree 1..5, min R^2 = " + fmt_double(min_r2, "%.15f") +
             " (need >= 1 - 1e-9)");

  // Shapes orthogonal to every lower degree on the sampled interval, so a
  // lower-degree fit cannot reach the threshold.
  int right = 0, total = 0;
  std::uniform_real_distribution<double> scale(0.5, 5.0);
  std::uniform_real_distribution<double> offset(-10.0, 10.0);
  for (int degree : {2, 3}) {
    for (int s = 0; s < 20; ++s) {
      const double x0 = start(rng), width = scale(rng), a = scale(rng), b = offset(rng);
      auto x = linspace(x0, x0 + width, 100);
      std::vector<double> y(x.size());
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double u = 2 * (x[i] - x0) / width - 1;
        const double shape = degree == 2 ? (3 * u * u - 1) / 2 : (5 * u * u * u - 3 * u) / 2;
        y[i] = b + a * shape;
      }
      ++total;
      right += auto_fit(x, y).model.degree == degree;
    }
  }
  report(right == total, "auto_fit_selects_generating_degree",
         std::to_string(right) + "/" + std::to_string(total) +
             " quadratics and cubics fit at their generating degree");
}

void self_comparison() {
  const auto profile = builtin_profile("NPB-cg");
  double worst = 0.0;
  std::size_t threads = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& s : gen_normal(profile, mix_seed(4242, seed))) {
      const auto f = extract_features(s, s);
      worst = std::max({worst, std::abs(f.gtr - 1), std::abs(f.ltr - 1), std::abs(f.ghr - 1),
                        std::abs(f.lhr - 1), std::abs(f.dtw), std::abs(f.lb)});
      ++threads;
    }
  }
  report(worst <= 1e-6, "self_comparison_is_identity",
         std::to_string(threads) + " threads from 20 runs, max deviation " + fmt_double(worst) +
             " (limit 1e-6)");
}

void end_to_end() {
  const auto t0 = Clock::now();
  testutil::TempDir dir("acceptance");
  DatasetOptions opts;  // standard corpus
  build_dataset(opts, dir.path());
  const auto manifest_path = dir / "manifest.json";
  auto runs = load_runs(manifest_path, read_manifest(manifest_path));
  double sum = 0;
  std::string per;
  for (std::uint64_t split_seed = 1; split_seed <= 3; ++split_seed) {
    resplit(runs, opts.train_fraction, split_seed);
    const auto cycle = run_cycle(runs, FeatureConfig{});
    sum += cycle.report.macro_f;
    per += (per.empty() ? "" : ", ") + fmt_double(cycle.report.macro_f, "%.4f");
  }
  const double mean = sum / 3;
  const double secs = seconds_since(t0);
  report(mean >= 0.90 && secs < 300.0, "end_to_end_macro_f1",
         std::to_string(opts.n_runs) + " runs, repeats [" + per + "], mean " +
             fmt_double(mean, "%.4f") + " (need >= 0.90), " + fmt_double(secs, "%.1f") +
             " s (limit 300 s)");
}

void overhead_exact() {
  const double v = compute_overhead(1.025, 1.0);
  report(v == 0.025, "overhead_of_2_5_percent", "compute_overhead(1.025, 1.0) = " +
                                                    fmt_double(v, "%.17g") +
                                                    (v == 0.025 ? ", bitwise equal to 0.025" : ""));
}

void label_soundness() {
  const DatasetOptions opts;
  const auto& profile = opts.profiles.front();
  std::size_t violations = 0;
  for (std::uint64_t i = 0; i < 50; ++i) {
    const auto seed = mix_seed(99, i);
    const auto normal = generate_run(profile, DiagnosisStatus::normal, seed, opts);
    const auto leak = generate_run(profile, DiagnosisStatus::memoryleak, seed, opts);
    for (std::size_t t = 0; t < normal.size(); ++t) {
      const auto f = extract_features(leak[t], normal[t]);
      if (!(f.gtr > 1.0 && f.ghr < 1.0)) ++violations;
    }
    std::vector<ThreadId> victims;
    const auto shut = generate_run(profile, DiagnosisStatus::shutdown, mix_seed(seed, 1), opts, &victims);
    const auto base = generate_run(profile, DiagnosisStatus::normal, mix_seed(seed, 1), opts);
    for (auto v : victims) {
      if (!(global_time_ratio(shut[v], base[v]) < 1.0)) ++violations;
    }
    if (victims.empty()) ++violations;
  }
  report(violations == 0, "injected_anomalies_match_labels",
         "50 leak and 50 shutdown runs against same-seed normals, " + std::to_string(violations) +
             " violations");
}

}  // namespace

int main() {
  try {
    dtw_oracle_equivalence();
    lb_keogh_lower_bound();
    polynomial_exactness();
    self_comparison();
    end_to_end();
    overhead_exact();
    label_soundness();
  } catch (const std::exception& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%d failure(s)\n", failures);
  return failures;
}
