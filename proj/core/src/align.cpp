#include "hbdiag/align.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Dense>

#include "hbdiag/errors.hpp"

namespace hbdiag {

namespace {

void check_xy(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::length_mismatch, "x has " + std::to_string(x.size()) +
                                                " points but y has " + std::to_string(y.size()));
  }
}

double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

double PolyModel::operator()(double x) const noexcept {
  const double u = (x - x_shift) / x_scale;
  double acc = 0.0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * u + *it;
  return acc;
}

std::vector<double> PolyModel::raw_coefficients() const {
  // p(x) = sum_k a_k ((x - s) / h)^k, expanded binomially in x.
  std::vector<double> raw(coefficients.size(), 0.0);
  for (int k = 0; k < static_cast<int>(coefficients.size()); ++k) {
    const double ak = coefficients[k] / std::pow(x_scale, k);
    for (int j = 0; j <= k; ++j) {
      raw[j] += ak * binomial(k, j) * std::pow(-x_shift, k - j);
    }
  }
  return raw;
}

PolyModel fit_polynomial(std::span<const double> x, std::span<const double> y, int degree) {
  check_xy(x, y);
  if (degree < 1) throw Error(ErrorKind::configuration, "polynomial degree must be >= 1");
  const auto n = x.size();
  const auto cols = static_cast<std::size_t>(degree) + 1;
  if (n < cols) {
    throw Error(ErrorKind::insufficient_data, "degree " + std::to_string(degree) + " fit needs " +
                                                  std::to_string(cols) + " points, got " +
                                                  std::to_string(n));
  }
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double span = *hi - *lo;
  if (!(span > 0.0) || !std::isfinite(span)) {
    throw Error(ErrorKind::conditioning, "abscissae are not distinct");
  }

  PolyModel model;
  model.degree = degree;
  model.x_shift = *lo;
  model.x_scale = span;

  Eigen::MatrixXd design(n, cols);
  Eigen::VectorXd rhs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = (x[i] - model.x_shift) / model.x_scale;
    double pw = 1.0;
    for (std::size_t k = 0; k < cols; ++k) {
      design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = pw;
      pw *= u;
    }
    rhs(static_cast<Eigen::Index>(i)) = y[i];
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  if (qr.rank() < static_cast<Eigen::Index>(cols)) {
    throw Error(ErrorKind::conditioning, "design matrix is rank deficient at degree " +
                                             std::to_string(degree) + " (rank " +
                                             std::to_string(qr.rank()) + ")");
  }
  const Eigen::VectorXd beta = qr.solve(rhs);
  model.coefficients.assign(beta.data(), beta.data() + beta.size());
  if (!std::all_of(model.coefficients.begin(), model.coefficients.end(),
                   [](double c) { return std::isfinite(c); })) {
    throw Error(ErrorKind::conditioning, "non-finite coefficients at degree " +
                                             std::to_string(degree));
  }
  return model;
}

PolyModel fit_polynomial(const HeartRateSeries& points, int degree) {
  const auto x = points.times();
  const auto y = points.rates();
  return fit_polynomial(x, y, degree);
}

double r_squared(const PolyModel& model, std::span<const double> x, std::span<const double> y) {
  check_xy(x, y);
  if (y.size() < 2) throw Error(ErrorKind::insufficient_data, "R-squared needs >= 2 points");
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0;
  double ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double r = model(x[i]) - y[i];
    const double d = mean - y[i];
    ss_res += r * r;
    ss_tot += d * d;
  }
  if (ss_tot == 0.0) throw Error(ErrorKind::undefined_r_squared, "response has zero variance");
  return 1.0 - ss_res / ss_tot;
}

double r_squared(const PolyModel& model, const HeartRateSeries& points) {
  const auto x = points.times();
  const auto y = points.rates();
  return r_squared(model, x, y);
}

AutoFit auto_fit(std::span<const double> x, std::span<const double> y, AutoFitOptions opts) {
  check_xy(x, y);
  if (x.size() < 2) throw Error(ErrorKind::insufficient_data, "auto_fit needs >= 2 points");
  if (opts.max_degree < 1) throw Error(ErrorKind::configuration, "max_degree must be >= 1");

  const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
  if (constant) return {fit_polynomial(x, y, 1), 1.0, false};

  // Degrees beyond n-1 cannot be fit; stop at the largest feasible one.
  const int top = std::min(opts.max_degree, static_cast<int>(x.size()) - 1);
  AutoFit best;
  for (int d = 1; d <= top; ++d) {
    best.model = fit_polynomial(x, y, d);
    best.r_squared = r_squared(best.model, x, y);
    if (best.r_squared > opts.r2_threshold) {
      best.below_threshold = false;
      return best;
    }
  }
  best.below_threshold = true;
  return best;
}

AutoFit auto_fit(const HeartRateSeries& points, AutoFitOptions opts) {
  const auto x = points.times();
  const auto y = points.rates();
  return auto_fit(x, y, opts);
}

AlignedPair align(const HeartRateSeries& seq_q, const HeartRateSeries& seq_c,
                  std::size_t grid_size, AutoFitOptions opts) {
  if (grid_size < 2) throw Error(ErrorKind::configuration, "grid_size must be >= 2");
  if (seq_q.empty() || seq_c.empty()) throw Error(ErrorKind::empty_input, "align of empty series");
  const auto pq = seq_q.points();
  const auto pc = seq_c.points();
  const double lo = std::max(pq.front().t, pc.front().t);
  const double hi = std::min(pq.back().t, pc.back().t);
  if (!(hi > lo)) {
    throw Error(ErrorKind::no_overlap, "time domains [" + std::to_string(pq.front().t) + ", " +
                                           std::to_string(pq.back().t) + "] and [" +
                                           std::to_string(pc.front().t) + ", " +
                                           std::to_string(pc.back().t) + "] do not overlap");
  }

  const auto fit_q = auto_fit(seq_q, opts);
  const auto fit_c = auto_fit(seq_c, opts);

  AlignedPair out;
  out.grid.resize(grid_size);
  out.rates_q.resize(grid_size);
  out.rates_c.resize(grid_size);
  const double step = (hi - lo) / static_cast<double>(grid_size - 1);
  for (std::size_t i = 0; i < grid_size; ++i) {
    const double t = (i + 1 == grid_size) ? hi : lo + step * static_cast<double>(i);
    out.grid[i] = t;
    out.rates_q[i] = fit_q.model(t);
    out.rates_c[i] = fit_c.model(t);
  }
  return out;
}

}  // namespace hbdiag
