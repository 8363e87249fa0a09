#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hbdiag/heartbeat.hpp"

namespace hbdiag {

/// Polynomial in normalized abscissa x' = (x - x_shift) / x_scale.
/// coefficients[0] is the intercept.
struct PolyModel {
  std::vector<double> coefficients;
  int degree = 0;
  double x_shift = 0.0;
  double x_scale = 1.0;

  double operator()(double x) const noexcept;

  /// Coefficients re-expressed in the raw abscissa.
  std::vector<double> raw_coefficients() const;
};

PolyModel fit_polynomial(std::span<const double> x, std::span<const double> y, int degree);
PolyModel fit_polynomial(const HeartRateSeries& points, int degree);

double r_squared(const PolyModel& model, std::span<const double> x, std::span<const double> y);
double r_squared(const PolyModel& model, const HeartRateSeries& points);

struct AutoFitOptions {
  double r2_threshold = 0.9;
  int max_degree = 10;
};

struct AutoFit {
  PolyModel model;
  double r_squared = 0.0;
  bool below_threshold = false;
};

/// Lowest degree in [1, max_degree] whose fit has R^2 > threshold. When no
/// degree reaches it the max_degree fit is returned with below_threshold set.
/// Constant data is fit exactly at degree 1 and treated as meeting the
/// threshold.
AutoFit auto_fit(std::span<const double> x, std::span<const double> y, AutoFitOptions opts = {});
AutoFit auto_fit(const HeartRateSeries& points, AutoFitOptions opts = {});

struct AlignedPair {
  std::vector<double> grid;
  std::vector<double> rates_q;
  std::vector<double> rates_c;
};

/// Fits both series and evaluates them on grid_size uniform points spanning
/// the overlap of their time domains.
AlignedPair align(const HeartRateSeries& seq_q, const HeartRateSeries& seq_c,
                  std::size_t grid_size = 100, AutoFitOptions opts = {});

}  // namespace hbdiag
