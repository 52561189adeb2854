#pragma once

#include "qbe/types.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace qbe {

/// Left-continuous (type-1) empirical quantile: inf{x : F_hat(x) >= tau}.
/// No interpolation; most statistics libraries default to interpolation,
/// so the convention is spelled out here once and reused everywhere.
inline double empirical_quantile(Vector values, double tau) {
  if (values.size() == 0) throw std::invalid_argument("empirical_quantile: empty sample");
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("empirical_quantile: tau must be in (0,1)");
  std::sort(values.begin(), values.end());
  const Index n = values.size();
  Index k = static_cast<Index>(std::ceil(tau * static_cast<double>(n)));
  k = std::clamp<Index>(k, 1, n);
  return values[k - 1];
}

/// Lower median: order statistic ceil(n/2). Deterministic for even n.
inline double lower_median(Vector values) {
  if (values.size() == 0) throw std::invalid_argument("lower_median: empty sample");
  std::sort(values.begin(), values.end());
  const Index k = (values.size() + 1) / 2;
  return values[k - 1];
}

/// Standard normal quantile function. Acklam's rational approximation with
/// one Halley refinement through erfc; accurate to ~1e-15 on (0,1).
inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw std::invalid_argument("normal_quantile: p must be in (0,1)");
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * std::sqrt(2.0 * M_PI) * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

/// Monte Carlo standard error of a per-column statistic, estimated from
/// consecutive batches of the chain (batch means generalized to arbitrary
/// statistics). `stat` maps a block of draws to one value per column.
template <class Stat>
Vector batch_statistic_se(const Matrix& draws, Index n_batches, Stat&& stat) {
  const Index rows = draws.rows(), d = draws.cols();
  Index k = std::min<Index>(n_batches, rows);
  if (k < 2) return Vector::Zero(d);
  const Index len = rows / k;
  Matrix per_batch(k, d);
  for (Index b = 0; b < k; ++b)
    per_batch.row(b) = stat(draws.middleRows(b * len, len)).transpose();
  Vector se(d);
  for (Index j = 0; j < d; ++j) {
    const double m = per_batch.col(j).mean();
    const double var =
        (per_batch.col(j).array() - m).square().sum() / static_cast<double>(k - 1);
    se[j] = std::sqrt(var / static_cast<double>(k));
  }
  return se;
}

}  // namespace qbe
