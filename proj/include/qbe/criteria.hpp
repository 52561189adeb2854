#pragma once

#include "qbe/core.hpp"
#include "qbe/dataset.hpp"

#include <functional>
#include <string>
#include <vector>

namespace qbe {

/// Koenker-Bassett check function rho_tau(u) = (tau - 1{u<0}) u.
/// Nonnegative, convex, piecewise linear, zero exactly at u = 0.
template <class Scalar>
Scalar check_loss(Scalar tau, Scalar u) {
  return (tau - (u < Scalar(0) ? Scalar(1) : Scalar(0))) * u;
}

/// Per-observation moment vector m_i(theta), dimension p, over n rows.
/// Builders capture an immutable snapshot of the data they need.
class MomentFunction {
 public:
  using RowFn =
      std::function<void(Index i, const ParamPoint& theta, Eigen::Ref<Vector> out)>;

  MomentFunction(Index n, Index p, Index theta_dim, RowFn row)
      : n_(n), p_(p), theta_dim_(theta_dim), row_(std::move(row)) {
    if (n_ < 1 || p_ < 1) throw std::invalid_argument("MomentFunction: empty");
  }

  Index n() const { return n_; }
  Index p() const { return p_; }
  Index theta_dim() const { return theta_dim_; }

  void row(Index i, const ParamPoint& theta, Eigen::Ref<Vector> out) const {
    row_(i, theta, out);
  }

  /// All rows stacked, n x p.
  Matrix all(const ParamPoint& theta) const {
    Matrix out(n_, p_);
    Vector buf(p_);
    for (Index i = 0; i < n_; ++i) {
      row_(i, theta, buf);
      out.row(i) = buf.transpose();
    }
    return out;
  }

  /// g_n(theta) = (1/n) sum_i m_i(theta).
  Vector average(const ParamPoint& theta) const {
    Vector g = Vector::Zero(p_);
    Vector buf(p_);
    for (Index i = 0; i < n_; ++i) {
      row_(i, theta, buf);
      g += buf;
    }
    return g / static_cast<double>(n_);
  }

  /// (1/n) sum_i m_i m_i'.
  Matrix second_moment(const ParamPoint& theta) const {
    Matrix v = Matrix::Zero(p_, p_);
    Vector buf(p_);
    for (Index i = 0; i < n_; ++i) {
      row_(i, theta, buf);
      v.selfadjointView<Eigen::Lower>().rankUpdate(buf);
    }
    v = v.selfadjointView<Eigen::Lower>();
    return v / static_cast<double>(n_);
  }

 private:
  Index n_, p_, theta_dim_;
  RowFn row_;
};

/// How the GMM quadratic form is weighted.
struct WeightPolicy {
  enum class Kind { Identity, Fixed, OptimalAtTheta, Ivqr };
  Kind kind = Kind::Identity;
  Matrix fixed;                        // Kind::Fixed: symmetric positive definite
  double tau = 0.0;                    // Kind::Ivqr
  std::vector<std::string> z_columns;  // Kind::Ivqr

  static WeightPolicy identity() { return {}; }
  static WeightPolicy fixed_matrix(Matrix w) {
    WeightPolicy p;
    p.kind = Kind::Fixed;
    p.fixed = std::move(w);
    return p;
  }
  /// Continuous updating: W_n(theta) = [(1/n) sum m_i m_i']^{-1}, recomputed
  /// at every evaluation.
  static WeightPolicy optimal_at_theta() {
    WeightPolicy p;
    p.kind = Kind::OptimalAtTheta;
    return p;
  }
  /// W_n = [1/(tau(1-tau))] [(1/n) sum Z Z']^{-1}; theta-independent, so it
  /// is resolved once at build time.
  static WeightPolicy ivqr(double tau, std::vector<std::string> z_columns) {
    WeightPolicy p;
    p.kind = Kind::Ivqr;
    p.tau = tau;
    p.z_columns = std::move(z_columns);
    return p;
  }
};

/// Inverse of the moment second-moment matrix at theta, with a ridge
/// fallback lambda = 1e-10 trace/p when the matrix is near singular.
/// Throws SingularWeightError when singular even after the ridge.
Matrix optimal_weight(const MomentFunction& m, const ParamPoint& theta);

/// L_n(theta) = -(n/2) g_n' W_n(theta) g_n, weighting resolved per policy.
Criterion gmm_criterion(const MomentFunction& m, const WeightPolicy& w,
                        const Dataset& data, bool tolerant = false);

/// Instrumental quantile regression moments
/// m_i = (tau - 1{Y_i <= q(D_i, X_i, theta)}) Z_i (weak inequality; ties
/// occur with probability zero under continuous data).
using StructuralQuantileMap =
    std::function<double(const Vector& d, const Vector& x, const ParamPoint& theta)>;

MomentFunction ivqr_moments(const Dataset& data, double tau, StructuralQuantileMap q,
                            Index theta_dim, const std::string& y_col,
                            const std::vector<std::string>& d_cols,
                            const std::vector<std::string>& x_cols,
                            const std::vector<std::string>& z_cols);

/// Linear structural quantile q = theta[0] + D' theta[1..]; instruments Z.
MomentFunction ivqr_linear_moments(const Dataset& data, double tau,
                                   const std::string& y_col,
                                   const std::vector<std::string>& d_cols,
                                   const std::vector<std::string>& z_cols);

/// Censored quantile regression criterion
/// L_n(theta) = -sum_i w_i rho_tau(Y_i - max(0, g(X_i, theta))).
/// Requires Y_i >= 0 (censored-at-zero model).
using IndexMap = std::function<double(const Vector& x, const ParamPoint& theta)>;

Criterion powell_criterion(const Dataset& data, double tau, IndexMap g, Index theta_dim,
                           const std::string& y_col,
                           const std::vector<std::string>& x_cols,
                           const Vector& weights = Vector());

/// Linear index theta[0] + X' theta[1..] for the Powell criterion.
IndexMap linear_index();

/// Dynamic value-at-risk check-loss criterion over packed parameters
/// (theta..., rho) when recursive, (theta...) otherwise:
///   Q_t = X_{t-1}' theta + rho Q_{t-1},  t >= s,
/// with Q_t for t < s imputed as the marginal tau-quantile of Y_0..Y_{s-1};
/// L = -sum_{t=s}^{n-1} w_t rho_tau(Y_t - Q_t). Criterion sample size is
/// n - s. |rho| >= 1 is allowed but counted in diagnostics (explosive
/// recursion); a non-finite path evaluates to -inf.
Criterion var_criterion(const Dataset& data, double tau, Index s, bool recursive,
                        const std::string& y_col,
                        const std::vector<std::string>& x_cols,
                        const Vector& weights = Vector());

/// Fitted conditional quantile path Q_t, t = 0..n-1, for packed parameters.
Vector var_quantile_path(const Dataset& data, double tau, Index s, bool recursive,
                         const std::string& y_col,
                         const std::vector<std::string>& x_cols,
                         const ParamPoint& packed);

struct VarWeights {
  Vector w;          // per-row, length n; rows before the warm-up end unused
  long floored = 0;  // count of spreads clipped at the eps floor
};

/// Second-step efficiency weights
///   w_t = h / [Q_t(tau + h/2) - Q_t(tau - h/2)] * 1/(tau(1-tau)),
/// evaluated with the first-stage parameters held fixed: the shifted-level
/// quantiles are Q_t(tau) plus the empirical (tau +- h/2)-quantiles of the
/// fitted residuals, a difference-quotient (quantile spacing) estimate of
/// the conditional sparsity. Pass refit_lo/refit_hi (parameters re-fitted
/// at the shifted levels) to use the refit reading instead.
VarWeights two_step_var_weights(const Dataset& data, double tau, Index s,
                                bool recursive, const std::string& y_col,
                                const std::vector<std::string>& x_cols,
                                const ParamPoint& fit, double h,
                                double eps_floor = 1e-6,
                                const ParamPoint* refit_lo = nullptr,
                                const ParamPoint* refit_hi = nullptr);

/// Outer product of the per-period criterion scores at the fitted
/// parameters: (1/(n-s)) sum_t [w_t (tau - 1{u_t<0})]^2 grad Q_t grad Q_t',
/// the Omega estimate used in sandwich intervals for the VaR criterion.
Matrix var_score_omega(const Dataset& data, double tau, Index s, bool recursive,
                       const std::string& y_col,
                       const std::vector<std::string>& x_cols,
                       const ParamPoint& fit, const Vector& weights = Vector());

}  // namespace qbe
