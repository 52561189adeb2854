#pragma once

#include "qbe/chain.hpp"
#include "qbe/criteria.hpp"

#include <functional>

namespace qbe {

/// Smooth scalar functional of the parameter, with an optional analytic
/// gradient; central finite differences are used when grad is absent.
struct Functional {
  std::function<double(const ParamPoint&)> g;
  std::function<Vector(const ParamPoint&)> grad;

  static Functional coordinate(Index j) {
    Functional f;
    f.g = [j](const ParamPoint& theta) { return theta[j]; };
    f.grad = [j](const ParamPoint& theta) {
      Vector e = Vector::Zero(theta.size());
      e[j] = 1.0;
      return e;
    };
    return f;
  }
  static Functional linear(Vector c) {
    Functional f;
    f.g = [c](const ParamPoint& theta) { return c.dot(theta); };
    f.grad = [c](const ParamPoint&) { return c; };
    return f;
  }
};

struct IntervalReport {
  enum class Method { Quantile, Sandwich };
  Method method = Method::Quantile;
  double level = 0.0;  // 1 - alpha
  double lo = 0.0, hi = 0.0;
  /// Quantile method: caller-asserted claim that the criterion weighting
  /// satisfies the information equality. Recorded, never verified here.
  bool info_equality_asserted = false;
  /// Sandwich method: negative variance quadratic form floored at zero.
  bool variance_floored = false;
  // Sandwich ingredients, kept for the report.
  Vector center;
  Matrix j_inverse, omega;
};

/// Equal-tailed quasi-posterior interval: left-continuous alpha/2 and
/// 1 - alpha/2 quantiles of {g(theta^(j))}. Valid in large samples only
/// under information-equality weighting, which the caller asserts.
IntervalReport quantile_interval(const Chain& chain, const Functional& f, double alpha,
                                 bool info_equality_asserted = true);

/// J_n^{-1} estimate: n times the covariance of the retained draws around
/// theta_hat.
Matrix j_inverse_from_chain(const Chain& chain, const ParamPoint& theta_hat, Index n);

/// Delta-method interval with the Huber sandwich variance
/// grad g' J^{-1} Omega J^{-1} grad g / n.
IntervalReport sandwich_interval(const ParamPoint& theta_hat, const Matrix& j_inv,
                                 const Matrix& omega, const Functional& f, double alpha,
                                 Index n);

/// Central finite-difference gradient with step max(1e-6, 1e-6 |theta_j|).
Vector fd_gradient(const std::function<double(const ParamPoint&)>& g,
                   const ParamPoint& theta);

struct OmegaEstimate {
  Matrix omega;     // G_hat' W G_hat
  Matrix jacobian;  // G_hat, p x d
  bool rank_warning = false;
};

/// Omega = G' W G with G the central finite-difference Jacobian of the
/// averaged moments at theta_hat. Valid as the score variance when W is
/// the efficient weighting (W = Var(m)^{-1}), e.g. optimal GMM or the
/// Example-3 IVQR weight. `step_scale` sets h_j = max(step, step |theta_j|);
/// the 1e-6 default suits smooth moments — indicator moments need a
/// macroscopic step, see indicator_moment_step.
OmegaEstimate omega_gmm(const MomentFunction& m, const ParamPoint& theta_hat,
                        const Matrix& w, double step_scale = 1e-6);

/// Step size n^{-1/3} for differentiating averages of indicator moments,
/// where an infinitesimal step never crosses an indicator boundary.
inline double indicator_moment_step(Index n) {
  return std::pow(static_cast<double>(n), -1.0 / 3.0);
}

}  // namespace qbe
