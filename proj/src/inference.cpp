#include "qbe/inference.hpp"

#include "qbe/stats.hpp"

#include <cmath>

namespace qbe {

IntervalReport quantile_interval(const Chain& chain, const Functional& f, double alpha,
                                 bool info_equality_asserted) {
  if (chain.size() < 1) throw std::invalid_argument("quantile_interval: empty chain");
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("quantile_interval: alpha must be in (0,1)");
  Vector values(chain.size());
  for (Index j = 0; j < chain.size(); ++j) values[j] = f.g(chain.draws.row(j));
  IntervalReport r;
  r.method = IntervalReport::Method::Quantile;
  r.level = 1.0 - alpha;
  r.lo = empirical_quantile(values, alpha / 2.0);
  r.hi = empirical_quantile(values, 1.0 - alpha / 2.0);
  r.info_equality_asserted = info_equality_asserted;
  return r;
}

Matrix j_inverse_from_chain(const Chain& chain, const ParamPoint& theta_hat, Index n) {
  if (chain.size() < 1)
    throw std::invalid_argument("j_inverse_from_chain: empty chain");
  const Matrix centered = chain.draws.rowwise() - theta_hat.transpose();
  return static_cast<double>(n) * (centered.transpose() * centered) /
         static_cast<double>(chain.size());
}

Vector fd_gradient(const std::function<double(const ParamPoint&)>& g,
                   const ParamPoint& theta) {
  Vector grad(theta.size());
  ParamPoint t = theta;
  for (Index j = 0; j < theta.size(); ++j) {
    const double h = std::max(1e-6, 1e-6 * std::abs(theta[j]));
    t[j] = theta[j] + h;
    const double up = g(t);
    t[j] = theta[j] - h;
    const double dn = g(t);
    t[j] = theta[j];
    grad[j] = (up - dn) / (2.0 * h);
  }
  return grad;
}

IntervalReport sandwich_interval(const ParamPoint& theta_hat, const Matrix& j_inv,
                                 const Matrix& omega, const Functional& f, double alpha,
                                 Index n) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("sandwich_interval: alpha must be in (0,1)");
  const Vector grad = f.grad ? f.grad(theta_hat) : fd_gradient(f.g, theta_hat);
  double v = grad.dot(j_inv * omega * j_inv * grad);
  IntervalReport r;
  r.method = IntervalReport::Method::Sandwich;
  r.level = 1.0 - alpha;
  if (v < 0.0) {  // MCMC noise can leave tiny negative quadratic forms
    v = 0.0;
    r.variance_floored = true;
  }
  const double center = f.g(theta_hat);
  const double spread = std::sqrt(v) / std::sqrt(static_cast<double>(n));
  r.lo = center + normal_quantile(alpha / 2.0) * spread;
  r.hi = center + normal_quantile(1.0 - alpha / 2.0) * spread;
  r.center = theta_hat;
  r.j_inverse = j_inv;
  r.omega = omega;
  return r;
}

OmegaEstimate omega_gmm(const MomentFunction& m, const ParamPoint& theta_hat,
                        const Matrix& w, double step_scale) {
  const Index d = theta_hat.size(), p = m.p();
  Matrix jac(p, d);
  ParamPoint t = theta_hat;
  for (Index j = 0; j < d; ++j) {
    const double h = std::max(step_scale, step_scale * std::abs(theta_hat[j]));
    t[j] = theta_hat[j] + h;
    const Vector up = m.average(t);
    t[j] = theta_hat[j] - h;
    const Vector dn = m.average(t);
    t[j] = theta_hat[j];
    jac.col(j) = (up - dn) / (2.0 * h);
  }
  OmegaEstimate est;
  est.jacobian = jac;
  est.omega = jac.transpose() * w * jac;
  Eigen::JacobiSVD<Matrix> svd(jac);
  est.rank_warning = svd.rank() < std::min(p, d);
  return est;
}

}  // namespace qbe
