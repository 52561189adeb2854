#include "qbe/criteria.hpp"

#include "qbe/stats.hpp"

#include <cmath>
#include <utility>

namespace qbe {

namespace {

// Inverts a symmetric PSD matrix with the shared ridge policy. Returns the
// ridge actually applied through *ridge_out when non-null.
Matrix ridge_inverse(const Matrix& v, double* ridge_out = nullptr) {
  const Index p = v.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> es(v);
  const double emax = es.eigenvalues().maxCoeff();
  const double emin = es.eigenvalues().minCoeff();
  double lambda = 0.0;
  if (!(emax > 0.0) || emin <= 1e-12 * emax)
    lambda = 1e-10 * v.trace() / static_cast<double>(p);
  if (ridge_out) *ridge_out = lambda;
  if (!((emin + lambda) > 0.0))
    throw SingularWeightError("moment second-moment matrix is singular");
  Vector inv_eigs = (es.eigenvalues().array() + lambda).inverse();
  return es.eigenvectors() * inv_eigs.asDiagonal() * es.eigenvectors().transpose();
}

double tolerant_eval(const std::function<double()>& body, bool tolerant,
                     const DiagnosticsPtr& diag, const ParamPoint& theta,
                     const char* where) {
  if (!tolerant) {
    const double v = body();
    if (std::isnan(v)) throw CriterionError(std::string(where) + ": NaN", theta);
    return v;
  }
  try {
    const double v = body();
    if (std::isnan(v)) {
      ++diag->failures;
      return neg_inf;
    }
    return v;
  } catch (const Error&) {
    ++diag->failures;
    return neg_inf;
  }
}

void require_tau(double tau) {
  if (!(tau > 0.0 && tau < 1.0))
    throw std::invalid_argument("tau must be in (0,1)");
}

}  // namespace

Matrix optimal_weight(const MomentFunction& m, const ParamPoint& theta) {
  return ridge_inverse(m.second_moment(theta));
}

Criterion gmm_criterion(const MomentFunction& m, const WeightPolicy& w,
                        const Dataset& data, bool tolerant) {
  if (data.rows() < 1) throw std::invalid_argument("gmm_criterion: empty data");
  const Index n = m.n();
  const double half_n = static_cast<double>(n) / 2.0;
  auto diag = std::make_shared<EvalDiagnostics>();

  // Theta-independent policies resolve to a fixed matrix up front.
  Matrix fixed;
  switch (w.kind) {
    case WeightPolicy::Kind::Identity:
      fixed = Matrix::Identity(m.p(), m.p());
      break;
    case WeightPolicy::Kind::Fixed:
      if (w.fixed.rows() != m.p() || w.fixed.cols() != m.p())
        throw std::invalid_argument("gmm_criterion: fixed weight has wrong shape");
      fixed = w.fixed;
      break;
    case WeightPolicy::Kind::Ivqr: {
      require_tau(w.tau);
      const Matrix z = data.cols(w.z_columns);
      const Matrix zz = z.transpose() * z / static_cast<double>(data.rows());
      fixed = ridge_inverse(zz) / (w.tau * (1.0 - w.tau));
      break;
    }
    case WeightPolicy::Kind::OptimalAtTheta:
      break;
  }

  const bool continuous_updating = w.kind == WeightPolicy::Kind::OptimalAtTheta;
  auto fn = [m, fixed, continuous_updating, half_n, tolerant,
             diag](const ParamPoint& theta) {
    return tolerant_eval(
        [&] {
          const Vector g = m.average(theta);
          const Matrix& weight = continuous_updating
                                     ? static_cast<const Matrix&>(optimal_weight(m, theta))
                                     : fixed;
          return -half_n * g.dot(weight * g);
        },
        tolerant, diag, theta, "gmm_criterion");
  };
  return Criterion(std::move(fn), n, m.theta_dim(), tolerant ? diag : nullptr);
}

MomentFunction ivqr_moments(const Dataset& data, double tau, StructuralQuantileMap q,
                            Index theta_dim, const std::string& y_col,
                            const std::vector<std::string>& d_cols,
                            const std::vector<std::string>& x_cols,
                            const std::vector<std::string>& z_cols) {
  require_tau(tau);
  const Vector y = data.col(y_col);
  const Matrix d = data.cols(d_cols);
  const Matrix x = data.cols(x_cols);
  const Matrix z = data.cols(z_cols);
  const Index n = data.rows();
  const Index p = z.cols();
  auto row = [y, d, x, z, tau, q = std::move(q)](Index i, const ParamPoint& theta,
                                                 Eigen::Ref<Vector> out) {
    const double qi = q(d.row(i), x.row(i), theta);
    const double ind = y[i] <= qi ? 1.0 : 0.0;
    out = (tau - ind) * z.row(i).transpose();
  };
  return MomentFunction(n, p, theta_dim, std::move(row));
}

MomentFunction ivqr_linear_moments(const Dataset& data, double tau,
                                   const std::string& y_col,
                                   const std::vector<std::string>& d_cols,
                                   const std::vector<std::string>& z_cols) {
  const Index kd = static_cast<Index>(d_cols.size());
  auto q = [](const Vector& d, const Vector&, const ParamPoint& theta) {
    return theta[0] + d.dot(theta.tail(theta.size() - 1));
  };
  return ivqr_moments(data, tau, q, kd + 1, y_col, d_cols, {}, z_cols);
}

IndexMap linear_index() {
  return [](const Vector& x, const ParamPoint& theta) {
    return theta[0] + x.dot(theta.tail(theta.size() - 1));
  };
}

Criterion powell_criterion(const Dataset& data, double tau, IndexMap g, Index theta_dim,
                           const std::string& y_col,
                           const std::vector<std::string>& x_cols,
                           const Vector& weights) {
  require_tau(tau);
  const Vector y = data.col(y_col);
  const Matrix x = data.cols(x_cols);
  const Index n = data.rows();
  if ((y.array() < 0.0).any())
    throw SchemaError("powell_criterion: negative response in censored-at-zero model");
  Vector w = weights.size() == 0 ? Vector::Ones(n) : weights;
  if (w.size() != n)
    throw std::invalid_argument("powell_criterion: weights length must equal rows");

  auto fn = [y, x, w, tau, g = std::move(g)](const ParamPoint& theta) {
    double loss = 0.0;
    for (Index i = 0; i < y.size(); ++i) {
      const double fitted = std::max(0.0, g(x.row(i), theta));
      loss += w[i] * check_loss(tau, y[i] - fitted);
    }
    return -loss;
  };
  return Criterion(std::move(fn), n, theta_dim);
}

namespace {

struct VarData {
  Vector y;
  Matrix x;
  double warm_q;  // marginal tau-quantile of the first s responses
  Index s;
  bool recursive;
};

VarData make_var_data(const Dataset& data, double tau, Index s, bool recursive,
                      const std::string& y_col,
                      const std::vector<std::string>& x_cols) {
  require_tau(tau);
  if (data.layout() != Layout::TimeSeries)
    throw std::invalid_argument("var_criterion: requires time-series layout");
  const Index n = data.rows();
  if (s < 1 || s >= n) throw std::invalid_argument("var_criterion: need 1 <= s < n");
  VarData vd;
  vd.y = data.col(y_col);
  vd.x = data.cols(x_cols);
  vd.warm_q = empirical_quantile(vd.y.head(s), tau);
  vd.s = s;
  vd.recursive = recursive;
  return vd;
}

void unpack(const VarData& vd, const ParamPoint& packed, Vector& theta, double& rho) {
  const Index kx = vd.x.cols();
  const Index want = kx + (vd.recursive ? 1 : 0);
  if (packed.size() != want)
    throw std::invalid_argument("var parameters: expected dimension " +
                                std::to_string(want));
  theta = packed.head(kx);
  rho = vd.recursive ? packed[kx] : 0.0;
}

// Quantile path under (theta, rho); rows before s hold the imputed value.
Vector quantile_path(const VarData& vd, const Vector& theta, double rho) {
  const Index n = vd.y.size();
  Vector q(n);
  q.head(vd.s).setConstant(vd.warm_q);
  for (Index t = vd.s; t < n; ++t)
    q[t] = vd.x.row(t - 1).dot(theta) + rho * q[t - 1];
  return q;
}

}  // namespace

Criterion var_criterion(const Dataset& data, double tau, Index s, bool recursive,
                        const std::string& y_col,
                        const std::vector<std::string>& x_cols,
                        const Vector& weights) {
  VarData vd = make_var_data(data, tau, s, recursive, y_col, x_cols);
  const Index n = data.rows();
  Vector w = weights.size() == 0 ? Vector::Ones(n) : weights;
  if (w.size() != n)
    throw std::invalid_argument("var_criterion: weights length must equal rows");
  const Index dim = vd.x.cols() + (recursive ? 1 : 0);
  auto diag = std::make_shared<EvalDiagnostics>();

  auto fn = [vd, w, tau, diag](const ParamPoint& packed) {
    Vector theta;
    double rho;
    unpack(vd, packed, theta, rho);
    if (std::abs(rho) >= 1.0) ++diag->flagged;
    const Index n = vd.y.size();
    double loss = 0.0;
    double q = vd.warm_q;
    for (Index t = vd.s; t < n; ++t) {
      q = vd.x.row(t - 1).dot(theta) + rho * q;
      loss += w[t] * check_loss(tau, vd.y[t] - q);
    }
    if (!std::isfinite(loss)) return neg_inf;  // explosive recursion
    return -loss;
  };
  return Criterion(std::move(fn), n - s, dim, diag);
}

Vector var_quantile_path(const Dataset& data, double tau, Index s, bool recursive,
                         const std::string& y_col,
                         const std::vector<std::string>& x_cols,
                         const ParamPoint& packed) {
  VarData vd = make_var_data(data, tau, s, recursive, y_col, x_cols);
  Vector theta;
  double rho;
  unpack(vd, packed, theta, rho);
  return quantile_path(vd, theta, rho);
}

VarWeights two_step_var_weights(const Dataset& data, double tau, Index s,
                                bool recursive, const std::string& y_col,
                                const std::vector<std::string>& x_cols,
                                const ParamPoint& fit, double h, double eps_floor,
                                const ParamPoint* refit_lo, const ParamPoint* refit_hi) {
  if (!(tau - h / 2.0 > 0.0 && tau + h / 2.0 < 1.0))
    throw std::invalid_argument("two_step_var_weights: tau +- h/2 must lie in (0,1)");
  VarData vd = make_var_data(data, tau, s, recursive, y_col, x_cols);
  Vector theta;
  double rho;
  unpack(vd, fit, theta, rho);
  const Index n = vd.y.size();
  const Vector q = quantile_path(vd, theta, rho);

  VarWeights out;
  out.w = Vector::Ones(n) / (tau * (1.0 - tau));
  Vector spread(n);
  if (refit_lo && refit_hi) {
    // Refit reading: shifted-level parameters supplied by the caller.
    VarData lo = make_var_data(data, tau - h / 2.0, s, recursive, y_col, x_cols);
    VarData hi = make_var_data(data, tau + h / 2.0, s, recursive, y_col, x_cols);
    Vector th_lo, th_hi;
    double r_lo, r_hi;
    unpack(lo, *refit_lo, th_lo, r_lo);
    unpack(hi, *refit_hi, th_hi, r_hi);
    spread = quantile_path(hi, th_hi, r_hi) - quantile_path(lo, th_lo, r_lo);
  } else {
    // Fixed-parameter reading: shift the fitted path by the empirical
    // residual quantiles, so the spread is the quantile spacing of the
    // fitted residuals.
    const Index m = n - s;
    const Vector resid = vd.y.tail(m) - q.tail(m);
    const double dq = empirical_quantile(resid, tau + h / 2.0) -
                      empirical_quantile(resid, tau - h / 2.0);
    spread.setConstant(dq);
  }
  for (Index t = 0; t < n; ++t) {
    double sp = spread[t];
    if (!(sp > eps_floor)) {
      sp = eps_floor;
      if (t >= s) ++out.floored;
    }
    out.w[t] = h / sp / (tau * (1.0 - tau));
  }
  return out;
}

Matrix var_score_omega(const Dataset& data, double tau, Index s, bool recursive,
                       const std::string& y_col,
                       const std::vector<std::string>& x_cols,
                       const ParamPoint& fit, const Vector& weights) {
  VarData vd = make_var_data(data, tau, s, recursive, y_col, x_cols);
  Vector theta;
  double rho;
  unpack(vd, fit, theta, rho);
  const Index n = vd.y.size();
  const Index kx = vd.x.cols();
  const Index dim = kx + (recursive ? 1 : 0);
  Vector w = weights.size() == 0 ? Vector::Ones(n) : weights;
  if (w.size() != n)
    throw std::invalid_argument("var_score_omega: weights length must equal rows");

  Matrix omega = Matrix::Zero(dim, dim);
  Vector grad = Vector::Zero(dim);  // d Q_t / d (theta, rho)
  double q_prev = vd.warm_q;
  for (Index t = vd.s; t < n; ++t) {
    Vector g(dim);
    g.head(kx) = vd.x.row(t - 1).transpose() + rho * grad.head(kx);
    if (recursive) g[kx] = q_prev + rho * grad[kx];
    const double q = vd.x.row(t - 1).dot(theta) + rho * q_prev;
    const double u = vd.y[t] - q;
    const double score = w[t] * (tau - (u < 0.0 ? 1.0 : 0.0));
    omega.selfadjointView<Eigen::Lower>().rankUpdate(g, score * score);
    grad = g;
    q_prev = q;
  }
  omega = omega.selfadjointView<Eigen::Lower>();
  return omega / static_cast<double>(n - vd.s);
}

}  // namespace qbe
