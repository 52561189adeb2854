#include "qbe/estimate.hpp"

#include "qbe/stats.hpp"

#include <cmath>

namespace qbe {

namespace {

void require_nonempty(const Chain& chain, const char* where) {
  if (chain.size() < 1)
    throw std::invalid_argument(std::string(where) + ": empty chain");
}

Vector quantiles_of(const Matrix& draws, const Vector& taus) {
  Vector out(draws.cols());
  for (Index j = 0; j < draws.cols(); ++j)
    out[j] = empirical_quantile(draws.col(j), taus[j]);
  return out;
}

// Golden-section minimization of a convex 1-d function on [lo, hi].
double golden_section(const std::function<double(double)>& f, double lo, double hi) {
  constexpr double inv_phi = 0.6180339887498949;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * (1.0 + std::abs(a) + std::abs(b));
       ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

struct SolveResult {
  Vector zeta;
  bool converged;
};

// Coordinate descent on the empirical risk for a user convex loss.
SolveResult minimize_risk(const Matrix& draws, const LossSpec& loss, double sqrt_n) {
  const Index d = draws.cols();
  const Vector lo = draws.colwise().minCoeff();
  const Vector hi = draws.colwise().maxCoeff();
  Vector zeta = draws.colwise().mean();
  const auto risk = [&](const Vector& z) {
    double acc = 0.0;
    for (Index i = 0; i < draws.rows(); ++i)
      acc += loss.user(sqrt_n * (draws.row(i).transpose() - z));
    return acc / static_cast<double>(draws.rows());
  };
  bool converged = false;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double max_move = 0.0;
    for (Index k = 0; k < d; ++k) {
      Vector z = zeta;
      const double best = golden_section(
          [&](double x) {
            z[k] = x;
            return risk(z);
          },
          lo[k], hi[k]);
      max_move = std::max(max_move, std::abs(best - zeta[k]));
      zeta[k] = best;
    }
    if (max_move <= 1e-8 * (1.0 + zeta.lpNorm<Eigen::Infinity>())) {
      converged = true;
      break;
    }
  }
  return {zeta, converged};
}

}  // namespace

PointEstimate posterior_mean(const Chain& chain, Index n_batches) {
  require_nonempty(chain, "posterior_mean");
  PointEstimate est;
  est.loss_kind = LossSpec::Kind::Squared;
  est.theta_hat = chain.draws.colwise().mean();
  est.mc_se = batch_statistic_se(chain.draws, n_batches, [](const Matrix& block) {
    return Vector(block.colwise().mean());
  });
  return est;
}

PointEstimate posterior_quantiles(const Chain& chain, const Vector& taus,
                                  Index n_batches) {
  require_nonempty(chain, "posterior_quantiles");
  if (taus.size() != chain.dim())
    throw std::invalid_argument("posterior_quantiles: one tau per coordinate");
  for (Index j = 0; j < taus.size(); ++j)
    if (!(taus[j] > 0.0 && taus[j] < 1.0))
      throw std::invalid_argument("posterior_quantiles: tau must be in (0,1)");
  PointEstimate est;
  est.loss_kind = LossSpec::Kind::Check;
  est.theta_hat = quantiles_of(chain.draws, taus);
  est.mc_se = batch_statistic_se(chain.draws, n_batches, [&](const Matrix& block) {
    return quantiles_of(block, taus);
  });
  return est;
}

PointEstimate posterior_quantiles(const Chain& chain, double tau, Index n_batches) {
  return posterior_quantiles(chain, Vector::Constant(chain.dim(), tau), n_batches);
}

PointEstimate risk_minimizer(const Chain& chain, const LossSpec& loss, double n) {
  require_nonempty(chain, "risk_minimizer");
  switch (loss.kind) {
    case LossSpec::Kind::Squared:
      return posterior_mean(chain);
    case LossSpec::Kind::Absolute: {
      PointEstimate est = posterior_quantiles(chain, 0.5);
      est.loss_kind = LossSpec::Kind::Absolute;
      return est;
    }
    case LossSpec::Kind::Check:
      return posterior_quantiles(chain, loss.taus);
    case LossSpec::Kind::UserConvex:
      break;
  }
  if (!loss.user) throw std::invalid_argument("risk_minimizer: user loss missing");
  const double sqrt_n = std::sqrt(n);
  const SolveResult sol = minimize_risk(chain.draws, loss, sqrt_n);
  PointEstimate est;
  est.loss_kind = LossSpec::Kind::UserConvex;
  est.theta_hat = sol.zeta;
  est.converged = sol.converged;
  est.mc_se = batch_statistic_se(chain.draws, 20, [&](const Matrix& block) {
    return minimize_risk(block, loss, sqrt_n).zeta;
  });
  return est;
}

}  // namespace qbe
