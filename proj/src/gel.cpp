#include "qbe/gel.hpp"

#include <cmath>

namespace qbe {

namespace {

constexpr double kDomainGuard = 1e-8;  // keep max_i gamma'm_i <= upper - guard
constexpr int kMaxIterations = 100;

double objective(const DivergenceKind& kind, const Vector& v) {
  double obj = 0.0;
  const double s0 = kind.s0();
  for (Index i = 0; i < v.size(); ++i) obj += kind.s(v[i]) - s0;
  return obj;
}

bool inside_domain(const DivergenceKind& kind, const Vector& v) {
  const double hi = kind.domain_upper();
  if (hi == pos_inf) return true;
  return v.maxCoeff() <= hi - kDomainGuard;
}

}  // namespace

TiltSolution gel_inner_solve(const DivergenceKind& kind, const Matrix& moments) {
  const Index n = moments.rows(), p = moments.cols();
  if (n < 1 || p < 1) throw std::invalid_argument("gel_inner_solve: empty moments");
  if (!moments.allFinite())
    throw std::invalid_argument("gel_inner_solve: non-finite moments");

  const Vector gbar = moments.colwise().mean();
  const double foc_tol = 1e-9 * (1.0 + gbar.norm());

  TiltSolution sol;
  sol.gamma = Vector::Zero(p);
  Vector v = Vector::Zero(n);           // moments * gamma
  double obj = 0.0;

  // Hessian at gamma = 0 is sum m_i m_i' (s''(0)=1); if it is singular the
  // problem is degenerate in some moment direction.
  {
    Eigen::SelfAdjointEigenSolver<Matrix> es(moments.transpose() * moments);
    if (!(es.eigenvalues().minCoeff() > 1e-14 * std::max(1.0, es.eigenvalues().maxCoeff())))
      throw GelError("gel_inner_solve: degenerate moment matrix at gamma=0");
  }

  for (int it = 0; it < kMaxIterations; ++it) {
    Vector sp(n), spp(n);
    for (Index i = 0; i < n; ++i) {
      sp[i] = kind.ds(v[i]);
      spp[i] = kind.d2s(v[i]);
    }
    const Vector grad = moments.transpose() * sp;  // sum s'(v_i) m_i
    sol.inner_iterations = it;
    if ((grad / static_cast<double>(n)).lpNorm<Eigen::Infinity>() <= foc_tol) {
      sol.converged = true;
      return sol;
    }
    const Matrix hess = moments.transpose() * spp.asDiagonal() * moments;
    Vector step = -hess.ldlt().solve(grad);
    if (!step.allFinite()) step = -grad;  // fall back to steepest descent

    double alpha = 1.0;
    bool moved = false;
    for (int half = 0; half < 60; ++half) {
      const Vector gamma_try = sol.gamma + alpha * step;
      const Vector v_try = moments * gamma_try;
      if (inside_domain(kind, v_try)) {
        const double obj_try = objective(kind, v_try);
        if (obj_try < obj + 1e-14 * std::abs(obj)) {
          sol.gamma = gamma_try;
          v = v_try;
          obj = obj_try;
          moved = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!moved) {
      // No admissible descent step; report the current iterate.
      sol.inner_iterations = it + 1;
      sol.converged =
          (grad / static_cast<double>(n)).lpNorm<Eigen::Infinity>() <= foc_tol;
      return sol;
    }
  }
  sol.inner_iterations = kMaxIterations;
  Vector sp(n);
  for (Index i = 0; i < n; ++i) sp[i] = kind.ds(v[i]);
  sol.converged = ((moments.transpose() * sp) / static_cast<double>(n))
                      .lpNorm<Eigen::Infinity>() <= foc_tol;
  return sol;
}

Criterion gel_criterion(const DivergenceKind& kind, const MomentFunction& m,
                        const Dataset& data, bool tolerant) {
  if (data.rows() < 1) throw std::invalid_argument("gel_criterion: empty data");
  auto diag = std::make_shared<EvalDiagnostics>();
  auto fn = [kind, m, tolerant, diag](const ParamPoint& theta) -> double {
    try {
      const Matrix mom = m.all(theta);
      const TiltSolution tilt = gel_inner_solve(kind, mom);
      return objective(kind, mom * tilt.gamma);
    } catch (const Error&) {
      if (!tolerant) throw;
      ++diag->failures;
      return neg_inf;
    }
  };
  return Criterion(std::move(fn), m.n(), m.theta_dim(), tolerant ? diag : nullptr);
}

Vector implied_probabilities(const DivergenceKind& kind, const Matrix& moments,
                             const TiltSolution& tilt) {
  if (!tilt.converged)
    throw std::invalid_argument("implied_probabilities: tilt did not converge");
  const Vector v = moments * tilt.gamma;
  Vector w(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    w[i] = kind.ds(v[i]);
    if (!(w[i] > 0.0))
      throw std::domain_error("implied_probabilities: s' <= 0 at observation " +
                              std::to_string(i));
  }
  return w / w.sum();
}

double predictive_probability(const Chain& chain,
                              const std::function<Vector(const ParamPoint&)>& implied_at,
                              const Vector& event) {
  if (chain.size() < 1)
    throw std::invalid_argument("predictive_probability: empty chain");
  double acc = 0.0;
  for (Index j = 0; j < chain.size(); ++j) {
    const Vector pi = implied_at(chain.draws.row(j));
    if (pi.size() != event.size())
      throw std::invalid_argument("predictive_probability: indicator length mismatch");
    acc += pi.dot(event);
  }
  return acc / static_cast<double>(chain.size());
}

std::function<Vector(const ParamPoint&)> make_implied_prob_fn(
    const DivergenceKind& kind, const MomentFunction& m) {
  return [kind, m](const ParamPoint& theta) {
    const Matrix mom = m.all(theta);
    return implied_probabilities(kind, mom, gel_inner_solve(kind, mom));
  };
}

}  // namespace qbe
