#pragma once

#include "qbe/chain.hpp"
#include "qbe/criteria.hpp"

#include <functional>

namespace qbe {

/// GEL divergence family. s is strictly convex with s'(0) = s''(0) = 1 and
/// +inf outside its finiteness interval; the three standard members are
/// empirical likelihood, exponential tilting, and continuous updating.
class DivergenceKind {
 public:
  enum class Family { EmpiricalLikelihood, ExponentialTilting, ContinuousUpdating };

  explicit DivergenceKind(Family f) : family_(f) {}
  static DivergenceKind el() { return DivergenceKind(Family::EmpiricalLikelihood); }
  static DivergenceKind et() { return DivergenceKind(Family::ExponentialTilting); }
  static DivergenceKind cue() { return DivergenceKind(Family::ContinuousUpdating); }

  Family family() const { return family_; }

  double s(double v) const {
    switch (family_) {
      case Family::EmpiricalLikelihood:
        return v < 1.0 ? -std::log1p(-v) : pos_inf;
      case Family::ExponentialTilting:
        return std::exp(v);
      case Family::ContinuousUpdating:
        return 0.5 * (1.0 + v) * (1.0 + v);
    }
    return pos_inf;
  }
  double ds(double v) const {
    switch (family_) {
      case Family::EmpiricalLikelihood:
        return 1.0 / (1.0 - v);
      case Family::ExponentialTilting:
        return std::exp(v);
      case Family::ContinuousUpdating:
        return 1.0 + v;
    }
    return 0.0;
  }
  double d2s(double v) const {
    switch (family_) {
      case Family::EmpiricalLikelihood: {
        const double r = 1.0 / (1.0 - v);
        return r * r;
      }
      case Family::ExponentialTilting:
        return std::exp(v);
      case Family::ContinuousUpdating:
        return 1.0;
    }
    return 0.0;
  }
  double s0() const { return s(0.0); }

  /// Finite upper edge of the domain, +inf when the family is entire.
  /// (Each family's domain is unbounded below.)
  double domain_upper() const {
    return family_ == Family::EmpiricalLikelihood ? 1.0 : pos_inf;
  }

 private:
  Family family_;
};

/// Solution of the inner tilting problem gamma_hat = arginf_g sum s(m_i'g).
struct TiltSolution {
  Vector gamma;
  bool converged = false;
  int inner_iterations = 0;
};

/// Safeguarded Newton from gamma = 0 with step halving that keeps every
/// m_i'gamma strictly inside the divergence domain. Stops when the
/// first-order condition (averaged over rows) satisfies
/// ||(1/n) sum s'(m_i'g) m_i||_inf <= 1e-9 (1 + ||g_bar||); iteration cap
/// 100 returns converged = false. A singular Hessian at gamma = 0
/// (degenerate moments) throws GelError.
TiltSolution gel_inner_solve(const DivergenceKind& kind, const Matrix& moments);

/// L_n(theta) = sum_i [s(m_i(theta)' gamma_hat(theta)) - s(0)]; <= 0, with
/// equality iff the sample moments vanish at theta.
Criterion gel_criterion(const DivergenceKind& kind, const MomentFunction& m,
                        const Dataset& data, bool tolerant = false);

/// Implied probabilities pi_i proportional to s'(gamma_hat' m_i), summing
/// to one. Throws std::domain_error when any s' <= 0.
Vector implied_probabilities(const DivergenceKind& kind, const Matrix& moments,
                             const TiltSolution& tilt);

/// Quasi-posterior predictive probability of an event A:
/// average over retained draws of sum_i pi_i(theta^(j)) 1{X_i in A}.
/// `implied_at` recomputes the implied probabilities at a draw (they are
/// not cached across draws); `event` is the per-row indicator of A.
double predictive_probability(const Chain& chain,
                              const std::function<Vector(const ParamPoint&)>& implied_at,
                              const Vector& event);

/// Convenience: per-draw implied probabilities for a divergence and moment
/// function, for use with predictive_probability.
std::function<Vector(const ParamPoint&)> make_implied_prob_fn(
    const DivergenceKind& kind, const MomentFunction& m);

}  // namespace qbe
