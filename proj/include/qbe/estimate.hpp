#pragma once

#include "qbe/chain.hpp"

#include <functional>

namespace qbe {

/// Loss driving the point estimate extracted from a chain.
struct LossSpec {
  enum class Kind { Squared, Absolute, Check, UserConvex };
  Kind kind = Kind::Squared;
  Vector taus;  // Check: one level per coordinate
  std::function<double(const Vector&)> user;  // UserConvex: convex, rho(0)=0

  static LossSpec squared() { return {}; }
  static LossSpec absolute() { return {Kind::Absolute, {}, nullptr}; }
  static LossSpec check(Vector taus) { return {Kind::Check, std::move(taus), nullptr}; }
  static LossSpec user_convex(std::function<double(const Vector&)> f) {
    return {Kind::UserConvex, {}, std::move(f)};
  }
};

struct PointEstimate {
  Vector theta_hat;
  LossSpec::Kind loss_kind = LossSpec::Kind::Squared;
  Vector mc_se;           // per-coordinate Monte Carlo standard error
  bool converged = true;  // generic solver only
};

/// Quasi-posterior mean: coordinatewise average of the retained draws.
/// mc_se comes from batch means (default 50 batches).
PointEstimate posterior_mean(const Chain& chain, Index n_batches = 50);

/// Coordinatewise empirical quantiles (left-continuous inverse). One tau
/// per coordinate, or a single tau applied to all.
PointEstimate posterior_quantiles(const Chain& chain, const Vector& taus,
                                  Index n_batches = 50);
PointEstimate posterior_quantiles(const Chain& chain, double tau,
                                  Index n_batches = 50);

/// Minimizer of the chain estimate of quasi-posterior risk
///   zeta -> (1/B) sum_j rho(sqrt(n) (theta^(j) - zeta)).
/// Squared, absolute, and check losses route to their closed forms (mean,
/// coordinatewise median, coordinatewise quantiles); user losses run
/// coordinate descent with golden-section line searches. The sqrt(n)
/// scaling does not move the argmin of the canonical losses but matters
/// for mixed-power user losses; pass the criterion sample size as n.
PointEstimate risk_minimizer(const Chain& chain, const LossSpec& loss, double n = 1.0);

}  // namespace qbe
