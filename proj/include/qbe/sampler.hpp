#pragma once

#include "qbe/chain.hpp"
#include "qbe/core.hpp"
#include "qbe/rng.hpp"

#include <cstdint>

namespace qbe {

/// Random-walk Gibbs-Metropolis configuration. Draw counts are in sweeps
/// (one sweep = one coordinate update per parameter), so n_keep sweeps of a
/// d-dimensional problem perform n_keep * d coordinate updates.
struct SamplerConfig {
  Index n_keep = 5000;       // retained sweeps
  Index n_burn = 5000;       // discarded sweeps
  Index adapt_every = 100;   // burn-in sweeps between scale adjustments
  double target_accept = 0.5;
  ParamPoint init;
  Vector init_scale;         // per-coordinate proposal sd; empty = all 1
  std::uint64_t seed = 0;
  double lambda = 1.0;       // temperature multiplier on the criterion

  void validate(Index dim) const;
};

/// One coordinate update: propose xi_k ~ N(state_k, scale^2) holding the
/// other coordinates fixed, accept with min(exp(delta log posterior), 1).
/// The proposal is symmetric, so the kernel ratio cancels. Proposals with
/// -inf log posterior are always rejected; the acceptance uniform is
/// consumed either way so the stream position does not depend on the data.
struct McmcStep {
  ParamPoint state;
  bool accepted = false;
};
McmcStep mh_coordinate_update(const ParamPoint& state, Index k, double scale,
                              const Criterion& c, const Prior& p,
                              const ParamSpace& space, Rng& rng);

/// Full-sweep sampler with burn-in-only scale adaptation: every adapt_every
/// sweeps of the burn-in, each coordinate scale is multiplied by
/// exp(clip(rate - target, -1, 1)); scales are frozen afterwards so the
/// retained chain has a fixed transition kernel. Fully reproducible from
/// cfg.seed.
Chain run_chain(const SamplerConfig& cfg, const Criterion& c, const Prior& p,
                const ParamSpace& space);

/// Multiplicative scale update used during burn-in; monotone in the rate.
double adapt_scale(double scale, double window_accept_rate, double target);

/// lambda * L_n(theta). Large fixed lambda concentrates the quasi-posterior
/// at the criterion maximizer (fixed-temperature annealing estimator).
Criterion temper(const Criterion& c, double lambda);

}  // namespace qbe
