#include "qbe/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace qbe {

namespace {

std::string format_point(const ParamPoint& theta) {
  std::ostringstream os;
  os << theta.transpose();
  return os.str();
}

// Log quasi-posterior that treats anything outside the space as -inf, so a
// user prior with support beyond the box still cannot leak the chain out.
double bounded_lqp(const Criterion& c, const Prior& p, const ParamSpace& space,
                   const ParamPoint& theta) {
  if (!contains(space, theta)) return neg_inf;
  return log_quasi_posterior(c, p, theta);
}

}  // namespace

void SamplerConfig::validate(Index dim) const {
  if (n_keep < 1) throw std::invalid_argument("SamplerConfig: n_keep must be >= 1");
  if (n_burn < 0) throw std::invalid_argument("SamplerConfig: n_burn must be >= 0");
  if (!(target_accept > 0.0 && target_accept < 1.0))
    throw std::invalid_argument("SamplerConfig: target_accept must be in (0,1)");
  if (init.size() != dim) throw std::invalid_argument("SamplerConfig: init dimension");
  if (init_scale.size() != 0) {
    if (init_scale.size() != dim)
      throw std::invalid_argument("SamplerConfig: init_scale dimension");
    if (!(init_scale.array() > 0.0).all())
      throw std::invalid_argument("SamplerConfig: init_scale must be positive");
  }
  if (!(lambda > 0.0)) throw std::invalid_argument("SamplerConfig: lambda must be > 0");
}

double adapt_scale(double scale, double window_accept_rate, double target) {
  if (!(scale > 0.0)) throw std::invalid_argument("adapt_scale: scale must be > 0");
  const double shift = std::clamp(window_accept_rate - target, -1.0, 1.0);
  return scale * std::exp(shift);
}

Criterion temper(const Criterion& c, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("temper: lambda must be > 0");
  if (lambda == 1.0) return c;
  return Criterion([c, lambda](const ParamPoint& theta) { return lambda * c(theta); },
                   c.n(), c.dim(), c.diagnostics());
}

McmcStep mh_coordinate_update(const ParamPoint& state, Index k, double scale,
                              const Criterion& c, const Prior& p,
                              const ParamSpace& space, Rng& rng) {
  const double current = bounded_lqp(c, p, space, state);
  if (current == neg_inf)
    throw std::invalid_argument("mh_coordinate_update: state outside the support");
  McmcStep step;
  step.state = state;
  ParamPoint proposal = state;
  proposal[k] += scale * rng.normal();
  const double proposed = bounded_lqp(c, p, space, proposal);
  const double u = rng.uniform();  // consumed on every decision
  if (std::log(u) < proposed - current) {
    step.state = std::move(proposal);
    step.accepted = true;
  }
  return step;
}

Chain run_chain(const SamplerConfig& cfg, const Criterion& c, const Prior& p,
                const ParamSpace& space) {
  const Index d = space.dim();
  if (c.dim() != d) throw std::invalid_argument("run_chain: criterion dimension");
  cfg.validate(d);
  if (!contains(space, cfg.init))
    throw StartupError("run_chain: initial point outside the parameter space: " +
                       format_point(cfg.init));

  const Criterion crit = temper(c, cfg.lambda);
  double lqp;
  try {
    lqp = bounded_lqp(crit, p, space, cfg.init);
  } catch (const Error& e) {
    throw StartupError(std::string("run_chain: criterion failed at init ") +
                       format_point(cfg.init) + ": " + e.what());
  }
  if (lqp == neg_inf)
    throw StartupError("run_chain: log quasi-posterior is -inf at init " +
                       format_point(cfg.init));

  Rng rng(cfg.seed);
  ParamPoint state = cfg.init;
  Vector scales = cfg.init_scale.size() == 0 ? Vector::Ones(d) : cfg.init_scale;

  Chain chain;
  chain.draws.resize(cfg.n_keep, d);
  chain.logpost.resize(cfg.n_keep);
  chain.accepts = Eigen::VectorXi::Zero(d);
  chain.seed = cfg.seed;

  Eigen::VectorXi window_accepts = Eigen::VectorXi::Zero(d);
  const Index total = cfg.n_burn + cfg.n_keep;
  for (Index sweep = 0; sweep < total; ++sweep) {
    const bool burning = sweep < cfg.n_burn;
    for (Index k = 0; k < d; ++k) {
      ParamPoint proposal = state;
      proposal[k] += scales[k] * rng.normal();
      const double proposed = bounded_lqp(crit, p, space, proposal);
      const double u = rng.uniform();
      if (std::log(u) < proposed - lqp) {
        state = std::move(proposal);
        lqp = proposed;
        if (burning)
          ++window_accepts[k];
        else
          ++chain.accepts[k];
      }
    }
    if (burning) {
      if (cfg.adapt_every > 0 && (sweep + 1) % cfg.adapt_every == 0) {
        for (Index k = 0; k < d; ++k) {
          const double rate = static_cast<double>(window_accepts[k]) /
                              static_cast<double>(cfg.adapt_every);
          scales[k] = adapt_scale(scales[k], rate, cfg.target_accept);
        }
        window_accepts.setZero();
      }
    } else {
      const Index j = sweep - cfg.n_burn;
      chain.draws.row(j) = state.transpose();
      chain.logpost[j] = lqp;
    }
  }
  chain.sweeps_counted = cfg.n_keep;
  chain.final_scales = scales;
  return chain;
}

}  // namespace qbe
