#pragma once

#include "qbe/types.hpp"

#include <cmath>
#include <functional>
#include <utility>

namespace qbe {

/// Box-constrained parameter domain: a compact product of intervals with
/// nonempty interior.
class ParamSpace {
 public:
  ParamSpace(Vector lower, Vector upper)
      : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() != upper_.size())
      throw std::invalid_argument("ParamSpace: bound dimensions differ");
    if (lower_.size() < 1) throw std::invalid_argument("ParamSpace: dimension must be >= 1");
    for (Index j = 0; j < lower_.size(); ++j)
      if (!(lower_[j] < upper_[j]))
        throw std::invalid_argument("ParamSpace: lower must be strictly below upper");
  }

  /// [center - radius, center + radius] in every coordinate.
  static ParamSpace centered(const Vector& center, double radius) {
    return ParamSpace(center.array() - radius, center.array() + radius);
  }

  Index dim() const { return lower_.size(); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }

 private:
  Vector lower_, upper_;
};

/// Boundary-inclusive membership test.
inline bool contains(const ParamSpace& space, const ParamPoint& theta) {
  if (theta.size() != space.dim())
    throw std::invalid_argument("contains: dimension mismatch");
  return (theta.array() >= space.lower().array()).all() &&
         (theta.array() <= space.upper().array()).all();
}

/// Prior weight over the parameter space. The flat kind encodes the domain
/// truncation itself: log density 0 inside, -inf outside, so the sampler
/// needs no separate rejection path.
class Prior {
 public:
  enum class Kind { FlatOnSpace, UserLogDensity };

  static Prior flat(ParamSpace space) {
    Prior p;
    p.kind_ = Kind::FlatOnSpace;
    auto sp = std::move(space);
    p.log_density_ = [sp](const ParamPoint& theta) {
      return contains(sp, theta) ? 0.0 : neg_inf;
    };
    return p;
  }

  /// Caller contract: finite and continuous on the space it is used with.
  static Prior user(std::function<double(const ParamPoint&)> log_density) {
    Prior p;
    p.kind_ = Kind::UserLogDensity;
    p.log_density_ = std::move(log_density);
    return p;
  }

  Kind kind() const { return kind_; }
  double log_density(const ParamPoint& theta) const { return log_density_(theta); }

 private:
  Prior() = default;
  Kind kind_ = Kind::FlatOnSpace;
  std::function<double(const ParamPoint&)> log_density_;
};

/// An evaluable log-criterion L_n bound to a dataset. Evaluation is a pure
/// function of theta; builders capture immutable data snapshots, so
/// concurrent calls are safe.
class Criterion {
 public:
  using Fn = std::function<double(const ParamPoint&)>;

  Criterion() = default;
  Criterion(Fn fn, Index n, Index dim, DiagnosticsPtr diag = nullptr)
      : fn_(std::move(fn)), n_(n), dim_(dim), diag_(std::move(diag)) {}

  double operator()(const ParamPoint& theta) const { return fn_(theta); }

  /// Sample size driving the criterion (drives the sqrt(n) scalings downstream).
  Index n() const { return n_; }
  Index dim() const { return dim_; }
  bool valid() const { return static_cast<bool>(fn_); }

  /// Tolerant-mode failure counters; null when the builder ran strict.
  const DiagnosticsPtr& diagnostics() const { return diag_; }

 private:
  Fn fn_;
  Index n_ = 0;
  Index dim_ = 0;
  DiagnosticsPtr diag_;
};

/// Log of the unnormalized quasi-posterior, L_n(theta) + log pi(theta).
/// Never exponentiates; the normalization constant is never computed.
/// -inf when the prior excludes theta or the criterion is -inf there.
inline double log_quasi_posterior(const Criterion& c, const Prior& p,
                                  const ParamPoint& theta) {
  if (theta.size() != c.dim())
    throw std::invalid_argument("log_quasi_posterior: dimension mismatch");
  const double lp = p.log_density(theta);
  if (lp == neg_inf) return neg_inf;
  const double l = c(theta);
  if (std::isnan(l)) throw CriterionError("criterion returned NaN", theta);
  if (l == neg_inf) return neg_inf;
  return l + lp;
}

}  // namespace qbe
