#pragma once

#include <Eigen/Dense>

#include <atomic>
#include <memory>
#include <stdexcept>
#include <string>

namespace qbe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// A point in parameter space. Dimension must match the bound ParamSpace.
using ParamPoint = Vector;

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Criterion evaluation produced NaN or failed internally; carries the
/// offending parameter value for post-mortem.
class CriterionError : public Error {
 public:
  CriterionError(const std::string& what, Vector theta)
      : Error(what), theta_(std::move(theta)) {}
  const Vector& theta() const { return theta_; }

 private:
  Vector theta_;
};

/// Second-moment matrix not invertible even after ridge regularization.
class SingularWeightError : public Error {
 public:
  using Error::Error;
};

/// Dataset schema violation: missing column, parse failure, invalid rows.
class SchemaError : public Error {
 public:
  using Error::Error;
};

/// GEL inner tilting solve failed (degenerate moments).
class GelError : public Error {
 public:
  using Error::Error;
};

/// Chain could not start (criterion error or -inf at the initial point).
class StartupError : public Error {
 public:
  using Error::Error;
};

/// Shared counters for tolerant-mode criterion evaluation. Failures are
/// mapped to -inf instead of throwing; the counts make that auditable.
struct EvalDiagnostics {
  std::atomic<long> failures{0};
  std::atomic<long> flagged{0};
};

using DiagnosticsPtr = std::shared_ptr<EvalDiagnostics>;

}  // namespace qbe
