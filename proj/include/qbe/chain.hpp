#pragma once

#include "qbe/types.hpp"

#include <cstdint>
#include <string>

namespace qbe {

/// Post-burn-in MCMC output: one retained state per sweep.
struct Chain {
  Matrix draws;              // B x d
  Vector logpost;            // log quasi-posterior at each retained draw
  Eigen::VectorXi accepts;   // post-burn-in acceptance count per coordinate
  Index sweeps_counted = 0;  // post-burn-in sweeps behind `accepts`
  Vector final_scales;       // proposal scales frozen at end of burn-in
  std::uint64_t seed = 0;

  Index size() const { return draws.rows(); }
  Index dim() const { return draws.cols(); }

  Vector acceptance_rates() const {
    if (sweeps_counted == 0) return Vector::Zero(dim());
    return accepts.cast<double>() / static_cast<double>(sweeps_counted);
  }
};

/// Persistence: CSV (draws then logpost as the last column) or flat
/// little-endian float64 binary, each with a JSON metadata sidecar written
/// next to the matrix file ("<path>.meta.json").
void save_chain_csv(const Chain& chain, const std::string& path);
Chain load_chain_csv(const std::string& path);
void save_chain_binary(const Chain& chain, const std::string& path);
Chain load_chain_binary(const std::string& path);

}  // namespace qbe
