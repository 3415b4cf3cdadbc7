#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "fdg/kernel.hpp"

namespace fdg {

enum class SolveStatus { converged, diverged };

struct ExtinctionSolution {
  SolveStatus status = SolveStatus::diverged;
  std::vector<double> q;        // midpoint of the two brackets
  std::vector<double> q_lower;  // limit of the iteration started at phi(0)
  std::vector<double> q_upper;  // limit of the iteration started near 1
  double residual = 0.0;        // sup |q - phi(q)|
  std::size_t iterations = 0;
  double rho_hat = 0.0;
  bool critical_window = false;  // |rho_hat - 1| < 0.05
  bool lower_monotone = true;    // every step non-decreasing
  bool upper_monotone = true;    // every step non-increasing
  double q_twostage = 1.0;
  double q_twostage_se = 0.0;
};

struct ExtinctionOptions {
  double tol = 1e-6;
  std::size_t max_iters = 100000;
  std::size_t twostage_samples = 20000;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Solves q = phi(q) on the kernel (after normalisation) from both sides
/// and averages prod q(label) over root offspring of the forbidden-degree
/// tree for the two-stage extinction probability.
ExtinctionSolution solve_extinction(const OffspringKernel& kernel, const ExtinctionOptions& opt = {});

}  // namespace fdg
