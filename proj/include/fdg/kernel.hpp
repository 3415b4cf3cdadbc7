#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fdg/graph.hpp"

namespace fdg {

struct ProbEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t samples = 0;
  std::size_t truncated = 0;
};

/// Weight of one draw of the forced-edge tree: the root gets edges at the
/// labels of X plus Poisson extras, and optionally a parent edge labelled y
/// to an extra leaf. With eps = 0 the weight is the indicator that the
/// parent edge (if any) survives and the root's surviving edges are exactly
/// those of X. With eps > 0 it is the probability that independent
/// (1 - 2 eps) retention of the surviving child edges keeps exactly X.
/// Returns a negative value when the evaluation was truncated.
double forced_edge_weight(double t, ForbiddenDegree k, std::optional<double> y,
                          const std::vector<double>& x, std::uint64_t tree_seed, double eps = 0.0);

/// Monte Carlo estimate of E[forced_edge_weight] at fixed (y, X).
ProbEstimate estimate_event_probability(double t, ForbiddenDegree k, std::optional<double> y,
                                        const std::vector<double>& x, std::size_t samples,
                                        std::uint64_t seed, double eps = 0.0,
                                        std::size_t workers = 1);

/// Probability that the parent edge labelled y survives at time t.
ProbEstimate estimate_attachment(double t, ForbiddenDegree k, double y, std::size_t samples,
                                 std::uint64_t seed, std::size_t workers = 1);

struct KernelOptions {
  std::size_t bins = 32;
  std::size_t samples_per_cell = 400;  // see cell_samples
  std::size_t m_samples = 4000;  // per type bin
  double eps = 0.0;              // percolation parameter
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// One cell of the offspring density table: a type bin for the parent edge
/// and a multiset of bins for the child labels.
struct KernelCell {
  std::uint16_t y_bin = 0;
  std::vector<std::uint16_t> x_bins;  // nondecreasing, size = number of children
  double f = 0.0;                     // cell average of the numerator density
  double f_se = 0.0;
  double weight = 0.0;                // vol^i / prod(multiplicity!)
};

/// Discretised offspring law of the one-stage branching process on types
/// [0, t]: densities g_i = f_i / m on a uniform grid, estimated by forcing
/// root edges at labels jittered uniformly inside each cell.
class OffspringKernel {
 public:
  OffspringKernel() = default;

  double t = 0.0;
  int k = 2;
  std::size_t bins = 0;
  std::size_t samples_per_cell = 0;
  std::uint64_t seed = 0;
  double eps = 0.0;
  std::vector<double> m_hat;  // per type bin
  std::vector<double> m_se;
  std::vector<KernelCell> cells;  // grouped by y_bin, in order
  std::vector<std::size_t> row_begin;  // cells of type bin b: [row_begin[b], row_begin[b+1])
  std::size_t truncated = 0;

  double width() const noexcept { return t / static_cast<double>(bins); }
  std::size_t bin_of(double x) const;

  /// Sum over cells of weight * f in row b: the implied m(t, y).
  double implied_mass(std::size_t b) const;

  /// Copy whose m_hat is the implied mass, so that phi(1) = 1 exactly.
  OffspringKernel normalized() const;

  /// Density value g for a cell (f / m_hat of its row).
  double g(const KernelCell& c) const { return c.f / m_hat[c.y_bin]; }
};

OffspringKernel estimate_kernel(double t, int k, const KernelOptions& opt);

/// Draws spent on a cell of the given weight: samples_per_cell scaled by
/// weight / width^2 when that exceeds one, so the childless and one-child
/// cells, which carry most of the mass, get proportionally more.
std::size_t cell_samples(double weight, double width, std::size_t samples_per_cell);

/// phi(f)(y) = g_0(y) + sum_i 1/i! int g_i(y, x) f(x_1)..f(x_i) dx on the grid.
std::vector<double> phi_apply(const OffspringKernel& kernel, const std::vector<double>& f);

/// Discretised mean operator: entry [y * B + z] is the expected number of
/// children with label in bin z of a vertex of type bin y.
std::vector<double> mean_operator(const OffspringKernel& kernel);

struct NumericFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SpectralResult {
  double rho = 0.0;
  std::vector<double> vector;  // right Perron vector, max entry 1
  std::size_t iterations = 0;
};

/// Power iteration on the shifted operator M + I. Throws NumericFailure
/// when the estimate stagnates without converging.
SpectralResult spectral_radius(const std::vector<double>& matrix, std::size_t n,
                               double tol = 1e-12, std::size_t max_iters = 100000);
double estimate_spectral_radius(const OffspringKernel& kernel);

}  // namespace fdg
