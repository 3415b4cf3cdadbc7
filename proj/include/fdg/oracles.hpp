#pragma once

// Slow, independent reference implementations used by the tests and by the
// verification battery.

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "fdg/graph.hpp"

namespace fdg::oracle {

/// Pearson chi-square goodness-of-fit p-value; bins with zero expectation
/// are dropped. Degrees of freedom: used bins - 1 - fitted.
double chi_square_pvalue(const std::vector<long>& observed, const std::vector<double>& expected,
                         int fitted = 0);
double chi_square_pvalue(const std::vector<int>& observed, const std::vector<double>& expected,
                         int fitted = 0);

/// Two-sample chi-square homogeneity test p-value.
double chi_square_two_sample(const std::vector<long>& a, const std::vector<long>& b);

/// Total variation distance between two empirical histograms.
double tv_distance(const std::vector<long>& a, const std::vector<long>& b);

/// Sorted component sizes from the transitive closure of the adjacency matrix.
std::vector<std::size_t> closure_component_sizes(const LabeledMultigraph& g);

/// Forbidden-degree dynamics recomputing degrees from the full edge list at
/// every step. k <= 0 means unbounded.
LabeledMultigraph naive_replay(const LabeledMultigraph& g, int k);

/// Longest propagation path from v by enumerating every spine and every
/// tuple of side edges.
std::size_t brute_force_propagation(const LabeledMultigraph& g, Vertex v, std::size_t l_max);

/// Number of candidate propagation paths of length l from v (labels ignored),
/// and the number among them whose side labels decrease.
std::pair<std::size_t, std::size_t> count_candidate_paths(const LabeledMultigraph& g, Vertex v,
                                                          std::size_t l);

/// Every perfect matching of the half-edges of c, grouped by resulting
/// multigraph (canonical edge list).
std::map<std::vector<std::pair<Vertex, Vertex>>, std::size_t> enumerate_pairings(
    const std::vector<std::size_t>& c);

/// Poisson(t) <= k - 2 probability via the regularised incomplete gamma.
double pi_incomplete_gamma(double t, int k);

}  // namespace fdg::oracle
