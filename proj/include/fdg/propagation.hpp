#pragma once

#include <cstddef>

#include "fdg/graph.hpp"

namespace fdg {

/// Longest propagation path starting at v: a self-avoiding spine
/// v = v_0, e_1, v_1, ..., e_l, v_l with side edges f_1..f_{l-1}, f_i at v_i,
/// f_i different from every spine edge other than e_i, and labels of the
/// f_i strictly decreasing. Returns l_max as soon as a path that long exists.
std::size_t find_propagation_paths(const LabeledMultigraph& g, Vertex v, std::size_t l_max);

/// t (t + t^2)^{l-1}, the mean number of candidate paths of length l at the
/// root of the Poisson(t) tree.
double expected_propagation_count(double t, std::size_t l);

/// expected_propagation_count(t, l) / (l - 1)!.
double propagation_tail_bound(double t, std::size_t l);

}  // namespace fdg
