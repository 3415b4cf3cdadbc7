#pragma once

#include <cstddef>
#include <vector>

#include "fdg/graph.hpp"

namespace fdg {

enum class ComponentClass { path, cycle, other };

const char* to_string(ComponentClass c) noexcept;

struct ComponentSummary {
  std::size_t n_vertices = 0;
  std::vector<std::size_t> sizes;         // one entry per component
  std::vector<ComponentClass> classes;    // parallel to sizes
  std::size_t c_max = 0;

  std::size_t n_components() const noexcept { return sizes.size(); }
};

/// Connected components by BFS. A component is a path when it is a tree
/// with maximum degree <= 2 (isolated vertices included), a cycle when it
/// has as many edge records as vertices and maximum degree <= 2.
ComponentSummary components(const LabeledMultigraph& g);

/// Per-vertex component index, numbered in order of the smallest vertex.
std::vector<std::size_t> component_labels(const LabeledMultigraph& g);

/// Z = sum over paths |a|^2 + 2 sum over cycles |b|^2. Throws
/// std::invalid_argument if any component is classed `other`.
double z_statistic(const ComponentSummary& summary);

}  // namespace fdg
