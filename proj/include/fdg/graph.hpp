#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdg {

using Vertex = std::uint32_t;
using EdgeId = std::uint32_t;

/// Forbidden degree k >= 2, or the unbounded variant (no removals).
class ForbiddenDegree {
 public:
  static ForbiddenDegree unbounded() { return ForbiddenDegree(); }
  static ForbiddenDegree finite(int k) {
    if (k < 2) throw std::invalid_argument("forbidden degree must be >= 2");
    return ForbiddenDegree(k);
  }

  bool is_finite() const noexcept { return k_.has_value(); }
  int value() const { return k_.value(); }

  /// True when a vertex reaching `degree` must be cleared.
  bool saturates(std::size_t degree) const noexcept {
    return k_ && degree >= static_cast<std::size_t>(*k_);
  }

  std::string to_string() const { return k_ ? std::to_string(*k_) : "inf"; }
  static ForbiddenDegree parse(const std::string& text);

  friend bool operator==(const ForbiddenDegree&, const ForbiddenDegree&) = default;

 private:
  ForbiddenDegree() = default;
  explicit ForbiddenDegree(int k) : k_(k) {}
  std::optional<int> k_;
};

struct LabeledEdge {
  Vertex u;
  Vertex v;
  double label;

  Vertex other(Vertex x) const noexcept { return x == u ? v : u; }
};

/// Loopless multigraph on vertices 0..n-1 whose edges carry real labels.
/// Parallel edges are separate records, each with its own label.
class LabeledMultigraph {
 public:
  explicit LabeledMultigraph(std::size_t n_vertices = 0);

  std::size_t n_vertices() const noexcept { return adjacency_.size(); }
  std::size_t n_edges() const noexcept { return edges_.size(); }

  /// Appends an edge record; throws std::invalid_argument for loops or
  /// out-of-range endpoints.
  EdgeId add_edge(Vertex u, Vertex v, double label);

  const LabeledEdge& edge(EdgeId e) const { return edges_[e]; }
  std::span<const LabeledEdge> edges() const noexcept { return edges_; }
  std::span<const EdgeId> incident(Vertex v) const { return adjacency_[v]; }
  std::size_t degree(Vertex v) const { return adjacency_[v].size(); }
  std::size_t max_degree() const noexcept;

  /// True when no two edge records share a label.
  bool labels_distinct() const;

  /// Sorted label list; convenient for edge-record set comparisons.
  std::vector<double> sorted_labels() const;

  /// Induced subgraph on `keep` (vertex i of the result is keep[i]).
  LabeledMultigraph induced(std::span<const Vertex> keep) const;

 private:
  std::vector<LabeledEdge> edges_;
  std::vector<std::vector<EdgeId>> adjacency_;
};

/// Unlabelled multigraph edge list; loops permitted. Output of the
/// configuration model before any conditioning.
struct Multigraph {
  std::size_t n_vertices = 0;
  std::vector<std::pair<Vertex, Vertex>> edges;

  bool has_loop() const noexcept;
  std::vector<std::size_t> degrees() const;
  /// Canonical key: sorted list of (min, max) endpoint pairs.
  std::vector<std::pair<Vertex, Vertex>> canonical() const;
};

}  // namespace fdg
