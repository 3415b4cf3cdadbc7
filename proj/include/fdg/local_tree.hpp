#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "fdg/graph.hpp"
#include "fdg/rng.hpp"

namespace fdg {

using NodeId = std::uint32_t;
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct TreeNode {
  NodeId parent = kNoNode;
  double label = 0.0;  // label of the edge to the parent; unused at the root
  std::uint32_t depth = 0;
  std::uint64_t key = 0;
  NodeId first_child = 0;
  std::uint32_t n_children = 0;
  bool expanded = false;
  bool forced = false;  // child of the root given by the caller
};

/// Rooted labelled Galton-Watson tree with Poisson(t) offspring and labels
/// uniform on [0, t], grown on demand. A node's offspring depend only on
/// (seed, node key), so every expansion order yields the same tree.
class LocalTree {
 public:
  /// `forced_labels` become extra root children on top of the Poisson ones.
  LocalTree(double t, std::uint64_t seed, std::vector<double> forced_labels = {});

  double horizon() const noexcept { return t_; }
  std::uint64_t seed() const noexcept { return seed_; }
  std::size_t size() const noexcept { return nodes_.size(); }
  static constexpr NodeId root() noexcept { return 0; }

  const TreeNode& node(NodeId v) const { return nodes_[v]; }
  double label(NodeId v) const { return nodes_[v].label; }

  /// Samples the offspring of v if that has not happened yet.
  void expand(NodeId v);
  bool expanded(NodeId v) const { return nodes_[v].expanded; }

  /// Children of an expanded node, sorted by increasing label.
  std::span<const TreeNode> children_of(NodeId v) const;
  NodeId child(NodeId v, std::uint32_t i) const { return nodes_[v].first_child + i; }
  std::uint32_t n_children(NodeId v) const { return nodes_[v].n_children; }

  /// Expands every node of depth < depth.
  void expand_to_depth(std::uint32_t depth);

  /// True when every node is expanded, i.e. the whole tree is present.
  bool complete() const;

  /// Tree as a labelled multigraph; vertex i is node i.
  LabeledMultigraph to_graph() const;

 private:
  double t_;
  std::uint64_t seed_;
  std::vector<double> forced_;
  std::vector<TreeNode> nodes_;
};

/// First `depth` generations of the Poisson Galton-Watson tree.
LocalTree sample_gw_levels(double t, std::uint32_t depth, RngStream& rng);

}  // namespace fdg
