#include "fdg/local_tree.hpp"

#include <algorithm>
#include <stdexcept>

namespace fdg {

LocalTree::LocalTree(double t, std::uint64_t seed, std::vector<double> forced_labels)
    : t_(t), seed_(seed), forced_(std::move(forced_labels)) {
  if (!(t >= 0.0)) throw std::invalid_argument("LocalTree: t must be >= 0");
  std::sort(forced_.begin(), forced_.end());
  TreeNode root;
  root.key = mix64(seed);
  nodes_.push_back(root);
}

void LocalTree::expand(NodeId v) {
  if (nodes_[v].expanded) return;
  RngStream rng(seed_, nodes_[v].key);
  const std::uint64_t count = t_ > 0.0 ? poisson_draw(t_, rng) : 0;
  std::vector<std::pair<double, bool>> labels;
  labels.reserve(count + (v == root() ? forced_.size() : 0));
  for (std::uint64_t i = 0; i < count; ++i) labels.emplace_back(rng.uniform() * t_, false);
  if (v == root()) {
    for (const double x : forced_) labels.emplace_back(x, true);
  }
  std::sort(labels.begin(), labels.end());

  const auto first = static_cast<NodeId>(nodes_.size());
  const std::uint32_t depth = nodes_[v].depth + 1;
  const std::uint64_t key = nodes_[v].key;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    TreeNode c;
    c.parent = v;
    c.label = labels[i].first;
    c.forced = labels[i].second;
    c.depth = depth;
    c.key = hash_combine(key, i);
    nodes_.push_back(c);
  }
  nodes_[v].first_child = first;
  nodes_[v].n_children = static_cast<std::uint32_t>(labels.size());
  nodes_[v].expanded = true;
}

std::span<const TreeNode> LocalTree::children_of(NodeId v) const {
  const auto& n = nodes_[v];
  return {nodes_.data() + n.first_child, n.n_children};
}

void LocalTree::expand_to_depth(std::uint32_t depth) {
  // Nodes are appended, so a single forward sweep is a BFS.
  for (NodeId v = 0; v < nodes_.size(); ++v) {
    if (nodes_[v].depth < depth) expand(v);
  }
}

bool LocalTree::complete() const {
  return std::all_of(nodes_.begin(), nodes_.end(), [](const TreeNode& n) { return n.expanded; });
}

LabeledMultigraph LocalTree::to_graph() const {
  LabeledMultigraph g(nodes_.size());
  for (NodeId v = 1; v < nodes_.size(); ++v) g.add_edge(nodes_[v].parent, v, nodes_[v].label);
  return g;
}

LocalTree sample_gw_levels(double t, std::uint32_t depth, RngStream& rng) {
  LocalTree tree(t, rng());
  tree.expand_to_depth(depth);
  return tree;
}

}  // namespace fdg
