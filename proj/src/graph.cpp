#include "fdg/graph.hpp"

#include <algorithm>
#include <unordered_map>

namespace fdg {

ForbiddenDegree ForbiddenDegree::parse(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "oo") return unbounded();
  std::size_t pos = 0;
  int k = 0;
  try {
    k = std::stoi(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid forbidden degree '" + text + "'");
  }
  if (pos != text.size()) {
    throw std::invalid_argument("invalid forbidden degree '" + text + "'");
  }
  return finite(k);
}

LabeledMultigraph::LabeledMultigraph(std::size_t n_vertices)
    : adjacency_(n_vertices) {}

EdgeId LabeledMultigraph::add_edge(Vertex u, Vertex v, double label) {
  if (u == v) throw std::invalid_argument("add_edge: self-loops are not allowed");
  if (u >= n_vertices() || v >= n_vertices()) {
    throw std::invalid_argument("add_edge: endpoint out of range");
  }
  const auto id = static_cast<EdgeId>(edges_.size());
  edges_.push_back({u, v, label});
  adjacency_[u].push_back(id);
  adjacency_[v].push_back(id);
  return id;
}

std::size_t LabeledMultigraph::max_degree() const noexcept {
  std::size_t best = 0;
  for (const auto& adj : adjacency_) best = std::max(best, adj.size());
  return best;
}

bool LabeledMultigraph::labels_distinct() const {
  auto labels = sorted_labels();
  return std::adjacent_find(labels.begin(), labels.end()) == labels.end();
}

std::vector<double> LabeledMultigraph::sorted_labels() const {
  std::vector<double> labels;
  labels.reserve(edges_.size());
  for (const auto& e : edges_) labels.push_back(e.label);
  std::sort(labels.begin(), labels.end());
  return labels;
}

LabeledMultigraph LabeledMultigraph::induced(std::span<const Vertex> keep) const {
  std::unordered_map<Vertex, Vertex> index;
  index.reserve(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) index.emplace(keep[i], static_cast<Vertex>(i));
  LabeledMultigraph out(keep.size());
  std::vector<EdgeId> chosen;
  for (const Vertex v : keep) {
    for (const EdgeId e : adjacency_[v]) {
      const auto& rec = edges_[e];
      const Vertex w = rec.other(v);
      // Each edge is visited from both endpoints; keep it once.
      if (v < w && index.count(w)) chosen.push_back(e);
    }
  }
  std::sort(chosen.begin(), chosen.end());
  for (const EdgeId e : chosen) {
    const auto& rec = edges_[e];
    out.add_edge(index.at(rec.u), index.at(rec.v), rec.label);
  }
  return out;
}

bool Multigraph::has_loop() const noexcept {
  return std::any_of(edges.begin(), edges.end(),
                     [](const auto& e) { return e.first == e.second; });
}

std::vector<std::size_t> Multigraph::degrees() const {
  std::vector<std::size_t> deg(n_vertices, 0);
  for (const auto& [u, v] : edges) {
    ++deg[u];
    ++deg[v];
  }
  return deg;
}

std::vector<std::pair<Vertex, Vertex>> Multigraph::canonical() const {
  std::vector<std::pair<Vertex, Vertex>> out;
  out.reserve(edges.size());
  for (const auto& [u, v] : edges) out.emplace_back(std::min(u, v), std::max(u, v));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fdg
