#include "fdg/components.hpp"

#include <algorithm>
#include <stdexcept>

namespace fdg {

const char* to_string(ComponentClass c) noexcept {
  switch (c) {
    case ComponentClass::path: return "path";
    case ComponentClass::cycle: return "cycle";
    case ComponentClass::other: return "other";
  }
  return "?";
}

namespace {

constexpr std::size_t kUnseen = static_cast<std::size_t>(-1);

template <class Visit>
void bfs_components(const LabeledMultigraph& g, std::vector<std::size_t>& label, Visit&& visit) {
  const std::size_t n = g.n_vertices();
  label.assign(n, kUnseen);
  std::vector<Vertex> queue;
  queue.reserve(64);
  std::size_t next_id = 0;
  for (Vertex s = 0; s < n; ++s) {
    if (label[s] != kUnseen) continue;
    queue.clear();
    queue.push_back(s);
    label[s] = next_id;
    std::size_t degree_sum = 0;
    std::size_t max_deg = 0;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex x = queue[head];
      const auto inc = g.incident(x);
      degree_sum += inc.size();
      max_deg = std::max(max_deg, inc.size());
      for (const EdgeId e : inc) {
        const Vertex y = g.edge(e).other(x);
        if (label[y] == kUnseen) {
          label[y] = next_id;
          queue.push_back(y);
        }
      }
    }
    visit(queue.size(), degree_sum / 2, max_deg);
    ++next_id;
  }
}

}  // namespace

ComponentSummary components(const LabeledMultigraph& g) {
  ComponentSummary out;
  out.n_vertices = g.n_vertices();
  std::vector<std::size_t> label;
  bfs_components(g, label, [&](std::size_t vertices, std::size_t edges, std::size_t max_deg) {
    ComponentClass c = ComponentClass::other;
    if (max_deg <= 2 && edges + 1 == vertices) c = ComponentClass::path;
    else if (max_deg <= 2 && edges == vertices) c = ComponentClass::cycle;
    out.sizes.push_back(vertices);
    out.classes.push_back(c);
    out.c_max = std::max(out.c_max, vertices);
  });
  return out;
}

std::vector<std::size_t> component_labels(const LabeledMultigraph& g) {
  std::vector<std::size_t> label;
  bfs_components(g, label, [](std::size_t, std::size_t, std::size_t) {});
  return label;
}

double z_statistic(const ComponentSummary& summary) {
  double z = 0.0;
  for (std::size_t i = 0; i < summary.sizes.size(); ++i) {
    const double s = static_cast<double>(summary.sizes[i]);
    switch (summary.classes[i]) {
      case ComponentClass::path: z += s * s; break;
      case ComponentClass::cycle: z += 2.0 * s * s; break;
      case ComponentClass::other:
        throw std::invalid_argument("z_statistic: component of class 'other' present");
    }
  }
  return z;
}

}  // namespace fdg
