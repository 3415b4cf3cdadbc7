#include "fdg/propagation.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fdg {

namespace {

class PathSearch {
 public:
  PathSearch(const LabeledMultigraph& g, std::size_t l_max)
      : g_(g), l_max_(l_max), on_spine_(g.n_vertices(), 0) {}

  std::size_t run(Vertex v) {
    best_ = 0;
    dfs(v, 0, std::numeric_limits<double>::infinity());
    return best_;
  }

 private:
  // x = v_i; bound is the label of f_{i-1} (infinite when i <= 1).
  void dfs(Vertex x, std::size_t i, double bound) {
    if (i > best_) best_ = i;
    if (best_ >= l_max_) return;
    on_spine_[x] = 1;
    const auto inc = g_.incident(x);
    for (const EdgeId next : inc) {
      const Vertex y = g_.edge(next).other(x);
      if (on_spine_[y]) continue;
      if (i == 0) {
        dfs(y, 1, bound);
      } else {
        // The admissible side edge with the largest label keeps the most
        // room for the rest of the path.
        double side = -std::numeric_limits<double>::infinity();
        for (const EdgeId f : inc) {
          if (f == next) continue;
          const double lab = g_.edge(f).label;
          if (lab < bound && lab > side) side = lab;
        }
        if (side == -std::numeric_limits<double>::infinity()) continue;
        dfs(y, i + 1, side);
      }
      if (best_ >= l_max_) break;
    }
    on_spine_[x] = 0;
  }

  const LabeledMultigraph& g_;
  std::size_t l_max_;
  std::vector<char> on_spine_;
  std::size_t best_ = 0;
};

}  // namespace

std::size_t find_propagation_paths(const LabeledMultigraph& g, Vertex v, std::size_t l_max) {
  if (v >= g.n_vertices()) throw std::invalid_argument("find_propagation_paths: bad vertex");
  if (l_max == 0) return 0;
  PathSearch search(g, l_max);
  return search.run(v);
}

double expected_propagation_count(double t, std::size_t l) {
  if (l < 1) throw std::invalid_argument("expected_propagation_count: l must be >= 1");
  return t * std::pow(t + t * t, static_cast<double>(l - 1));
}

double propagation_tail_bound(double t, std::size_t l) {
  return expected_propagation_count(t, l) / std::tgamma(static_cast<double>(l));
}

}  // namespace fdg
