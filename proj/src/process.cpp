#include "fdg/process.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "fdg/analytic.hpp"

namespace fdg {

ForbiddenDegreeProcess::ForbiddenDegreeProcess(std::size_t n_vertices, ForbiddenDegree k)
    : k_(k), incident_(n_vertices) {}

void ForbiddenDegreeProcess::clear_vertex(Vertex v) {
  for (const EdgeId e : incident_[v]) {
    const Vertex w = edges_[e].other(v);
    auto& other = incident_[w];
    // Degrees are below k, so a linear scan is cheap.
    auto it = std::find(other.begin(), other.end(), e);
    *it = other.back();
    other.pop_back();
    alive_[e] = 0;
    --n_alive_;
  }
  incident_[v].clear();
}

int ForbiddenDegreeProcess::apply(Vertex u, Vertex v, double label) {
  if (u == v) throw std::invalid_argument("apply: self-loops are not allowed");
  const bool sat_u = k_.saturates(incident_[u].size() + 1);
  const bool sat_v = k_.saturates(incident_[v].size() + 1);
  if (!sat_u && !sat_v) {
    const auto id = static_cast<EdgeId>(edges_.size());
    edges_.push_back({u, v, label});
    alive_.push_back(1);
    incident_[u].push_back(id);
    incident_[v].push_back(id);
    ++n_alive_;
    return 0;
  }
  int count = 0;
  if (sat_u) {
    clear_vertex(u);
    log_.push_back({label, u});
    ++count;
  }
  if (sat_v) {
    clear_vertex(v);
    log_.push_back({label, v});
    ++count;
  }
  return count;
}

LabeledMultigraph ForbiddenDegreeProcess::graph() const {
  LabeledMultigraph g(incident_.size());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    if (alive_[e]) g.add_edge(edges_[e].u, edges_[e].v, edges_[e].label);
  }
  return g;
}

namespace {

void check_observations(std::span<const double> observe_at, double horizon) {
  for (std::size_t i = 0; i < observe_at.size(); ++i) {
    const double s = observe_at[i];
    if (!(s >= 0.0) || s > horizon) {
      throw std::invalid_argument("simulate: observation time outside [0, t]");
    }
    if (i > 0 && s < observe_at[i - 1]) {
      throw std::invalid_argument("simulate: observation times must be sorted");
    }
  }
}

}  // namespace

std::vector<Observation> simulate(const EventStream& stream, ForbiddenDegree k,
                                  std::span<const double> observe_at) {
  check_observations(observe_at, stream.horizon);
  ForbiddenDegreeProcess proc(stream.n_vertices, k);
  std::vector<Observation> out;
  out.reserve(observe_at.size());
  std::size_t next = 0;
  for (const double s : observe_at) {
    while (next < stream.events.size() && stream.events[next].time <= s) {
      const auto& e = stream.events[next++];
      proc.apply(e.u, e.v, e.time);
    }
    out.push_back({s, components(proc.graph())});
  }
  return out;
}

std::vector<Observation> simulate(std::size_t n, ForbiddenDegree k, double t, RngStream& rng,
                                  std::span<const double> observe_at) {
  if (!(t >= 0.0)) throw std::invalid_argument("simulate: t must be >= 0");
  check_observations(observe_at, t);
  const EventStream stream = sample_event_stream(n, t, rng);
  return simulate(stream, k, observe_at);
}

ProcessState run_process(const EventStream& stream, ForbiddenDegree k, double until) {
  ForbiddenDegreeProcess proc(stream.n_vertices, k);
  for (const auto& e : stream.events) {
    if (e.time > until) break;
    proc.apply(e.u, e.v, e.time);
  }
  return {proc.graph(), until, k, proc.removal_log()};
}

ProcessState simulate_discrete(std::size_t n, ForbiddenDegree k, std::size_t steps,
                               RngStream& rng) {
  if (n < 2) throw std::invalid_argument("simulate_discrete: n must be >= 2");
  ForbiddenDegreeProcess proc(n, k);
  for (std::size_t i = 1; i <= steps; ++i) {
    const auto [u, v] = uniform_pair(n, rng);
    proc.apply(u, v, static_cast<double>(i));
  }
  return {proc.graph(), static_cast<double>(steps), k, proc.removal_log()};
}

LabeledMultigraph phi_transform(const LabeledMultigraph& g, ForbiddenDegree k) {
  std::vector<EdgeId> order(g.n_edges());
  std::iota(order.begin(), order.end(), EdgeId{0});
  std::sort(order.begin(), order.end(),
            [&](EdgeId a, EdgeId b) { return g.edge(a).label < g.edge(b).label; });
  for (std::size_t i = 1; i < order.size(); ++i) {
    if (g.edge(order[i]).label == g.edge(order[i - 1]).label) {
      throw std::invalid_argument("phi_transform: duplicate edge labels");
    }
  }
  ForbiddenDegreeProcess proc(g.n_vertices(), k);
  for (const EdgeId e : order) {
    const auto& rec = g.edge(e);
    proc.apply(rec.u, rec.v, rec.label);
  }
  return proc.graph();
}

SandwichTriple coupled_sandwich(const EventStream& stream, ForbiddenDegree k) {
  SandwichTriple out;
  out.g_inf = accumulate(stream);
  out.g_k = run_process(stream, k, stream.horizon).graph;
  out.g_lower = t_k_transform(out.g_inf, k);
  return out;
}

SandwichTriple coupled_sandwich(std::size_t n, ForbiddenDegree k, double t, RngStream& rng) {
  return coupled_sandwich(sample_event_stream(n, t, rng), k);
}

bool edge_records_included(const LabeledMultigraph& sub, const LabeledMultigraph& super) {
  using Key = std::tuple<double, Vertex, Vertex>;
  auto keys = [](const LabeledMultigraph& g) {
    std::vector<Key> out;
    out.reserve(g.n_edges());
    for (const auto& e : g.edges()) out.emplace_back(e.label, std::min(e.u, e.v), std::max(e.u, e.v));
    std::sort(out.begin(), out.end());
    return out;
  };
  const auto a = keys(sub);
  const auto b = keys(super);
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

namespace {

// Component bookkeeping for the k = 3 chain, where every component is a
// path or a cycle.
class ZScanner {
 public:
  explicit ZScanner(const ForbiddenDegreeProcess& proc)
      : proc_(proc), stamp_(proc.n_vertices(), 0) {}

  // Sum of contributions of the distinct components meeting `seeds`; the
  // visited vertices are appended to `visited` when non-null.
  double contribution(std::span<const Vertex> seeds, std::vector<Vertex>* visited) {
    ++epoch_;
    double z = 0.0;
    for (const Vertex s : seeds) {
      if (stamp_[s] == epoch_) continue;
      stamp_[s] = epoch_;
      queue_.clear();
      queue_.push_back(s);
      std::size_t degree_sum = 0;
      for (std::size_t head = 0; head < queue_.size(); ++head) {
        const Vertex x = queue_[head];
        degree_sum += proc_.degree(x);
        proc_.for_each_neighbor(x, [&](Vertex y) {
          if (stamp_[y] != epoch_) {
            stamp_[y] = epoch_;
            queue_.push_back(y);
          }
        });
      }
      const double size = static_cast<double>(queue_.size());
      const bool cycle = degree_sum / 2 == queue_.size();
      z += cycle ? 2.0 * size * size : size * size;
      if (visited) visited->insert(visited->end(), queue_.begin(), queue_.end());
    }
    return z;
  }

 private:
  const ForbiddenDegreeProcess& proc_;
  std::vector<std::uint64_t> stamp_;
  std::uint64_t epoch_ = 0;
  std::vector<Vertex> queue_;
};

}  // namespace

std::vector<double> k3_z_trajectory(std::size_t n, std::size_t steps, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("k3_z_trajectory: n must be >= 2");
  ForbiddenDegreeProcess proc(n, ForbiddenDegree::finite(3));
  ZScanner scan(proc);
  std::vector<double> z(steps + 1);
  double current = static_cast<double>(n);
  z[0] = current;
  std::vector<Vertex> touched;
  for (std::size_t i = 1; i <= steps; ++i) {
    const auto [u, v] = uniform_pair(n, rng);
    const Vertex seeds[2] = {u, v};
    touched.clear();
    current -= scan.contribution(seeds, &touched);
    proc.apply(u, v, static_cast<double>(i));
    current += scan.contribution(touched, nullptr);
    z[i] = current;
  }
  return z;
}

}  // namespace fdg
