#pragma once

#include <cstddef>
#include <span>
#include <tuple>
#include <vector>

#include "fdg/components.hpp"
#include "fdg/events.hpp"
#include "fdg/graph.hpp"
#include "fdg/rng.hpp"

namespace fdg {

struct Saturation {
  double time;
  Vertex vertex;
};

/// Snapshot of the forbidden-degree dynamics.
struct ProcessState {
  LabeledMultigraph graph;
  double clock = 0.0;
  ForbiddenDegree k = ForbiddenDegree::unbounded();
  std::vector<Saturation> removal_log;
};

/// Incremental forbidden-degree dynamics. Each arrival adds an edge; an
/// endpoint that would reach degree k loses every incident edge, the new
/// one included, and drops to degree 0. When both endpoints saturate the
/// union of their edges goes in one step.
class ForbiddenDegreeProcess {
 public:
  ForbiddenDegreeProcess(std::size_t n_vertices, ForbiddenDegree k);

  /// Returns the number of endpoints that saturated (0, 1 or 2).
  int apply(Vertex u, Vertex v, double label);

  std::size_t n_vertices() const noexcept { return incident_.size(); }
  std::size_t degree(Vertex v) const { return incident_[v].size(); }
  std::size_t n_edges() const noexcept { return n_alive_; }
  ForbiddenDegree forbidden_degree() const noexcept { return k_; }
  const std::vector<Saturation>& removal_log() const noexcept { return log_; }

  /// Live edge records, in label order.
  LabeledMultigraph graph() const;

  /// Neighbours of v through live edges (with repetition for parallel edges).
  template <class F>
  void for_each_neighbor(Vertex v, F&& f) const {
    for (const EdgeId e : incident_[v]) f(edges_[e].other(v));
  }

 private:
  void clear_vertex(Vertex v);

  ForbiddenDegree k_;
  std::vector<LabeledEdge> edges_;
  std::vector<char> alive_;
  std::vector<std::vector<EdgeId>> incident_;
  std::vector<Saturation> log_;
  std::size_t n_alive_ = 0;
};

struct Observation {
  double time;
  ComponentSummary summary;
};

/// Simulates G^k on n vertices up to time t and summarises components at
/// each time of `observe_at` (sorted, inside [0, t]). Throws
/// std::invalid_argument on bad arguments.
std::vector<Observation> simulate(std::size_t n, ForbiddenDegree k, double t, RngStream& rng,
                                  std::span<const double> observe_at);
std::vector<Observation> simulate(const EventStream& stream, ForbiddenDegree k,
                                  std::span<const double> observe_at);

/// State after every event with time <= until has been applied.
ProcessState run_process(const EventStream& stream, ForbiddenDegree k, double until);

/// Discrete-time chain: `steps` uniform pairs, labels 1, 2, ..., steps.
ProcessState simulate_discrete(std::size_t n, ForbiddenDegree k, std::size_t steps,
                               RngStream& rng);

/// Adds the edges of g in increasing label order under the forbidden-degree
/// rule. The output keeps the vertex set of g and lists surviving edges in
/// label order. Throws std::invalid_argument on duplicate labels.
LabeledMultigraph phi_transform(const LabeledMultigraph& g, ForbiddenDegree k);

struct SandwichTriple {
  LabeledMultigraph g_lower;  // T_k(G^inf)
  LabeledMultigraph g_k;      // Phi(G^inf)
  LabeledMultigraph g_inf;
};

SandwichTriple coupled_sandwich(std::size_t n, ForbiddenDegree k, double t, RngStream& rng);
SandwichTriple coupled_sandwich(const EventStream& stream, ForbiddenDegree k);

/// True when every edge record of `sub` (matched by label and endpoints)
/// occurs in `super`.
bool edge_records_included(const LabeledMultigraph& sub, const LabeledMultigraph& super);

/// Z_l of the k = 3 discrete chain for l = 0..steps, maintained incrementally.
std::vector<double> k3_z_trajectory(std::size_t n, std::size_t steps, RngStream& rng);

}  // namespace fdg
