#pragma once

#include <cstddef>
#include <vector>

#include "fdg/graph.hpp"
#include "fdg/rng.hpp"

namespace fdg {

struct Event {
  double time;
  Vertex u;
  Vertex v;
};

/// One realisation of the marked Poisson process on [0, horizon]: arrivals
/// at total rate (n-1)/2, each marked by a uniform pair of distinct vertices.
struct EventStream {
  std::size_t n_vertices = 0;
  double horizon = 0.0;
  std::vector<Event> events;  // strictly increasing times

  /// Number of events with time <= s.
  std::size_t count_until(double s) const;
};

/// Throws std::invalid_argument if n < 2 or t_max < 0 (or not finite).
EventStream sample_event_stream(std::size_t n, double t_max, RngStream& rng);

/// The multigraph of all events with time <= until, labelled by arrival time.
LabeledMultigraph accumulate(const EventStream& stream, double until);
LabeledMultigraph accumulate(const EventStream& stream);

/// Uniform unordered pair of distinct vertices of {0..n-1}.
inline std::pair<Vertex, Vertex> uniform_pair(std::size_t n, RngStream& rng) {
  const auto u = static_cast<Vertex>(rng.uniform_below(n));
  auto v = static_cast<Vertex>(rng.uniform_below(n - 1));
  if (v >= u) ++v;
  return {u, v};
}

}  // namespace fdg
