#include "fdg/events.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdg {

std::size_t EventStream::count_until(double s) const {
  auto it = std::upper_bound(events.begin(), events.end(), s,
                             [](double x, const Event& e) { return x < e.time; });
  return static_cast<std::size_t>(it - events.begin());
}

EventStream sample_event_stream(std::size_t n, double t_max, RngStream& rng) {
  if (n < 2) throw std::invalid_argument("sample_event_stream: n must be >= 2");
  if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
    throw std::invalid_argument("sample_event_stream: t_max must be finite and >= 0");
  }
  EventStream out;
  out.n_vertices = n;
  out.horizon = t_max;
  const double rate = 0.5 * static_cast<double>(n - 1);
  out.events.reserve(static_cast<std::size_t>(rate * t_max * 1.05) + 16);

  double clock = 0.0;
  for (;;) {
    double next = clock + rng.exponential() / rate;
    // A gap below the resolution of `clock` would duplicate a label; redraw.
    while (!(next > clock) && next <= t_max) next = clock + rng.exponential() / rate;
    if (next > t_max) break;
    clock = next;
    const auto [u, v] = uniform_pair(n, rng);
    out.events.push_back({clock, u, v});
  }
  return out;
}

LabeledMultigraph accumulate(const EventStream& stream, double until) {
  LabeledMultigraph g(stream.n_vertices);
  for (const auto& e : stream.events) {
    if (e.time > until) break;
    g.add_edge(e.u, e.v, e.time);
  }
  return g;
}

LabeledMultigraph accumulate(const EventStream& stream) {
  return accumulate(stream, stream.horizon);
}

}  // namespace fdg
