#include "fdg/configuration_model.hpp"

#include <algorithm>

namespace fdg {

DegreeSequence DegreeSequence::of(const LabeledMultigraph& g) {
  DegreeSequence out;
  out.c.resize(g.n_vertices());
  for (Vertex v = 0; v < g.n_vertices(); ++v) out.c[v] = g.degree(v);
  return out;
}

std::size_t DegreeSequence::total() const noexcept {
  std::size_t s = 0;
  for (const auto d : c) s += d;
  return s;
}

std::vector<std::size_t> DegreeSequence::histogram() const {
  std::vector<std::size_t> d;
  for (const auto ci : c) {
    if (ci >= d.size()) d.resize(ci + 1, 0);
    ++d[ci];
  }
  return d;
}

Multigraph sample_configuration_model(const DegreeSequence& seq, RngStream& rng) {
  if (seq.total() % 2 != 0) {
    throw std::invalid_argument("configuration model: degree sum must be even");
  }
  std::vector<Vertex> half;
  half.reserve(seq.total());
  for (std::size_t v = 0; v < seq.c.size(); ++v) {
    half.insert(half.end(), seq.c[v], static_cast<Vertex>(v));
  }
  // Fisher-Yates shuffle, then pair consecutive half-edges.
  for (std::size_t i = half.size(); i > 1; --i) {
    std::swap(half[i - 1], half[rng.uniform_below(i)]);
  }
  Multigraph g;
  g.n_vertices = seq.c.size();
  g.edges.reserve(half.size() / 2);
  for (std::size_t i = 0; i + 1 < half.size(); i += 2) g.edges.emplace_back(half[i], half[i + 1]);
  return g;
}

LooplessSample sample_loopless_configuration(const DegreeSequence& seq, RngStream& rng,
                                             std::size_t max_attempts) {
  for (std::size_t attempt = 1; attempt <= max_attempts; ++attempt) {
    Multigraph g = sample_configuration_model(seq, rng);
    if (!g.has_loop()) return {std::move(g), attempt};
  }
  throw RetryExhausted(max_attempts);
}

}  // namespace fdg
