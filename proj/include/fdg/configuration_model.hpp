#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "fdg/graph.hpp"
#include "fdg/rng.hpp"

namespace fdg {

/// Per-vertex degrees c_v together with their histogram d(i).
struct DegreeSequence {
  std::vector<std::size_t> c;

  DegreeSequence() = default;
  explicit DegreeSequence(std::vector<std::size_t> degrees) : c(std::move(degrees)) {}
  static DegreeSequence of(const LabeledMultigraph& g);

  std::size_t total() const noexcept;
  std::vector<std::size_t> histogram() const;
};

class RetryExhausted : public std::runtime_error {
 public:
  explicit RetryExhausted(std::size_t attempts)
      : std::runtime_error("loopless configuration: attempts exhausted"), attempts_(attempts) {}
  std::size_t attempts() const noexcept { return attempts_; }

 private:
  std::size_t attempts_;
};

/// Uniform perfect matching of the half-edges; loops and multi-edges kept.
/// Throws std::invalid_argument if the degree sum is odd.
Multigraph sample_configuration_model(const DegreeSequence& seq, RngStream& rng);

struct LooplessSample {
  Multigraph graph;
  std::size_t attempts = 0;
};

/// Rejection sampling of the configuration model until no loop occurs.
/// Throws RetryExhausted after max_attempts failures.
LooplessSample sample_loopless_configuration(const DegreeSequence& seq, RngStream& rng,
                                             std::size_t max_attempts = 1'000'000);

}  // namespace fdg
