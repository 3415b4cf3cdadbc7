#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "fdg/graph.hpp"
#include "fdg/local_tree.hpp"
#include "fdg/rng.hpp"

namespace fdg {

/// Thrown by LazyPhi when a cap is exceeded; callers turn it into a status.
struct Truncated : std::runtime_error {
  Truncated() : std::runtime_error("lazy evaluation truncated") {}
};

/// Exact evaluation of the forbidden-degree transform on a LocalTree,
/// touching only the nodes it needs.
///
/// For a non-root node v with parent edge label y, rho(v) is the first time
/// the parent edge is removed in the process restricted to v's subtree plus
/// that edge, or +inf. v keeps the set S of children whose edge is present:
/// a child enters at its label unless it saturates right then, leaves at
/// its own rho, and S empties whenever v would reach degree k. Every query
/// at v only needs the children's state strictly before the event being
/// processed, so labels decrease along the recursion.
class LazyPhi {
 public:
  struct Limits {
    std::size_t depth_cap = 60;         // nesting of rho evaluations
    std::size_t size_cap = 1'000'000;   // tree nodes touched
  };

  /// With `root_parent_label`, the root behaves as a non-root node whose
  /// parent is an extra leaf joined by an edge with that label.
  LazyPhi(LocalTree& tree, ForbiddenDegree k, std::optional<double> root_parent_label = {});
  LazyPhi(LocalTree& tree, ForbiddenDegree k, std::optional<double> root_parent_label,
          Limits limits);

  /// rho(v) if it is <= h, +inf otherwise.
  double rho(NodeId v, double h);

  /// Children of v whose edge is present at time s (v's own parent edge is
  /// assumed present). Empty when v has been cut off before s.
  std::vector<NodeId> alive_children(NodeId v, double s);

  /// With a root parent stub: true when that edge is still present at s.
  bool root_attached(double s);

  const LocalTree& tree() const noexcept { return tree_; }

 private:
  struct State {
    std::uint32_t next_child = 0;
    bool parent_done = false;
    bool parent_in = false;
    double rho = std::numeric_limits<double>::infinity();
    std::vector<NodeId> s;
  };

  void resolve(NodeId v, double h);
  State& state(NodeId v);
  bool has_parent(NodeId v) const { return v != LocalTree::root() || root_parent_.has_value(); }
  double parent_label(NodeId v) const {
    return v == LocalTree::root() ? *root_parent_ : tree_.label(v);
  }

  LocalTree& tree_;
  ForbiddenDegree k_;
  std::optional<double> root_parent_;
  Limits limits_;
  std::vector<State> states_;
  std::size_t nesting_ = 0;
};

enum class TktStatus { certified, truncated };
const char* to_string(TktStatus s) noexcept;

struct TktOptions {
  std::size_t depth_cap = 60;
  std::size_t size_cap = 1'000'000;
  /// Generations of the root component to report.
  std::size_t max_generation = 60;
};

struct TktSample {
  TktStatus status = TktStatus::certified;
  /// Root component, vertex 0 is the root; edges keep their tree labels.
  LabeledMultigraph component;
  std::vector<std::uint32_t> generation;  // per component vertex
  std::vector<NodeId> tree_node;          // per component vertex
  std::vector<double> root_labels;        // labels of the root's edges, sorted
  bool frontier_open = false;             // component continues past max_generation
  std::size_t touched = 0;                // tree nodes sampled
};

/// Component of the root in the forbidden-degree transform of a fresh
/// Poisson(t) tree drawn from rng.
TktSample sample_tkt(double t, ForbiddenDegree k, RngStream& rng, const TktOptions& opt = {});

/// Same, on a caller-supplied tree (lets tests share the tree with an
/// eager evaluation).
TktSample sample_tkt(LocalTree& tree, ForbiddenDegree k, const TktOptions& opt = {});

/// Fates of the edges at node v of a fully expanded tree, decided on the
/// smallest ball B_R(v) whose longest propagation path from v is shorter
/// than R - 1. Returns (label, present at time t) pairs, or nothing when no
/// radius up to max_radius certifies.
std::optional<std::vector<std::pair<double, bool>>> certified_ball_fates(
    const LocalTree& tree, NodeId v, ForbiddenDegree k, std::size_t max_radius);

struct SurvivalOptions {
  std::size_t gen_cap = 50;
  std::size_t size_cap = 10'000;
  std::size_t depth_cap = 60;
  std::size_t touched_cap = 5'000'000;
  /// Once the component holds size_cap vertices, only this many frontier
  /// vertices are followed towards gen_cap.
  std::size_t frontier_cap = 64;
};

enum class SurvivalOutcome { extinct, survived, truncated };

/// One replica of the survival proxy: survived when the root component
/// reaches generation gen_cap and size_cap vertices.
SurvivalOutcome survival_replica(double t, ForbiddenDegree k, std::uint64_t seed,
                                 const SurvivalOptions& opt);

struct SurvivalEstimate {
  double a_hat = 0.0;
  std::size_t replicas = 0;
  std::size_t survived = 0;
  std::size_t truncated = 0;
  std::size_t gen_cap = 0;
  std::size_t size_cap = 0;
  double ci_halfwidth = 0.0;  // 95% normal approximation
  double se() const noexcept { return ci_halfwidth / 1.959963984540054; }
};

/// Fraction of surviving replicas among the non-truncated ones.
SurvivalEstimate estimate_survival(double t, ForbiddenDegree k, std::size_t replicas,
                                   RngStream& rng, const SurvivalOptions& opt = {},
                                   std::size_t workers = 1);

/// Generation sizes of the root component up to `generations`, following at
/// most frontier_cap vertices per generation (ratios stay unbiased).
struct GrowthTrace {
  std::vector<double> parents;   // thinned frontier size at generation g
  std::vector<double> children;  // their children in the component
  bool truncated = false;
};
GrowthTrace growth_trace(double t, ForbiddenDegree k, std::uint64_t seed, std::size_t generations,
                         std::size_t frontier_cap);

/// Growth rate of surviving components: ratio of summed generation sizes
/// over generations [burn_in, generations).
double growth_rate_mc(double t, ForbiddenDegree k, std::size_t replicas, RngStream& rng,
                      std::size_t generations = 30, std::size_t burn_in = 8,
                      std::size_t workers = 1);

}  // namespace fdg
