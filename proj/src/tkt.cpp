#include "fdg/tkt.hpp"

#include <algorithm>
#include <cmath>

#include "fdg/parallel.hpp"
#include "fdg/process.hpp"
#include "fdg/propagation.hpp"

namespace fdg {

const char* to_string(TktStatus s) noexcept {
  return s == TktStatus::certified ? "certified" : "truncated";
}

LazyPhi::LazyPhi(LocalTree& tree, ForbiddenDegree k, std::optional<double> root_parent_label)
    : LazyPhi(tree, k, root_parent_label, Limits{}) {}

LazyPhi::LazyPhi(LocalTree& tree, ForbiddenDegree k, std::optional<double> root_parent_label,
                 Limits limits)
    : tree_(tree), k_(k), root_parent_(root_parent_label), limits_(limits) {}

LazyPhi::State& LazyPhi::state(NodeId v) {
  if (v >= states_.size()) states_.resize(tree_.size());
  return states_[v];
}

void LazyPhi::resolve(NodeId v, double h) {
  if (std::isfinite(state(v).rho)) return;
  if (!tree_.expanded(v)) {
    tree_.expand(v);
    if (tree_.size() > limits_.size_cap) throw Truncated();
    states_.resize(tree_.size());
  }
  if (++nesting_ > limits_.depth_cap) {
    nesting_ = 0;
    throw Truncated();
  }
  const double inf = std::numeric_limits<double>::infinity();
  const std::uint32_t n_children = tree_.n_children(v);
  const bool with_parent = has_parent(v);
  const double plabel = with_parent ? parent_label(v) : inf;

  for (;;) {
    // states_ may reallocate during recursion; re-fetch each round.
    State* st = &states_[v];
    const double clabel =
        st->next_child < n_children ? tree_.label(tree_.child(v, st->next_child)) : inf;
    const double plab = (with_parent && !st->parent_done) ? plabel : inf;
    const double s = std::min(clabel, plab);
    if (!(s <= h)) break;

    // Children that lost their edge strictly before s.
    for (std::size_t i = 0; i < states_[v].s.size();) {
      const NodeId c = states_[v].s[i];
      resolve(c, s);
      auto& set = states_[v].s;
      if (states_[c].rho < s) {
        set[i] = set.back();
        set.pop_back();
      } else {
        ++i;
      }
    }
    st = &states_[v];
    const std::size_t degree = st->s.size() + (st->parent_in ? 1 : 0);

    if (s == plab) {
      st->parent_done = true;
      if (k_.saturates(degree + 1)) {
        st->rho = s;
        st->s.clear();
        break;
      }
      st->parent_in = true;
      continue;
    }

    const NodeId c = tree_.child(v, st->next_child);
    ++st->next_child;
    if (k_.saturates(degree + 1)) {
      st->s.clear();
      if (st->parent_in) {
        st->rho = s;
        break;
      }
      continue;
    }
    resolve(c, s);
    // The child may saturate on receiving this very edge.
    if (states_[c].rho == s) continue;
    states_[v].s.push_back(c);
  }
  --nesting_;
}

double LazyPhi::rho(NodeId v, double h) {
  resolve(v, h);
  const double r = states_[v].rho;
  return r <= h ? r : std::numeric_limits<double>::infinity();
}

std::vector<NodeId> LazyPhi::alive_children(NodeId v, double s) {
  resolve(v, s);
  std::vector<NodeId> out;
  if (states_[v].rho <= s) return out;
  const std::vector<NodeId> present = states_[v].s;
  for (const NodeId c : present) {
    resolve(c, s);
    if (!(states_[c].rho <= s)) out.push_back(c);
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool LazyPhi::root_attached(double s) {
  resolve(LocalTree::root(), s);
  return !(states_[LocalTree::root()].rho <= s);
}

TktSample sample_tkt(LocalTree& tree, ForbiddenDegree k, const TktOptions& opt) {
  TktSample out;
  LazyPhi phi(tree, k, std::nullopt, {opt.depth_cap, opt.size_cap});
  const double t = tree.horizon();
  std::vector<std::pair<std::uint32_t, double>> edges;  // (parent index, label)
  out.tree_node.push_back(LocalTree::root());
  out.generation.push_back(0);
  try {
    for (std::size_t head = 0; head < out.tree_node.size(); ++head) {
      const NodeId v = out.tree_node[head];
      const auto kids = phi.alive_children(v, t);
      if (out.generation[head] >= opt.max_generation) {
        if (!kids.empty()) out.frontier_open = true;
        continue;
      }
      for (const NodeId c : kids) {
        edges.emplace_back(static_cast<std::uint32_t>(head), tree.label(c));
        out.tree_node.push_back(c);
        out.generation.push_back(out.generation[head] + 1);
      }
    }
  } catch (const Truncated&) {
    out.status = TktStatus::truncated;
  }
  out.component = LabeledMultigraph(out.tree_node.size());
  for (std::size_t i = 0; i < edges.size(); ++i) {
    out.component.add_edge(edges[i].first, static_cast<Vertex>(i + 1), edges[i].second);
    if (edges[i].first == 0) out.root_labels.push_back(edges[i].second);
  }
  std::sort(out.root_labels.begin(), out.root_labels.end());
  out.touched = tree.size();
  return out;
}

TktSample sample_tkt(double t, ForbiddenDegree k, RngStream& rng, const TktOptions& opt) {
  LocalTree tree(t, rng());
  return sample_tkt(tree, k, opt);
}

std::optional<std::vector<std::pair<double, bool>>> certified_ball_fates(
    const LocalTree& tree, NodeId v, ForbiddenDegree k, std::size_t max_radius) {
  const LabeledMultigraph g = tree.to_graph();
  std::vector<std::uint32_t> dist(g.n_vertices(), std::numeric_limits<std::uint32_t>::max());
  for (std::size_t radius = 1; radius <= max_radius; ++radius) {
    std::fill(dist.begin(), dist.end(), std::numeric_limits<std::uint32_t>::max());
    std::vector<Vertex> ball{v};
    dist[v] = 0;
    for (std::size_t head = 0; head < ball.size(); ++head) {
      const Vertex x = ball[head];
      if (dist[x] == radius) continue;
      for (const EdgeId e : g.incident(x)) {
        const Vertex y = g.edge(e).other(x);
        if (dist[y] == std::numeric_limits<std::uint32_t>::max()) {
          dist[y] = dist[x] + 1;
          ball.push_back(y);
        }
      }
    }
    const LabeledMultigraph local = g.induced(ball);
    const std::size_t longest = find_propagation_paths(local, 0, radius);
    if (longest + 1 >= radius) continue;
    const LabeledMultigraph fate = phi_transform(local, k);
    std::vector<double> kept;
    for (const EdgeId e : fate.incident(0)) kept.push_back(fate.edge(e).label);
    std::vector<std::pair<double, bool>> out;
    for (const EdgeId e : local.incident(0)) {
      const double lab = local.edge(e).label;
      out.emplace_back(lab, std::find(kept.begin(), kept.end(), lab) != kept.end());
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  return std::nullopt;
}

namespace {

// Keeps a uniform random subset of `cap` frontier vertices.
void thin(std::vector<NodeId>& frontier, std::size_t cap, RngStream& rng) {
  if (frontier.size() <= cap) return;
  for (std::size_t i = 0; i < cap; ++i) {
    const std::size_t j = i + rng.uniform_below(frontier.size() - i);
    std::swap(frontier[i], frontier[j]);
  }
  frontier.resize(cap);
}

}  // namespace

SurvivalOutcome survival_replica(double t, ForbiddenDegree k, std::uint64_t seed,
                                 const SurvivalOptions& opt) {
  LocalTree tree(t, seed);
  LazyPhi phi(tree, k, std::nullopt, {opt.depth_cap, opt.touched_cap});
  RngStream thinning(seed, 0x7468696eULL);
  std::vector<NodeId> frontier{LocalTree::root()};
  std::vector<NodeId> next;
  std::size_t size = 1;
  std::size_t gen = 0;
  try {
    for (;;) {
      if (gen >= opt.gen_cap && size >= opt.size_cap) return SurvivalOutcome::survived;
      next.clear();
      for (const NodeId v : frontier) {
        const auto kids = phi.alive_children(v, t);
        next.insert(next.end(), kids.begin(), kids.end());
      }
      if (next.empty()) return SurvivalOutcome::extinct;
      size += next.size();
      ++gen;
      if (size >= opt.size_cap) thin(next, opt.frontier_cap, thinning);
      frontier.swap(next);
    }
  } catch (const Truncated&) {
    return SurvivalOutcome::truncated;
  }
}

SurvivalEstimate estimate_survival(double t, ForbiddenDegree k, std::size_t replicas,
                                   RngStream& rng, const SurvivalOptions& opt,
                                   std::size_t workers) {
  const RngStream base = rng.substream(rng());
  const auto outcomes = parallel_map<SurvivalOutcome>(replicas, workers, [&](std::size_t i) {
    return survival_replica(t, k, base.substream(i)(), opt);
  });
  SurvivalEstimate est;
  est.replicas = replicas;
  est.gen_cap = opt.gen_cap;
  est.size_cap = opt.size_cap;
  for (const auto o : outcomes) {
    if (o == SurvivalOutcome::survived) ++est.survived;
    if (o == SurvivalOutcome::truncated) ++est.truncated;
  }
  const std::size_t decided = replicas - est.truncated;
  if (decided > 0) {
    const double p = static_cast<double>(est.survived) / static_cast<double>(decided);
    est.a_hat = p;
    est.ci_halfwidth = 1.959963984540054 * std::sqrt(p * (1.0 - p) / static_cast<double>(decided));
  }
  return est;
}

GrowthTrace growth_trace(double t, ForbiddenDegree k, std::uint64_t seed, std::size_t generations,
                         std::size_t frontier_cap) {
  GrowthTrace out;
  LocalTree tree(t, seed);
  LazyPhi phi(tree, k, std::nullopt, {60, 20'000'000});
  RngStream thinning(seed, 0x67726f77ULL);
  std::vector<NodeId> frontier{LocalTree::root()};
  std::vector<NodeId> next;
  try {
    for (std::size_t g = 0; g < generations && !frontier.empty(); ++g) {
      thin(frontier, frontier_cap, thinning);
      next.clear();
      for (const NodeId v : frontier) {
        const auto kids = phi.alive_children(v, t);
        next.insert(next.end(), kids.begin(), kids.end());
      }
      out.parents.push_back(static_cast<double>(frontier.size()));
      out.children.push_back(static_cast<double>(next.size()));
      frontier.swap(next);
    }
  } catch (const Truncated&) {
    out.truncated = true;
  }
  return out;
}

double growth_rate_mc(double t, ForbiddenDegree k, std::size_t replicas, RngStream& rng,
                      std::size_t generations, std::size_t burn_in, std::size_t workers) {
  const RngStream base = rng.substream(rng());
  const auto traces = parallel_map<GrowthTrace>(replicas, workers, [&](std::size_t i) {
    return growth_trace(t, k, base.substream(i)(), generations, 256);
  });
  double parents = 0.0;
  double children = 0.0;
  for (const auto& tr : traces) {
    // Only components alive at the last generation count as surviving.
    if (tr.truncated || tr.children.size() < generations || tr.children.back() == 0.0) continue;
    for (std::size_t g = burn_in; g < generations; ++g) {
      parents += tr.parents[g];
      children += tr.children[g];
    }
  }
  return parents > 0.0 ? children / parents : 0.0;
}

}  // namespace fdg
