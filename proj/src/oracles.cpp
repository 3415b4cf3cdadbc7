#include "fdg/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace fdg::oracle {

namespace {

template <class Int>
double chi_square_impl(const std::vector<Int>& observed, const std::vector<double>& expected,
                       int fitted) {
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < observed.size(); ++i) {
    if (expected[i] <= 0.0) {
      if (observed[i] != 0) return 0.0;
      continue;
    }
    const double d = static_cast<double>(observed[i]) - expected[i];
    stat += d * d / expected[i];
    ++used;
  }
  const int dof = used - 1 - fitted;
  if (dof <= 0) return 1.0;
  boost::math::chi_squared dist(dof);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

}  // namespace

double chi_square_pvalue(const std::vector<long>& observed, const std::vector<double>& expected,
                         int fitted) {
  return chi_square_impl(observed, expected, fitted);
}

double chi_square_pvalue(const std::vector<int>& observed, const std::vector<double>& expected,
                         int fitted) {
  return chi_square_impl(observed, expected, fitted);
}

double chi_square_two_sample(const std::vector<long>& a, const std::vector<long>& b) {
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  double stat = 0.0;
  int used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double tot = static_cast<double>(a[i] + b[i]);
    if (tot == 0.0) continue;
    const double ea = tot * na / (na + nb);
    const double eb = tot * nb / (na + nb);
    stat += (a[i] - ea) * (a[i] - ea) / ea + (b[i] - eb) * (b[i] - eb) / eb;
    ++used;
  }
  if (used <= 1) return 1.0;
  boost::math::chi_squared dist(used - 1);
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double tv_distance(const std::vector<long>& a, const std::vector<long>& b) {
  const double na = std::accumulate(a.begin(), a.end(), 0.0);
  const double nb = std::accumulate(b.begin(), b.end(), 0.0);
  double d = 0.0;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const double pa = i < a.size() ? a[i] / na : 0.0;
    const double pb = i < b.size() ? b[i] / nb : 0.0;
    d += std::abs(pa - pb);
  }
  return 0.5 * d;
}

std::vector<std::size_t> closure_component_sizes(const LabeledMultigraph& g) {
  const std::size_t n = g.n_vertices();
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
  for (const auto& e : g.edges()) reach[e.u][e.v] = reach[e.v][e.u] = 1;
  for (std::size_t m = 0; m < n; ++m)
    for (std::size_t i = 0; i < n; ++i)
      if (reach[i][m])
        for (std::size_t j = 0; j < n; ++j)
          if (reach[m][j]) reach[i][j] = 1;
  std::vector<std::size_t> sizes;
  std::vector<char> done(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (done[i]) continue;
    std::size_t s = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (reach[i][j]) {
        done[j] = 1;
        ++s;
      }
    }
    sizes.push_back(s);
  }
  std::sort(sizes.begin(), sizes.end());
  return sizes;
}

LabeledMultigraph naive_replay(const LabeledMultigraph& g, int k) {
  std::vector<LabeledEdge> order(g.edges().begin(), g.edges().end());
  std::sort(order.begin(), order.end(),
            [](const LabeledEdge& a, const LabeledEdge& b) { return a.label < b.label; });
  std::vector<LabeledEdge> live;
  auto degree = [&](Vertex x) {
    int d = 0;
    for (const auto& e : live) d += (e.u == x) + (e.v == x);
    return d;
  };
  for (const auto& e : order) {
    live.push_back(e);
    if (k <= 0) continue;
    const bool su = degree(e.u) >= k;
    const bool sv = degree(e.v) >= k;
    std::erase_if(live, [&](const LabeledEdge& f) {
      return (su && (f.u == e.u || f.v == e.u)) || (sv && (f.u == e.v || f.v == e.v));
    });
  }
  LabeledMultigraph out(g.n_vertices());
  for (const auto& e : live) out.add_edge(e.u, e.v, e.label);
  return out;
}

namespace {

// Visits every self-avoiding spine from v of length <= l_max.
void for_each_spine(const LabeledMultigraph& g, Vertex v, std::size_t l_max,
                    const std::function<void(const std::vector<Vertex>&, const std::vector<EdgeId>&)>& f) {
  std::vector<Vertex> verts{v};
  std::vector<EdgeId> edges;
  std::vector<char> on(g.n_vertices(), 0);
  on[v] = 1;
  std::function<void()> rec = [&] {
    f(verts, edges);
    if (edges.size() == l_max) return;
    const Vertex x = verts.back();
    for (const EdgeId e : g.incident(x)) {
      const Vertex y = g.edge(e).other(x);
      if (on[y]) continue;
      on[y] = 1;
      verts.push_back(y);
      edges.push_back(e);
      rec();
      edges.pop_back();
      verts.pop_back();
      on[y] = 0;
    }
  };
  rec();
}

// Counts side-edge tuples for a fixed spine: all admissible ones, and the
// ones with decreasing labels.
std::pair<std::size_t, std::size_t> side_tuples(const LabeledMultigraph& g,
                                                const std::vector<Vertex>& verts,
                                                const std::vector<EdgeId>& edges) {
  const std::size_t l = edges.size();
  if (l <= 1) return {1, 1};
  std::size_t all = 0, decreasing = 0;
  std::vector<EdgeId> chosen;
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == l) {
      ++all;
      bool dec = true;
      for (std::size_t j = 1; j < chosen.size(); ++j) {
        dec = dec && g.edge(chosen[j]).label < g.edge(chosen[j - 1]).label;
      }
      decreasing += dec;
      return;
    }
    for (const EdgeId f : g.incident(verts[i])) {
      // Side edge i must differ from every spine edge e_{i'} with i' != i.
      bool clash = false;
      for (std::size_t j = 0; j < l; ++j) clash = clash || (j + 1 != i && edges[j] == f);
      if (clash) continue;
      chosen.push_back(f);
      rec(i + 1);
      chosen.pop_back();
    }
  };
  rec(1);
  return {all, decreasing};
}

}  // namespace

std::size_t brute_force_propagation(const LabeledMultigraph& g, Vertex v, std::size_t l_max) {
  std::size_t best = 0;
  for_each_spine(g, v, l_max, [&](const std::vector<Vertex>& verts, const std::vector<EdgeId>& edges) {
    if (edges.size() <= best) return;
    if (side_tuples(g, verts, edges).second > 0) best = edges.size();
  });
  return best;
}

std::pair<std::size_t, std::size_t> count_candidate_paths(const LabeledMultigraph& g, Vertex v,
                                                          std::size_t l) {
  std::size_t all = 0, decreasing = 0;
  for_each_spine(g, v, l, [&](const std::vector<Vertex>& verts, const std::vector<EdgeId>& edges) {
    if (edges.size() != l) return;
    const auto [a, d] = side_tuples(g, verts, edges);
    all += a;
    decreasing += d;
  });
  return {all, decreasing};
}

std::map<std::vector<std::pair<Vertex, Vertex>>, std::size_t> enumerate_pairings(
    const std::vector<std::size_t>& c) {
  std::vector<Vertex> half;
  for (std::size_t v = 0; v < c.size(); ++v) half.insert(half.end(), c[v], static_cast<Vertex>(v));
  std::map<std::vector<std::pair<Vertex, Vertex>>, std::size_t> out;
  std::vector<char> used(half.size(), 0);
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::function<void()> rec = [&] {
    std::size_t first = 0;
    while (first < half.size() && used[first]) ++first;
    if (first == half.size()) {
      auto key = edges;
      for (auto& e : key) e = {std::min(e.first, e.second), std::max(e.first, e.second)};
      std::sort(key.begin(), key.end());
      ++out[key];
      return;
    }
    used[first] = 1;
    for (std::size_t j = first + 1; j < half.size(); ++j) {
      if (used[j]) continue;
      used[j] = 1;
      edges.emplace_back(half[first], half[j]);
      rec();
      edges.pop_back();
      used[j] = 0;
    }
    used[first] = 0;
  };
  if (half.size() % 2 == 0) rec();
  return out;
}

double pi_incomplete_gamma(double t, int k) {
  if (t == 0.0) return 1.0;
  return boost::math::gamma_q(static_cast<double>(k - 1), t);
}

}  // namespace fdg::oracle
