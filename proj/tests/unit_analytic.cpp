#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "fdg/analytic.hpp"
#include "fdg/configuration_model.hpp"
#include "fdg/events.hpp"
#include "fdg/oracles.hpp"

using namespace fdg;

namespace {

using Mult = std::vector<std::vector<int>>;

Mult multiplicities(const LabeledMultigraph& g) {
  Mult m(g.n_vertices(), std::vector<int>(g.n_vertices(), 0));
  for (const auto& e : g.edges()) {
    ++m[e.u][e.v];
    ++m[e.v][e.u];
  }
  return m;
}

int degree(const Mult& m, std::size_t v) {
  int d = 0;
  for (const int x : m[v]) d += x;
  return d;
}

// The three conditions characterising T_k(s) = g through r = s - g.
bool antecedent_conditions(const Mult& s, const Mult& g, int k) {
  const std::size_t n = s.size();
  Mult r(n, std::vector<int>(n, 0));
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) {
      r[u][v] = s[u][v] - g[u][v];
      if (r[u][v] < 0) return false;
    }
  for (std::size_t v = 0; v < n; ++v) {
    const int c = degree(g, v);
    if (c > 0 && degree(r, v) >= k - c) return false;
  }
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) {
      if (r[u][v] == 0) continue;
      const bool u_ok = degree(g, u) == 0 && degree(r, u) >= k;
      const bool v_ok = degree(g, v) == 0 && degree(r, v) >= k;
      if (!u_ok && !v_ok) return false;
    }
  return true;
}

using Canonical = std::vector<std::pair<Vertex, Vertex>>;

}  // namespace

TEST_CASE("compute_pi") {
  CHECK(compute_pi(0.0, 2) == 1.0);
  CHECK(compute_pi(0.0, 7) == 1.0);
  CHECK(compute_pi(2.0, 5) == doctest::Approx(std::exp(-2.0) * (1 + 2 + 2 + 4.0 / 3)).epsilon(1e-14));
  CHECK(compute_pi(2.0, 5) == doctest::Approx(0.857123).epsilon(1e-6));
  CHECK(compute_pi(2.0, 2) == doctest::Approx(std::exp(-2.0)).epsilon(1e-14));
  for (int k = 2; k <= 12; ++k)
    for (const double t : {0.01, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 300.0, 700.0}) {
      const double got = compute_pi(t, k);
      REQUIRE(std::isfinite(got));
      CHECK(got == doctest::Approx(oracle::pi_incomplete_gamma(t, k)).epsilon(1e-12));
    }
}

TEST_CASE("degree profile") {
  SUBCASE("t = 0") {
    const auto p = compute_degree_profile(0.0, 5);
    CHECK(p.p[0] == 1.0);
    for (int i = 1; i < 5; ++i) CHECK(p.p[i] == 0.0);
    CHECK(p.q_t == 0.0);
  }
  SUBCASE("sums to one and nonnegative") {
    for (int k = 2; k <= 10; ++k)
      for (int j = 0; j <= 100; ++j) {
        const auto p = compute_degree_profile(0.1 * j, k);
        double s = 0.0;
        for (const double x : p.p) {
          CHECK(x >= 0.0);
          s += x;
        }
        CHECK(std::abs(s - 1.0) <= 1e-12);
      }
  }
  SUBCASE("matches the thinning algorithm") {
    const double t = 2.0;
    const int k = 5;
    const auto prof = compute_degree_profile(t, k);
    RngStream r(123);
    const int draws = 1'000'000;
    std::vector<long> hist(k, 0);
    for (int i = 0; i < draws; ++i) {
      const auto c = poisson_draw(t, r);
      std::uint64_t y = 0;
      for (std::uint64_t j = 0; j < c; ++j) y += r.uniform() < prof.pi;
      ++hist[c < static_cast<std::uint64_t>(k) ? y : 0];
    }
    for (int i = 0; i < k; ++i) {
      const double f = static_cast<double>(hist[i]) / draws;
      CHECK(std::abs(f - prof.p[i]) <= 3 * std::sqrt(prof.p[i] * (1 - prof.p[i]) / draws));
    }
  }
  SUBCASE("identity E[C 1{C<k}] = t pi and sign equivalence") {
    for (int k = 3; k <= 8; ++k)
      for (int j = 1; j <= 50; ++j) {
        const double t = 0.1 * j;
        double e = 0.0;
        for (int c = 0; c < k; ++c) e += c * poisson_pmf(t, c);
        CHECK(std::abs(e - t * compute_pi(t, k)) <= 1e-10);
        const double lhs = threshold_lhs(t, k);
        if (std::abs(lhs - 1.0) > 1e-9) CHECK((lhs > 1.0) == (compute_degree_profile(t, k).q_t > 0.0));
      }
    CHECK(compute_degree_profile(2.0, 5).q_t > 0.0);
  }
}

TEST_CASE("threshold function") {
  CHECK(threshold_lhs(2.0, 5) == doctest::Approx(10 * std::exp(-2.0)).epsilon(1e-14));
  CHECK(threshold_lhs(2.0, 5) > 1.0);
  CHECK(threshold_lhs(0.0, 6) == 0.0);
  CHECK_THROWS_AS(threshold_lhs(1.0, 2), std::invalid_argument);
  const auto [arg, sup] = threshold_sup(4);
  CHECK(sup == doctest::Approx(0.84003).epsilon(1e-4));
  CHECK(sup < 1.0);
  CHECK(arg == doctest::Approx((1 + std::sqrt(5.0)) / 2).epsilon(1e-6));
}

TEST_CASE("supercritical interval") {
  CHECK_FALSE(supercritical_interval(3).has_value());
  CHECK_FALSE(supercritical_interval(4).has_value());
  const auto iv = supercritical_interval(5);
  REQUIRE(iv.has_value());
  CHECK(iv->first < 2.0);
  CHECK(iv->second > 2.0);
  CHECK(std::abs(threshold_lhs(iv->first, 5) - 1.0) <= 1e-8);
  CHECK(std::abs(threshold_lhs(iv->second, 5) - 1.0) <= 1e-8);
  CHECK(iv->first == doctest::Approx(1.1141).epsilon(1e-3));
  // Larger k widens the interval.
  const auto iv6 = supercritical_interval(6);
  REQUIRE(iv6.has_value());
  CHECK(iv6->first < iv->first);
  CHECK(iv6->second > iv->second);
}

TEST_CASE("t_k_transform") {
  SUBCASE("identity below the threshold") {
    LabeledMultigraph g(4);
    g.add_edge(0, 1, 0.1);
    g.add_edge(1, 2, 0.2);
    g.add_edge(2, 3, 0.3);
    CHECK(t_k_transform(g, ForbiddenDegree::finite(3)).sorted_labels() == g.sorted_labels());
    CHECK(t_k_transform(g, ForbiddenDegree::unbounded()).n_edges() == 3);
  }
  SUBCASE("star with k edges") {
    LabeledMultigraph star(5);
    for (Vertex v = 1; v < 5; ++v) star.add_edge(0, v, 0.1 * v);
    CHECK(t_k_transform(star, ForbiddenDegree::finite(4)).n_edges() == 0);
    CHECK(t_k_transform(star, ForbiddenDegree::finite(5)).n_edges() == 4);
  }
  SUBCASE("chronology free") {
    LabeledMultigraph a(3), b(3);
    a.add_edge(0, 1, 0.1);
    a.add_edge(1, 2, 0.2);
    b.add_edge(0, 1, 0.9);
    b.add_edge(1, 2, 0.3);
    CHECK(t_k_transform(a, ForbiddenDegree::finite(2)).n_edges() == t_k_transform(b, ForbiddenDegree::finite(2)).n_edges());
  }
  SUBCASE("antecedent characterisation on small graphs") {
    RngStream r(41);
    int matched = 0;
    for (int i = 0; i < 10'000; ++i) {
      const std::size_t n = 2 + r.uniform_below(7);
      const int k = 2 + static_cast<int>(r.uniform_below(3));
      LabeledMultigraph s(n);
      const auto m = r.uniform_below(3 * n);
      for (std::size_t j = 0; j < m; ++j) {
        const auto [u, v] = uniform_pair(n, r);
        s.add_edge(u, v, r.uniform());
      }
      const auto image = t_k_transform(s, ForbiddenDegree::finite(k));
      // Candidate g: the true image half the time, a random sub-multigraph otherwise.
      LabeledMultigraph g(n);
      if (i % 2 == 0) {
        g = image;
      } else {
        for (const auto& e : s.edges())
          if (r.uniform() < 0.5) g.add_edge(e.u, e.v, e.label);
      }
      const bool truth = multiplicities(image) == multiplicities(g);
      matched += truth;
      REQUIRE(antecedent_conditions(multiplicities(s), multiplicities(g), k) == truth);
    }
    CHECK(matched >= 5000);
  }
}

TEST_CASE("configuration model") {
  RngStream r(8);
  SUBCASE("all zeros") {
    CHECK(sample_configuration_model(DegreeSequence({0, 0, 0}), r).edges.empty());
    const auto s = sample_loopless_configuration(DegreeSequence({0, 0}), r);
    CHECK(s.graph.edges.empty());
    CHECK(s.attempts == 1);
  }
  SUBCASE("single edge") {
    for (int i = 0; i < 100; ++i) {
      const auto g = sample_configuration_model(DegreeSequence({1, 1}), r);
      REQUIRE(g.canonical() == Canonical{{0, 1}});
    }
  }
  SUBCASE("odd degree sum") {
    CHECK_THROWS_AS(sample_configuration_model(DegreeSequence({1, 1, 1}), r), std::invalid_argument);
    CHECK_THROWS_AS(sample_loopless_configuration(DegreeSequence({2, 1}), r), std::invalid_argument);
  }
  SUBCASE("retry exhaustion") {
    try {
      sample_loopless_configuration(DegreeSequence({2}), r, 10);
      FAIL("expected RetryExhausted");
    } catch (const RetryExhausted& e) {
      CHECK(e.attempts() == 10);
    }
  }
  SUBCASE("degree sequence helpers") {
    LabeledMultigraph g(4);
    g.add_edge(0, 1, 0.1);
    g.add_edge(0, 1, 0.2);
    g.add_edge(1, 2, 0.3);
    const auto d = DegreeSequence::of(g);
    CHECK(d.c == std::vector<std::size_t>{2, 3, 1, 0});
    CHECK(d.total() == 6);
    CHECK(d.histogram() == std::vector<std::size_t>{1, 1, 1, 1});
  }
  SUBCASE("(2,1,1) against the three pairings") {
    const auto law = oracle::enumerate_pairings({2, 1, 1});
    REQUIRE(law.size() == 2);
    const Canonical loop{{0, 0}, {1, 2}};
    const Canonical path{{0, 1}, {0, 2}};
    CHECK(law.at(loop) == 1);
    CHECK(law.at(path) == 2);
    const int draws = 100'000;
    std::vector<long> obs(2, 0);
    for (int i = 0; i < draws; ++i) {
      const auto key = sample_configuration_model(DegreeSequence({2, 1, 1}), r).canonical();
      REQUIRE((key == loop || key == path));
      ++obs[key == path];
    }
    CHECK(oracle::chi_square_pvalue(obs, {draws / 3.0, 2.0 * draws / 3.0}) > 0.01);
  }
  SUBCASE("(2,1,1) loopless") {
    // Both loopless pairings give the same multigraph 1-0-2.
    const int draws = 100'000;
    long path = 0;
    for (int i = 0; i < draws; ++i) {
      const auto s = sample_loopless_configuration(DegreeSequence({2, 1, 1}), r);
      REQUIRE_FALSE(s.graph.has_loop());
      path += s.graph.canonical() == Canonical{{0, 1}, {0, 2}};
    }
    CHECK(path == draws);
  }
  SUBCASE("(2,2,2) loopless against enumeration") {
    auto law = oracle::enumerate_pairings({2, 2, 2});
    std::erase_if(law, [](const auto& kv) {
      return std::any_of(kv.first.begin(), kv.first.end(), [](const auto& e) { return e.first == e.second; });
    });
    REQUIRE(law.size() == 1);  // the triangle only
    const auto s = sample_loopless_configuration(DegreeSequence({2, 2, 2}), r);
    CHECK(s.graph.canonical() == law.begin()->first);
  }
  SUBCASE("(2,2,1,1) loopless pairings equally likely") {
    // Loopless pairings of (2,2,1,1): each of the 8 is equally likely, so
    // multigraphs are weighted by their pairing count.
    auto law = oracle::enumerate_pairings({2, 2, 1, 1});
    std::erase_if(law, [](const auto& kv) {
      return std::any_of(kv.first.begin(), kv.first.end(), [](const auto& e) { return e.first == e.second; });
    });
    double total = 0.0;
    for (const auto& [key, cnt] : law) total += static_cast<double>(cnt);
    std::map<Canonical, long> seen;
    const int draws = 100'000;
    for (int i = 0; i < draws; ++i) ++seen[sample_loopless_configuration(DegreeSequence({2, 2, 1, 1}), r).graph.canonical()];
    std::vector<long> obs;
    std::vector<double> expected;
    for (const auto& [key, cnt] : law) {
      obs.push_back(seen[key]);
      expected.push_back(draws * static_cast<double>(cnt) / total);
    }
    CHECK(seen.size() == law.size());
    CHECK(oracle::chi_square_pvalue(obs, expected) > 0.01);
  }
}

TEST_CASE("lower-bound graph given its degrees is a loopless configuration model") {
  // n = 6, k = 3, t = 1: frequencies within each degree sequence against the
  // enumerated loopless pairing law, and paired against the sampler.
  const std::size_t n = 6;
  RngStream r(2718);
  std::map<std::vector<std::size_t>, std::map<Canonical, long>> by_seq;
  const int samples = 100'000;
  for (int i = 0; i < samples; ++i) {
    const auto g = t_k_transform(accumulate(sample_event_stream(n, 1.0, r)), ForbiddenDegree::finite(3));
    Multigraph m{n, {}};
    for (const auto& e : g.edges()) m.edges.emplace_back(e.u, e.v);
    ++by_seq[DegreeSequence::of(g).c][m.canonical()];
  }
  int tested = 0;
  for (const auto& [c, seen] : by_seq) {
    long count = 0;
    for (const auto& [key, cnt] : seen) count += cnt;
    auto law = oracle::enumerate_pairings(c);
    std::erase_if(law, [](const auto& kv) {
      return std::any_of(kv.first.begin(), kv.first.end(), [](const auto& e) { return e.first == e.second; });
    });
    if (law.size() < 2 || count < 200) continue;
    ++tested;
    std::map<Canonical, long> paired;
    for (long i = 0; i < count; ++i) ++paired[sample_loopless_configuration(DegreeSequence(c), r).graph.canonical()];
    std::vector<long> a, b;
    for (const auto& [key, cnt] : law) {
      REQUIRE(cnt > 0);
      a.push_back(seen.count(key) ? seen.at(key) : 0);
      b.push_back(paired.count(key) ? paired.at(key) : 0);
    }
    for (const auto& [key, cnt] : seen) REQUIRE(law.count(key) == 1);
    CHECK(oracle::chi_square_two_sample(a, b) > 0.001);
  }
  CHECK(tested >= 3);
}
