#include <cmath>
#include <map>
#include <numeric>

#include "doctest.h"
#include "fdg/events.hpp"
#include "fdg/graph.hpp"
#include "fdg/rng.hpp"
#include "fdg/oracles.hpp"

using namespace fdg;

TEST_CASE("rng streams are reproducible and distinct") {
  RngStream a(42, 7), b(42, 7), c(42, 8);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
  CHECK(RngStream(1, 2).substream(3)() == RngStream(1, 2).substream(3)());
}

TEST_CASE("uniform_below stays in range and is roughly flat") {
  RngStream r(3);
  std::vector<int> hist(7, 0);
  for (int i = 0; i < 70000; ++i) {
    const auto x = r.uniform_below(7);
    REQUIRE(x < 7);
    ++hist[x];
  }
  std::vector<double> expected(7, 10000.0);
  CHECK(oracle::chi_square_pvalue(hist, expected) > 1e-3);
}

TEST_CASE("poisson_draw") {
  RngStream r(11);
  SUBCASE("lambda zero") {
    for (int i = 0; i < 100; ++i) CHECK(poisson_draw(0.0, r) == 0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(poisson_draw(-1.0, r), std::invalid_argument);
    CHECK_THROWS_AS(poisson_draw(std::nan(""), r), std::invalid_argument);
    CHECK_THROWS_AS(poisson_draw(INFINITY, r), std::invalid_argument);
  }
  SUBCASE("lambda 2: mean and zero mass") {
    const int n = 1'000'000;
    double sum = 0.0;
    int zeros = 0;
    for (int i = 0; i < n; ++i) {
      const auto x = poisson_draw(2.0, r);
      sum += static_cast<double>(x);
      zeros += x == 0;
    }
    const double se_mean = std::sqrt(2.0 / n);
    CHECK(std::abs(sum / n - 2.0) < 3 * se_mean);
    const double p0 = std::exp(-2.0);
    CHECK(p0 == doctest::Approx(0.13534).epsilon(1e-4));
    CHECK(std::abs(static_cast<double>(zeros) / n - p0) < 3 * std::sqrt(p0 * (1 - p0) / n));
  }
  SUBCASE("large lambda mean") {
    const int n = 200'000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += static_cast<double>(poisson_draw(40.0, r));
    CHECK(std::abs(sum / n - 40.0) < 3 * std::sqrt(40.0 / n));
  }
}

TEST_CASE("labeled multigraph invariants") {
  LabeledMultigraph g(4);
  CHECK_THROWS_AS(g.add_edge(1, 1, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(g.add_edge(0, 4, 0.5), std::invalid_argument);
  g.add_edge(0, 1, 0.1);
  g.add_edge(0, 1, 0.2);
  g.add_edge(1, 2, 0.3);
  CHECK(g.degree(0) == 2);
  CHECK(g.degree(1) == 3);
  CHECK(g.degree(3) == 0);
  CHECK(g.labels_distinct());
  g.add_edge(2, 3, 0.3);
  CHECK_FALSE(g.labels_distinct());
  const Vertex keep[] = {1, 2};
  const auto sub = g.induced(keep);
  CHECK(sub.n_vertices() == 2);
  CHECK(sub.n_edges() == 1);
}

TEST_CASE("forbidden degree parsing") {
  CHECK(ForbiddenDegree::parse("inf") == ForbiddenDegree::unbounded());
  CHECK(ForbiddenDegree::parse("5").value() == 5);
  CHECK_THROWS_AS(ForbiddenDegree::parse("1"), std::invalid_argument);
  CHECK_THROWS_AS(ForbiddenDegree::parse("5x"), std::invalid_argument);
  CHECK_FALSE(ForbiddenDegree::unbounded().saturates(1'000'000));
  CHECK(ForbiddenDegree::finite(3).saturates(3));
  CHECK_FALSE(ForbiddenDegree::finite(3).saturates(2));
}

TEST_CASE("sample_event_stream arguments and degenerate cases") {
  RngStream r(5);
  CHECK_THROWS_AS(sample_event_stream(1, 1.0, r), std::invalid_argument);
  CHECK_THROWS_AS(sample_event_stream(10, -0.5, r), std::invalid_argument);
  CHECK(sample_event_stream(2, 0.0, r).events.empty());
}

TEST_CASE("event streams are deterministic with strictly increasing times") {
  RngStream a(9, 1), b(9, 1);
  const auto s1 = sample_event_stream(50, 3.0, a);
  const auto s2 = sample_event_stream(50, 3.0, b);
  REQUIRE(s1.events.size() == s2.events.size());
  for (std::size_t i = 0; i < s1.events.size(); ++i) {
    CHECK(s1.events[i].time == s2.events[i].time);
    CHECK(s1.events[i].u == s2.events[i].u);
    CHECK(s1.events[i].v == s2.events[i].v);
    CHECK(s1.events[i].u != s1.events[i].v);
    if (i > 0) CHECK(s1.events[i].time > s1.events[i - 1].time);
    CHECK(s1.events[i].time <= 3.0);
  }
  CHECK(accumulate(s1).labels_distinct());
}

TEST_CASE("event count has Poisson mean t(n-1)/2") {
  RngStream r(17);
  const int reps = 10'000;
  double sum = 0.0;
  for (int i = 0; i < reps; ++i) {
    RngStream s = r.substream(i);
    sum += static_cast<double>(sample_event_stream(100, 2.0, s).events.size());
  }
  const double mean = 99.0;
  CHECK(std::abs(sum / reps - mean) < 3 * std::sqrt(mean / reps));
}

TEST_CASE("per-pair counts are Poisson(1/10) at n = 10, t = 1") {
  // Pool the 45 per-pair counts of each replica and compare their histogram
  // with Poisson(t/n) probabilities.
  RngStream r(23);
  const int reps = 100'000;
  std::vector<long> hist(4, 0);
  std::vector<long> pair_total(45, 0);
  for (int i = 0; i < reps; ++i) {
    RngStream s = r.substream(i);
    const auto st = sample_event_stream(10, 1.0, s);
    int counts[10][10] = {};
    for (const auto& e : st.events) ++counts[std::min(e.u, e.v)][std::max(e.u, e.v)];
    int idx = 0;
    for (int u = 0; u < 10; ++u) {
      for (int v = u + 1; v < 10; ++v, ++idx) {
        ++hist[std::min(counts[u][v], 3)];
        pair_total[idx] += counts[u][v];
      }
    }
  }
  const double lam = 0.1;
  const double total = 45.0 * reps;
  std::vector<double> expected = {total * std::exp(-lam), total * lam * std::exp(-lam),
                                  total * lam * lam / 2 * std::exp(-lam), 0.0};
  expected[3] = total - expected[0] - expected[1] - expected[2];
  CHECK(oracle::chi_square_pvalue(hist, expected) > 0.01);
  // Uniformity across pairs.
  std::vector<double> flat(45, static_cast<double>(std::accumulate(pair_total.begin(), pair_total.end(), 0L)) / 45.0);
  CHECK(oracle::chi_square_pvalue(pair_total, flat) > 0.01);
}

TEST_CASE("restriction to [0, s] matches a stream of horizon s") {
  // Two-sample comparison of event count and first arrival time.
  RngStream r(31);
  const int reps = 10'000;
  double count_long = 0, count_short = 0, first_long = 0, first_short = 0;
  int nonempty_long = 0, nonempty_short = 0;
  for (int i = 0; i < reps; ++i) {
    RngStream a = r.substream(2 * i), b = r.substream(2 * i + 1);
    const auto longer = sample_event_stream(20, 2.0, a);
    const auto shorter = sample_event_stream(20, 0.5, b);
    count_long += static_cast<double>(longer.count_until(0.5));
    count_short += static_cast<double>(shorter.events.size());
    if (longer.count_until(0.5) > 0) {
      first_long += longer.events[0].time;
      ++nonempty_long;
    }
    if (!shorter.events.empty()) {
      first_short += shorter.events[0].time;
      ++nonempty_short;
    }
  }
  const double lam = 0.5 * 19 / 2.0;
  CHECK(std::abs(count_long - count_short) / reps < 3 * std::sqrt(2 * lam / reps));
  // First arrival given one in [0, 0.5]: truncated exponential of rate 9.5, sd < 0.11.
  CHECK(std::abs(first_long / nonempty_long - first_short / nonempty_short) < 3 * 0.11 * std::sqrt(2.0 / reps));
}
