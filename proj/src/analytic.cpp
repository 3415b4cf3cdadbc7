#include "fdg/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace fdg {

namespace {

void check_tk(double t, int k, int k_min) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("t must be finite and >= 0");
  if (k < k_min) throw std::invalid_argument("forbidden degree too small");
}

double log_choose(int n, int r) {
  return std::lgamma(n + 1.0) - std::lgamma(r + 1.0) - std::lgamma(n - r + 1.0);
}

}  // namespace

double poisson_pmf(double t, int c) {
  if (c < 0) return 0.0;
  if (t == 0.0) return c == 0 ? 1.0 : 0.0;
  return std::exp(-t + c * std::log(t) - std::lgamma(c + 1.0));
}

double compute_pi(double t, int k) {
  check_tk(t, k, 2);
  KahanSum s;
  for (int i = 0; i <= k - 2; ++i) s.add(poisson_pmf(t, i));
  return std::min(1.0, s.value());
}

DegreeProfile compute_degree_profile(double t, int k) {
  check_tk(t, k, 2);
  DegreeProfile out;
  out.t = t;
  out.k = k;
  out.pi = compute_pi(t, k);
  out.p.assign(static_cast<std::size_t>(k), 0.0);
  const double pi = out.pi;
  const double log_pi = std::log(pi);
  const double log_rest = std::log1p(-pi);

  for (int i = 1; i <= k - 1; ++i) {
    KahanSum s;
    for (int c = i; c <= k - 1; ++c) {
      const double pmf = poisson_pmf(t, c);
      if (pmf == 0.0) continue;
      // pi^i (1 - pi)^{c - i}, with 0^0 = 1.
      double thin = log_choose(c, i) + i * log_pi;
      if (c > i) thin += (c - i) * log_rest;
      s.add(pmf * std::exp(thin));
    }
    out.p[i] = s.value();
  }
  KahanSum p0;
  // P(C >= k) as a regularised incomplete gamma function.
  p0.add(t == 0.0 ? 0.0 : boost::math::gamma_p(static_cast<double>(k), t));
  for (int c = 0; c <= k - 1; ++c) {
    const double pmf = poisson_pmf(t, c);
    p0.add(c == 0 ? pmf : pmf * std::exp(c * log_rest));
  }
  out.p[0] = p0.value();

  KahanSum q;
  for (int i = 0; i <= k - 1; ++i) q.add(static_cast<double>(i) * (i - 2) * out.p[i]);
  out.q_t = q.value();
  return out;
}

double threshold_lhs(double t, int k) {
  check_tk(t, k, 3);
  return t * compute_pi(t, k - 1);
}

std::pair<double, double> threshold_sup(int k, double t_max) {
  check_tk(t_max, k, 3);
  constexpr int kGrid = 4000;
  const double h = t_max / kGrid;
  int best = 0;
  double best_val = -1.0;
  for (int i = 0; i <= kGrid; ++i) {
    const double v = threshold_lhs(i * h, k);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  // Golden-section refinement on the bracketing grid cells.
  double a = std::max(0.0, (best - 1) * h);
  double b = std::min(t_max, (best + 1) * h);
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = threshold_lhs(c, k);
  double fd = threshold_lhs(d, k);
  while (b - a > 1e-12) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = threshold_lhs(c, k);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = threshold_lhs(d, k);
    }
  }
  const double arg = 0.5 * (a + b);
  return {arg, threshold_lhs(arg, k)};
}

std::optional<std::pair<double, double>> supercritical_interval(int k, double t_max) {
  const auto [arg, peak] = threshold_sup(k, t_max);
  if (!(peak > 1.0)) return std::nullopt;

  // f(lo) <= 1 < f(hi); shrink to the crossing.
  auto bisect = [k](double lo, double hi) {
    while (std::abs(hi - lo) > 1e-10) {
      const double mid = 0.5 * (lo + hi);
      if (threshold_lhs(mid, k) > 1.0) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  };
  // threshold_lhs(0) = 0, so a left crossing always exists.
  const double t_lo = bisect(0.0, arg);
  const double t_hi = threshold_lhs(t_max, k) > 1.0 ? t_max : bisect(t_max, arg);
  return std::make_pair(t_lo, t_hi);
}

LabeledMultigraph t_k_transform(const LabeledMultigraph& g, ForbiddenDegree k) {
  LabeledMultigraph out(g.n_vertices());
  for (const auto& e : g.edges()) {
    if (k.saturates(g.degree(e.u)) || k.saturates(g.degree(e.v))) continue;
    out.add_edge(e.u, e.v, e.label);
  }
  return out;
}

}  // namespace fdg
