#pragma once

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "fdg/graph.hpp"

namespace fdg {

/// Compensated (Kahan-Babuska) accumulator.
class KahanSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) c_ += (sum_ - t) + x;
    else c_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const noexcept { return sum_ + c_; }

 private:
  double sum_ = 0.0;
  double c_ = 0.0;
};

/// Poisson(t) probability mass at c, through lgamma.
double poisson_pmf(double t, int c);

/// pi_k(t) = e^{-t} sum_{i=0}^{k-2} t^i / i!.  Requires t >= 0, k >= 2.
double compute_pi(double t, int k);

struct DegreeProfile {
  double t = 0.0;
  int k = 2;
  double pi = 1.0;
  std::vector<double> p;  // p[i] for 0 <= i <= k-1
  double q_t = 0.0;       // sum_i i (i - 2) p[i]
};

/// Limiting degree law of the lower-bound graph: C ~ Poisson(t), the
/// degree is Binomial(C, pi_k(t)) when C < k and 0 otherwise.
DegreeProfile compute_degree_profile(double t, int k);

/// t e^{-t} sum_{i=0}^{k-3} t^i / i!.  Throws std::invalid_argument for k < 3.
double threshold_lhs(double t, int k);

/// Location and value of the maximum of threshold_lhs(., k) on [0, t_max].
std::pair<double, double> threshold_sup(int k, double t_max = 50.0);

/// Maximal interval around the maximiser where threshold_lhs(., k) > 1,
/// endpoints bisected to 1e-9; none when the maximum does not exceed 1.
std::optional<std::pair<double, double>> supercritical_interval(int k, double t_max = 50.0);

/// Erases every edge incident to a vertex whose degree in g is >= k.
LabeledMultigraph t_k_transform(const LabeledMultigraph& g, ForbiddenDegree k);

}  // namespace fdg
