#include "fdg/extinction.hpp"

#include <algorithm>
#include <cmath>

#include "fdg/parallel.hpp"
#include "fdg/rng.hpp"
#include "fdg/tkt.hpp"

namespace fdg {

namespace {

double sup_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct Iterate {
  std::vector<double> q;
  std::size_t iterations = 0;
  bool monotone = true;
  bool converged = false;
};

// direction +1 expects non-decreasing iterates, -1 non-increasing.
Iterate iterate(const OffspringKernel& kernel, std::vector<double> q, int direction, double tol,
                std::size_t max_iters) {
  Iterate out;
  constexpr double kSlack = 1e-13;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    auto next = phi_apply(kernel, q);
    for (auto& x : next) x = std::clamp(x, 0.0, 1.0);
    for (std::size_t i = 0; i < q.size(); ++i) {
      if (direction * (next[i] - q[i]) < -kSlack) out.monotone = false;
    }
    const double delta = sup_diff(next, q);
    q.swap(next);
    out.iterations = it;
    if (delta < tol) {
      out.converged = true;
      break;
    }
  }
  out.q = std::move(q);
  return out;
}

}  // namespace

ExtinctionSolution solve_extinction(const OffspringKernel& raw, const ExtinctionOptions& opt) {
  const OffspringKernel kernel = raw.normalized();
  const std::size_t B = kernel.bins;
  ExtinctionSolution sol;
  SpectralResult spec;
  try {
    spec = spectral_radius(mean_operator(kernel), B, 1e-11);
  } catch (const NumericFailure&) {
    spec.rho = 0.0;
    spec.vector.assign(B, 1.0);
  }
  sol.rho_hat = spec.rho;
  sol.critical_window = std::abs(spec.rho - 1.0) < 0.05;

  // Inner iterations run to a tighter tolerance than the bracket gate.
  const double inner_tol = opt.tol * 1e-2;
  const auto below = iterate(kernel, phi_apply(kernel, std::vector<double>(B, 0.0)), +1,
                             inner_tol, opt.max_iters);

  // Start above the fixed point: 1 - delta v with v the Perron vector works
  // for small delta when rho > 1.
  std::vector<double> start(B, 1.0);
  if (spec.rho > 1.0) {
    for (double delta = 0.5; delta > 1e-9; delta *= 0.5) {
      std::vector<double> cand(B);
      for (std::size_t i = 0; i < B; ++i) cand[i] = 1.0 - delta * spec.vector[i];
      const auto img = phi_apply(kernel, cand);
      bool ok = true;
      for (std::size_t i = 0; i < B; ++i) ok = ok && img[i] <= cand[i];
      if (ok) {
        start = cand;
        break;
      }
    }
  }
  const auto above = iterate(kernel, start, -1, inner_tol, opt.max_iters);

  sol.q_lower = below.q;
  sol.q_upper = above.q;
  sol.lower_monotone = below.monotone;
  sol.upper_monotone = above.monotone;
  sol.iterations = below.iterations + above.iterations;
  sol.q.resize(B);
  for (std::size_t i = 0; i < B; ++i) sol.q[i] = 0.5 * (below.q[i] + above.q[i]);
  sol.residual = sup_diff(sol.q, phi_apply(kernel, sol.q));
  const bool agree = sup_diff(below.q, above.q) <= opt.tol;
  sol.status = (below.converged && above.converged && agree) ? SolveStatus::converged
                                                             : SolveStatus::diverged;

  // Root of the two-stage process: its offspring follow the surviving
  // root edges of the forbidden-degree tree.
  const ForbiddenDegree kd = ForbiddenDegree::finite(kernel.k);
  const RngStream base(opt.seed, 0x74776f73ULL);
  const auto prods = parallel_map<double>(opt.twostage_samples, opt.workers, [&](std::size_t s) {
    LocalTree tree(kernel.t, base.substream(s)());
    LazyPhi phi(tree, kd, std::nullopt, {60, 2'000'000});
    try {
      double p = 1.0;
      for (const NodeId c : phi.alive_children(LocalTree::root(), kernel.t)) {
        p *= sol.q[kernel.bin_of(tree.label(c))];
      }
      return p;
    } catch (const Truncated&) {
      return -1.0;
    }
  });
  double sum = 0.0, sum_sq = 0.0;
  std::size_t n = 0;
  for (const double p : prods) {
    if (p < 0.0) continue;
    sum += p;
    sum_sq += p * p;
    ++n;
  }
  if (n > 0) {
    const double dn = static_cast<double>(n);
    sol.q_twostage = sum / dn;
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - dn * sol.q_twostage * sol.q_twostage) / (dn - 1.0));
      sol.q_twostage_se = std::sqrt(var / dn);
    }
  }
  return sol;
}

}  // namespace fdg
