#include "fdg/kernel.hpp"

#include <algorithm>
#include <cmath>

#include "fdg/parallel.hpp"
#include "fdg/rng.hpp"
#include "fdg/tkt.hpp"

namespace fdg {

namespace {

constexpr LazyPhi::Limits kEvalLimits{60, 2'000'000};

struct Tally {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;
  std::size_t truncated = 0;

  void add(double w) {
    if (w < 0.0) {
      ++truncated;
      return;
    }
    sum += w;
    sum_sq += w * w;
    ++n;
  }
  ProbEstimate estimate() const {
    ProbEstimate e;
    e.samples = n;
    e.truncated = truncated;
    if (n == 0) return e;
    const double dn = static_cast<double>(n);
    e.mean = sum / dn;
    if (n > 1) {
      const double var = std::max(0.0, (sum_sq - dn * e.mean * e.mean) / (dn - 1.0));
      e.se = std::sqrt(var / dn);
    }
    return e;
  }
};

std::uint64_t cell_key(std::size_t y_bin, const std::vector<std::uint16_t>& x_bins) {
  std::uint64_t h = hash_combine(mix64(y_bin), x_bins.size());
  for (const auto b : x_bins) h = hash_combine(h, b + 1u);
  return h;
}

// All nondecreasing tuples of length `len` over [0, bins).
void enumerate_multisets(std::size_t bins, std::size_t len, std::vector<std::uint16_t>& cur,
                         std::vector<std::vector<std::uint16_t>>& out) {
  if (cur.size() == len) {
    out.push_back(cur);
    return;
  }
  const std::size_t start = cur.empty() ? 0 : cur.back();
  for (std::size_t b = start; b < bins; ++b) {
    cur.push_back(static_cast<std::uint16_t>(b));
    enumerate_multisets(bins, len, cur, out);
    cur.pop_back();
  }
}

double multiset_weight(const std::vector<std::uint16_t>& x_bins, double width) {
  double w = std::pow(width, static_cast<double>(x_bins.size()));
  std::size_t run = 1;
  for (std::size_t i = 1; i <= x_bins.size(); ++i) {
    if (i < x_bins.size() && x_bins[i] == x_bins[i - 1]) {
      ++run;
    } else {
      w /= std::tgamma(static_cast<double>(run) + 1.0);
      run = 1;
    }
  }
  return w;
}

}  // namespace

double forced_edge_weight(double t, ForbiddenDegree k, std::optional<double> y,
                          const std::vector<double>& x, std::uint64_t tree_seed, double eps) {
  LocalTree tree(t, tree_seed, x);
  LazyPhi phi(tree, k, y, kEvalLimits);
  try {
    if (y && !phi.root_attached(t)) return 0.0;
    const auto alive = phi.alive_children(LocalTree::root(), t);
    std::size_t forced = 0;
    for (const NodeId c : alive) forced += tree.node(c).forced ? 1 : 0;
    const std::size_t extras = alive.size() - forced;
    if (forced < x.size()) return 0.0;
    if (eps == 0.0) return extras == 0 ? 1.0 : 0.0;
    return std::pow(1.0 - 2.0 * eps, static_cast<double>(x.size())) *
           std::pow(2.0 * eps, static_cast<double>(extras));
  } catch (const Truncated&) {
    return -1.0;
  }
}

ProbEstimate estimate_event_probability(double t, ForbiddenDegree k, std::optional<double> y,
                                        const std::vector<double>& x, std::size_t samples,
                                        std::uint64_t seed, double eps, std::size_t workers) {
  const auto w = parallel_map<double>(samples, workers, [&](std::size_t s) {
    RngStream r(seed, s);
    return forced_edge_weight(t, k, y, x, r(), eps);
  });
  Tally tally;
  for (const double v : w) tally.add(v);
  return tally.estimate();
}

ProbEstimate estimate_attachment(double t, ForbiddenDegree k, double y, std::size_t samples,
                                 std::uint64_t seed, std::size_t workers) {
  const auto w = parallel_map<double>(samples, workers, [&](std::size_t s) {
    RngStream r(seed, s);
    LocalTree tree(t, r());
    LazyPhi phi(tree, k, y, kEvalLimits);
    try {
      return phi.root_attached(t) ? 1.0 : 0.0;
    } catch (const Truncated&) {
      return -1.0;
    }
  });
  Tally tally;
  for (const double v : w) tally.add(v);
  return tally.estimate();
}

std::size_t OffspringKernel::bin_of(double x) const {
  if (!(x > 0.0)) return 0;
  const auto b = static_cast<std::size_t>(x / width());
  return std::min(b, bins - 1);
}

double OffspringKernel::implied_mass(std::size_t b) const {
  double s = 0.0;
  for (std::size_t i = row_begin[b]; i < row_begin[b + 1]; ++i) s += cells[i].weight * cells[i].f;
  return s;
}

OffspringKernel OffspringKernel::normalized() const {
  OffspringKernel out = *this;
  for (std::size_t b = 0; b < bins; ++b) out.m_hat[b] = implied_mass(b);
  return out;
}

OffspringKernel estimate_kernel(double t, int k, const KernelOptions& opt) {
  if (opt.bins < 1) throw std::invalid_argument("estimate_kernel: bins must be >= 1");
  if (k < 2) throw std::invalid_argument("estimate_kernel: k must be >= 2");
  if (!(t > 0.0)) throw std::invalid_argument("estimate_kernel: t must be > 0");
  const ForbiddenDegree kd = ForbiddenDegree::finite(k);
  OffspringKernel K;
  K.t = t;
  K.k = k;
  K.bins = opt.bins;
  K.samples_per_cell = opt.samples_per_cell;
  K.seed = opt.seed;
  K.eps = opt.eps;
  const double w = K.width();

  std::vector<std::vector<std::uint16_t>> tuples;
  std::vector<std::uint16_t> cur;
  for (int i = 0; i <= k - 2; ++i) enumerate_multisets(opt.bins, static_cast<std::size_t>(i), cur, tuples);
  K.row_begin.push_back(0);
  for (std::size_t b = 0; b < opt.bins; ++b) {
    for (const auto& tup : tuples) {
      KernelCell c;
      c.y_bin = static_cast<std::uint16_t>(b);
      c.x_bins = tup;
      c.weight = multiset_weight(tup, w);
      K.cells.push_back(std::move(c));
    }
    K.row_begin.push_back(K.cells.size());
  }

  // Draw s of a cell jitters y and the forced labels inside their bins.
  // The childless cell shares its streams with the m estimate of its row.
  auto draw = [&](std::size_t y_bin, const std::vector<std::uint16_t>& x_bins, std::size_t s,
                  double& y, std::vector<double>& x) {
    RngStream r(opt.seed, hash_combine(cell_key(y_bin, x_bins), s));
    y = (static_cast<double>(y_bin) + r.uniform()) * w;
    x.resize(x_bins.size());
    for (std::size_t j = 0; j < x_bins.size(); ++j) x[j] = (x_bins[j] + r.uniform()) * w;
    return r();
  };

  const auto estimates = parallel_map<ProbEstimate>(K.cells.size(), opt.workers, [&](std::size_t ci) {
    const KernelCell& c = K.cells[ci];
    Tally tally;
    double y = 0.0;
    std::vector<double> x;
    for (std::size_t s = 0; s < cell_samples(c.weight, w, opt.samples_per_cell); ++s) {
      const std::uint64_t tree_seed = draw(c.y_bin, c.x_bins, s, y, x);
      tally.add(forced_edge_weight(t, kd, y, x, tree_seed, opt.eps));
    }
    return tally.estimate();
  });
  for (std::size_t ci = 0; ci < K.cells.size(); ++ci) {
    K.cells[ci].f = estimates[ci].mean;
    K.cells[ci].f_se = estimates[ci].se;
    K.truncated += estimates[ci].truncated;
  }

  const std::vector<std::uint16_t> none;
  const auto m_est = parallel_map<ProbEstimate>(opt.bins, opt.workers, [&](std::size_t b) {
    Tally tally;
    double y = 0.0;
    std::vector<double> x;
    for (std::size_t s = 0; s < opt.m_samples; ++s) {
      const std::uint64_t tree_seed = draw(b, none, s, y, x);
      LocalTree tree(t, tree_seed);
      LazyPhi phi(tree, kd, y, kEvalLimits);
      try {
        tally.add(phi.root_attached(t) ? 1.0 : 0.0);
      } catch (const Truncated&) {
        tally.add(-1.0);
      }
    }
    return tally.estimate();
  });
  for (const auto& e : m_est) {
    K.m_hat.push_back(e.mean);
    K.m_se.push_back(e.se);
    K.truncated += e.truncated;
  }
  return K;
}

std::size_t cell_samples(double weight, double width, std::size_t samples_per_cell) {
  const double scale = std::max(1.0, weight / (width * width));
  return static_cast<std::size_t>(std::ceil(scale * static_cast<double>(samples_per_cell)));
}

std::vector<double> phi_apply(const OffspringKernel& kernel, const std::vector<double>& f) {
  if (f.size() != kernel.bins) throw std::invalid_argument("phi_apply: size mismatch");
  std::vector<double> out(kernel.bins, 0.0);
  for (std::size_t b = 0; b < kernel.bins; ++b) {
    double s = 0.0;
    for (std::size_t i = kernel.row_begin[b]; i < kernel.row_begin[b + 1]; ++i) {
      const auto& c = kernel.cells[i];
      double term = c.weight * kernel.g(c);
      for (const auto x : c.x_bins) term *= f[x];
      s += term;
    }
    out[b] = s;
  }
  return out;
}

std::vector<double> mean_operator(const OffspringKernel& kernel) {
  const std::size_t B = kernel.bins;
  std::vector<double> m(B * B, 0.0);
  for (std::size_t b = 0; b < B; ++b) {
    for (std::size_t i = kernel.row_begin[b]; i < kernel.row_begin[b + 1]; ++i) {
      const auto& c = kernel.cells[i];
      const double mass = c.weight * kernel.g(c);
      for (const auto x : c.x_bins) m[b * B + x] += mass;
    }
  }
  return m;
}

SpectralResult spectral_radius(const std::vector<double>& matrix, std::size_t n, double tol,
                               std::size_t max_iters) {
  if (matrix.size() != n * n || n == 0) throw std::invalid_argument("spectral_radius: bad matrix");
  std::vector<double> v(n, 1.0), next(n);
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iters; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      double s = v[i];  // shift by the identity
      for (std::size_t j = 0; j < n; ++j) s += matrix[i * n + j] * v[j];
      next[i] = s;
    }
    const double norm = *std::max_element(next.begin(), next.end());
    if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericFailure("spectral_radius: degenerate iterate");
    for (std::size_t i = 0; i < n; ++i) v[i] = next[i] / norm;
    if (std::abs(norm - lambda) <= tol * norm) return {norm - 1.0, v, it};
    lambda = norm;
  }
  throw NumericFailure("spectral_radius: power iteration did not converge");
}

double estimate_spectral_radius(const OffspringKernel& kernel) {
  return spectral_radius(mean_operator(kernel), kernel.bins, 1e-11).rho;
}

}  // namespace fdg
