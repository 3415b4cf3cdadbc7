#include "fdg/rng.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace fdg {

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_id)
    : seed_(seed), stream_id_(stream_id) {
  std::uint64_t z = hash_combine(seed, stream_id);
  for (auto& word : s_) {
    z += 0x9e3779b97f4a7c15ULL;
    word = mix64(z);
  }
  // xoshiro must not start from the all-zero state.
  if ((s_[0] | s_[1] | s_[2] | s_[3]) == 0) s_[0] = 1;
}

std::uint64_t RngStream::uniform_below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection of the biased low range.
  unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<unsigned __int128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double RngStream::exponential() noexcept {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return -std::log(u);
}

std::uint64_t poisson_draw(double lambda, RngStream& rng) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw std::invalid_argument("poisson_draw: lambda must be finite and >= 0");
  }
  if (lambda == 0.0) return 0;
  if (lambda < 12.0) {
    // Sequential inversion.
    double u = rng.uniform();
    double p = std::exp(-lambda);
    double cdf = p;
    std::uint64_t x = 0;
    while (u >= cdf) {
      ++x;
      p *= lambda / static_cast<double>(x);
      const double next = cdf + p;
      if (next == cdf) break;  // tail exhausted in double precision
      cdf = next;
    }
    return x;
  }
  std::poisson_distribution<std::uint64_t> dist(lambda);
  return dist(rng);
}

}  // namespace fdg
