#include "gfa/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gfa {

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double RandomStream::uniform() {
  // 53 random bits, shifted off zero.
  const auto bits = engine_() >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double RandomStream::log_gamma_variate(double shape) {
  if (shape >= 1.0) {
    std::gamma_distribution<double> dist(shape, 1.0);
    double x = dist(engine_);
    return std::log(std::max(x, std::numeric_limits<double>::min()));
  }
  // Gamma(a) = Gamma(a + 1) * U^(1/a)
  std::gamma_distribution<double> dist(shape + 1.0, 1.0);
  const double g = dist(engine_);
  return std::log(g) + std::log(uniform()) / shape;
}

double RandomStream::gamma(double shape, double rate) {
  const double log_x = log_gamma_variate(shape) - std::log(rate);
  const double x = std::exp(log_x);
  return std::clamp(x, std::numeric_limits<double>::min(), std::numeric_limits<double>::max());
}

double RandomStream::beta(double a, double b) {
  const double la = log_gamma_variate(a);
  const double lb = log_gamma_variate(b);
  // a / (a + b) = 1 / (1 + exp(lb - la))
  const double x = 1.0 / (1.0 + std::exp(lb - la));
  constexpr double lo = std::numeric_limits<double>::min();
  constexpr double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
  return std::clamp(x, lo, hi);
}

}  // namespace gfa
