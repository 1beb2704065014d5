#pragma once

#include <cstdint>
#include <random>

namespace gfa {

// SplitMix64 finalizer; used to derive independent per-chain and
// per-replicate seeds from one user seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

// Explicit random-stream state. All sampling in the library goes through
// one of these, so results are reproducible given the seed.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  double normal() { return normal_(engine_); }
  double normal(double mean, double sd) { return mean + sd * normal_(engine_); }

  // Uniform on the open interval (0, 1).
  double uniform();

  bool bernoulli(double p) { return uniform() < p; }

  // Gamma with shape/rate parameterization. Shapes below one are drawn in
  // log space so tiny shapes (vague priors) do not underflow to zero; the
  // result is clamped to the smallest normal double.
  double gamma(double shape, double rate);
  double log_gamma_variate(double shape);

  // Beta via two gamma draws, clamped to the open unit interval.
  double beta(double a, double b);

  std::uint64_t next() { return engine_(); }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace gfa
