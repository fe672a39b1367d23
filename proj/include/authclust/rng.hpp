#ifndef AUTHCLUST_RNG_HPP
#define AUTHCLUST_RNG_HPP

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace authclust {

// splitmix64 finalizer; maps any 64-bit value to a well-mixed one.
std::uint64_t mix64(std::uint64_t x);

// Derives an independent stream seed from a master seed plus a textual
// label and an index (e.g. problem id, method name, run number). Changing
// any component gives an unrelated stream.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label,
                          std::uint64_t index = 0);

// Deterministic random source. Distributions are implemented on top of the
// raw mt19937_64 word stream, so sequences do not depend on the standard
// library's (implementation-defined) distribution algorithms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform();
  // Uniform integer in [0, n). n must be > 0. Rejection-sampled, unbiased.
  std::uint64_t uniform_int(std::uint64_t n);
  // Standard normal (Marsaglia polar method).
  double normal();
  // Gamma(shape, scale), mean = shape * scale (Marsaglia-Tsang).
  double gamma(double shape, double scale);
  double beta(double a, double b);
  bool bernoulli(double p);
  // Dirichlet draw proportional to the given nonnegative weights.
  std::vector<double> dirichlet(const std::vector<double>& weights);
  // Index drawn from unnormalized nonnegative weights.
  std::size_t categorical(const std::vector<double>& weights);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace authclust

#endif
