#pragma once

#include <cstdint>
#include <initializer_list>

namespace evoke {

/// Counter-based splitmix64 generator. The stream depends only on the seed,
/// so identical seeds give identical sequences on every platform.
class Prng {
 public:
  explicit Prng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// Standard normal via Box-Muller; consumes two uniforms per call.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a base seed and a list of tags
/// (fold index, epoch, grid point, ...).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

}  // namespace evoke
