#pragma once

#include <cstdint>
#include <random>

namespace pgvba {

/// SplitMix64 finalizer; used both as a stand-alone hash and to spread
/// low-entropy seeds before feeding them to the generator.
std::uint64_t mix64(std::uint64_t x);

/// Combines a master seed with stream coordinates (iteration, index) into an
/// independent per-stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

/// Deterministic random stream. The uniform/normal/poisson algorithms are
/// pinned here rather than taken from std:: distributions so that a given
/// seed reproduces the same draws on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  /// Standard normal (Marsaglia polar method).
  double normal();

  /// Poisson with the given mean: sequential-search inversion for small
  /// means, transformed rejection (PTRS) above 30.
  long poisson(double mean);

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_ = false;
};

}  // namespace pgvba
