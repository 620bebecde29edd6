#pragma once

#include <cstdint>

#include "pgvba/image.hpp"
#include "pgvba/operators.hpp"

namespace pgvba {

/// Forward degradation: blur, Poisson shot noise, additive Gaussian noise.
struct DegradeSpec {
  BlurKernel kernel;
  double sigma2 = 0.0;  // Gaussian variance
  double x_plus = 1.0;  // intensity scale the input was rescaled to
  std::uint64_t seed = 0;

  void validate() const;
};

/// y_i = Poisson([H x]_i) + N(0, sigma^2), seeded deterministic
/// (per-row derived seeds). Requires x >= 0.
Image degrade(const Image& x, const DegradeSpec& spec);

/// Piecewise-constant synthetic test image (disks, bars, a ramp) with
/// values in [0, x_plus]. Deterministic.
Image synthetic_phantom(int width, int height, double x_plus = 1.0);

}  // namespace pgvba
