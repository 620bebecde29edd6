#include "pgvba/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "pgvba/rng.hpp"

namespace pgvba {

void DegradeSpec::validate() const {
  kernel.validate();
  if (sigma2 < 0.0) throw std::invalid_argument("degrade: negative Gaussian variance");
  if (!(x_plus > 0.0)) throw std::invalid_argument("degrade: x_plus must be positive");
}

Image degrade(const Image& x, const DegradeSpec& spec) {
  spec.validate();
  validate(x);
  for (double v : x.data)
    if (v < 0.0) throw std::invalid_argument("degrade: negative Poisson intensity");

  const auto blur = make_blur(spec.kernel, x.width, x.height);
  auto hx = blur->apply(x.span());
  // FFT round-off can leave tiny negatives on a non-negative image.
  for (double& v : hx) v = std::max(v, 0.0);

  Image y(x.width, x.height);
  const double sigma = std::sqrt(spec.sigma2);
  for (int r = 0; r < x.height; ++r) {
    Rng rng(derive_seed(spec.seed, static_cast<std::uint64_t>(r)));
    for (int c = 0; c < x.width; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * x.width + c;
      double v = static_cast<double>(rng.poisson(hx[i]));
      if (sigma > 0.0) v += sigma * rng.normal();
      y.data[i] = v;
    }
  }
  return y;
}

Image synthetic_phantom(int width, int height, double x_plus) {
  if (!(x_plus > 0.0)) throw std::invalid_argument("phantom: x_plus must be positive");
  Image img(width, height, 0.08);
  const double mind = std::min(width, height);

  auto disk = [&](double cr, double cc, double radius, double value) {
    for (int r = 0; r < height; ++r)
      for (int c = 0; c < width; ++c) {
        const double dr = r - cr * height, dc = c - cc * width;
        if (dr * dr + dc * dc <= radius * radius) img.at(r, c) = value;
      }
  };

  disk(0.40, 0.35, 0.26 * mind, 0.60);
  disk(0.30, 0.70, 0.13 * mind, 1.00);
  disk(0.52, 0.62, 0.05 * mind, 0.30);

  // horizontal bar
  for (int r = static_cast<int>(0.62 * height); r < static_cast<int>(0.72 * height); ++r)
    for (int c = static_cast<int>(0.12 * width); c < static_cast<int>(0.88 * width); ++c)
      img.at(r, c) = 0.85;

  // intensity ramp along the bottom
  for (int r = static_cast<int>(0.80 * height); r < static_cast<int>(0.94 * height); ++r)
    for (int c = 0; c < width; ++c)
      img.at(r, c) = 0.10 + 0.75 * c / std::max(1, width - 1);

  for (double& v : img.data) v *= x_plus;
  return img;
}

}  // namespace pgvba
