#include "pgvba/image.hpp"

#include <cmath>

namespace pgvba {

void validate(const Image& img) {
  if (img.width <= 0 || img.height <= 0)
    throw std::invalid_argument("Image: non-positive shape");
  if (img.data.size() != static_cast<std::size_t>(img.width) * img.height)
    throw std::invalid_argument("Image: data length does not match width*height");
  for (double v : img.data)
    if (!std::isfinite(v)) throw std::invalid_argument("Image: non-finite entry");
}

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return dot(a, a); }

double norm(std::span<const double> a) { return std::sqrt(norm2(a)); }

}  // namespace pgvba
