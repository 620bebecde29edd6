#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace pgvba {

/// Dense 2-D real-valued intensity grid, row-major.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<double> data;

  Image() = default;
  Image(int w, int h, double fill = 0.0)
      : width(w), height(h), data(static_cast<std::size_t>(w) * h, fill) {
    if (w <= 0 || h <= 0) throw std::invalid_argument("Image: non-positive shape");
  }

  std::size_t size() const { return data.size(); }

  double& at(int r, int c) { return data[static_cast<std::size_t>(r) * width + c]; }
  double at(int r, int c) const { return data[static_cast<std::size_t>(r) * width + c]; }

  std::span<double> span() { return data; }
  std::span<const double> span() const { return data; }

  bool same_shape(const Image& other) const {
    return width == other.width && height == other.height;
  }
};

/// Throws if any entry is non-finite or the buffer does not match the shape.
void validate(const Image& img);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);      // squared l2 norm
double norm(std::span<const double> a);

}  // namespace pgvba
