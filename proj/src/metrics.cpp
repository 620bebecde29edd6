#include "pgvba/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pgvba {

double snr_db(const Image& reference, const Image& estimate) {
  if (!reference.same_shape(estimate)) throw std::invalid_argument("snr: shape mismatch");
  const double ref_norm = norm(reference.span());
  if (ref_norm == 0.0) throw std::invalid_argument("snr: zero reference norm");
  double err2 = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference.data[i] - estimate.data[i];
    err2 += d * d;
  }
  if (err2 == 0.0) return std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(ref_norm / std::sqrt(err2));
}

namespace {

constexpr int kWindowRadius = 5;  // 11x11
constexpr double kWindowStd = 1.5;
constexpr double kK1 = 0.01;
constexpr double kK2 = 0.03;

std::vector<double> gaussian_window() {
  std::vector<double> w(2 * kWindowRadius + 1);
  double sum = 0.0;
  for (int i = -kWindowRadius; i <= kWindowRadius; ++i) {
    w[i + kWindowRadius] = std::exp(-(i * i) / (2.0 * kWindowStd * kWindowStd));
    sum += w[i + kWindowRadius];
  }
  for (double& v : w) v /= sum;
  return w;
}

// Symmetric (half-sample) reflection, bouncing for very small images.
int reflect(int i, int n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

// Separable Gaussian filtering with reflective borders.
std::vector<double> filter2(const std::vector<double>& x, int width, int height,
                            const std::vector<double>& w) {
  std::vector<double> tmp(x.size()), out(x.size());
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int k = -kWindowRadius; k <= kWindowRadius; ++k)
        acc += w[k + kWindowRadius] * x[static_cast<std::size_t>(r) * width + reflect(c + k, width)];
      tmp[static_cast<std::size_t>(r) * width + c] = acc;
    }
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      double acc = 0.0;
      for (int k = -kWindowRadius; k <= kWindowRadius; ++k)
        acc += w[k + kWindowRadius] * tmp[static_cast<std::size_t>(reflect(r + k, height)) * width + c];
      out[static_cast<std::size_t>(r) * width + c] = acc;
    }
  return out;
}

}  // namespace

double ssim(const Image& reference, const Image& estimate, double dynamic_range) {
  if (!reference.same_shape(estimate)) throw std::invalid_argument("ssim: shape mismatch");
  if (!(dynamic_range > 0.0)) throw std::invalid_argument("ssim: dynamic range must be positive");

  const int W = reference.width, H = reference.height;
  const auto win = gaussian_window();
  const double c1 = (kK1 * dynamic_range) * (kK1 * dynamic_range);
  const double c2 = (kK2 * dynamic_range) * (kK2 * dynamic_range);

  const auto& x = reference.data;
  const auto& y = estimate.data;
  std::vector<double> xx(x.size()), yy(x.size()), xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    xx[i] = x[i] * x[i];
    yy[i] = y[i] * y[i];
    xy[i] = x[i] * y[i];
  }
  const auto mu_x = filter2(x, W, H, win);
  const auto mu_y = filter2(y, W, H, win);
  const auto m_xx = filter2(xx, W, H, win);
  const auto m_yy = filter2(yy, W, H, win);
  const auto m_xy = filter2(xy, W, H, win);

  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double var_x = m_xx[i] - mu_x[i] * mu_x[i];
    const double var_y = m_yy[i] - mu_y[i] * mu_y[i];
    const double cov = m_xy[i] - mu_x[i] * mu_y[i];
    const double num = (2.0 * mu_x[i] * mu_y[i] + c1) * (2.0 * cov + c2);
    const double den = (mu_x[i] * mu_x[i] + mu_y[i] * mu_y[i] + c1) * (var_x + var_y + c2);
    total += num / den;
  }
  return total / static_cast<double>(x.size());
}

}  // namespace pgvba
