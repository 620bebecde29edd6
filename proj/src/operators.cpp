#include "pgvba/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <utility>

namespace pgvba {

// ---------------------------------------------------------------------------
// Kernels

BlurKernel BlurKernel::delta() { return BlurKernel{1, 1, {1.0}}; }

BlurKernel BlurKernel::uniform(int size) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("uniform kernel: size must be odd and positive");
  BlurKernel k;
  k.width = k.height = size;
  k.taps.assign(static_cast<std::size_t>(size) * size,
                1.0 / (static_cast<double>(size) * size));
  return k;
}

BlurKernel BlurKernel::gaussian(int size, double std_dev) {
  if (size < 1 || size % 2 == 0)
    throw std::invalid_argument("gaussian kernel: size must be odd and positive");
  if (!(std_dev > 0.0)) throw std::invalid_argument("gaussian kernel: std must be positive");
  BlurKernel k;
  k.width = k.height = size;
  k.taps.resize(static_cast<std::size_t>(size) * size);
  const int r = size / 2;
  double sum = 0.0;
  for (int i = 0; i < size; ++i)
    for (int j = 0; j < size; ++j) {
      const double dr = i - r, dc = j - r;
      const double v = std::exp(-(dr * dr + dc * dc) / (2.0 * std_dev * std_dev));
      k.taps[static_cast<std::size_t>(i) * size + j] = v;
      sum += v;
    }
  for (double& t : k.taps) t /= sum;
  return k;
}

void BlurKernel::validate() const {
  if (width < 1 || height < 1 || width % 2 == 0 || height % 2 == 0)
    throw std::invalid_argument("kernel: side lengths must be odd and positive");
  if (taps.size() != static_cast<std::size_t>(width) * height)
    throw std::invalid_argument("kernel: tap count does not match shape");
  double sum = 0.0;
  for (double t : taps) {
    if (t < 0.0) throw std::invalid_argument("kernel: negative tap");
    sum += t;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("kernel: taps must sum to 1");
}

BlurKernel parse_kernel(const std::string& spec) {
  std::stringstream ss(spec);
  std::string kind;
  if (!std::getline(ss, kind, ':')) throw std::invalid_argument("kernel spec: empty");
  if (kind == "uniform") {
    int size = 0;
    char sep = 0;
    if (!(ss >> size) || ss >> sep)
      throw std::invalid_argument("kernel spec: expected uniform:<size>");
    return BlurKernel::uniform(size);
  }
  if (kind == "gaussian") {
    std::string size_s, std_s;
    if (!std::getline(ss, size_s, ':') || !std::getline(ss, std_s))
      throw std::invalid_argument("kernel spec: expected gaussian:<size>:<std>");
    return BlurKernel::gaussian(std::stoi(size_s), std::stod(std_s));
  }
  throw std::invalid_argument("kernel spec: unknown kind '" + kind + "'");
}

// ---------------------------------------------------------------------------
// Identity

void IdentityOperator::apply(std::span<const double> x, std::span<double> out) const {
  std::copy(x.begin(), x.end(), out.begin());
}
void IdentityOperator::apply_adjoint(std::span<const double> u, std::span<double> out) const {
  std::copy(u.begin(), u.end(), out.begin());
}
std::vector<double> IdentityOperator::normal_diag(std::span<const double> w) const {
  return std::vector<double>(w.begin(), w.end());
}

// ---------------------------------------------------------------------------
// FFT-backed circular convolution

namespace {

class FftPlan {
 public:
  FftPlan(int width, int height) : width_(width), height_(height) {
    const std::size_t n_real = static_cast<std::size_t>(width) * height;
    const std::size_t n_cplx = static_cast<std::size_t>(height) * (width / 2 + 1);
    std::vector<double> real_buf(n_real);
    std::vector<std::complex<double>> cplx_buf(n_cplx);
    // Plans are built once with FFTW_UNALIGNED so the new-array execute
    // functions accept ordinary vectors; execution is reentrant.
    fwd_ = fftw_plan_dft_r2c_2d(height, width, real_buf.data(),
                                reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                FFTW_ESTIMATE | FFTW_UNALIGNED);
    inv_ = fftw_plan_dft_c2r_2d(height, width,
                                reinterpret_cast<fftw_complex*>(cplx_buf.data()),
                                real_buf.data(), FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd_ || !inv_) throw std::runtime_error("fftw plan creation failed");
  }
  ~FftPlan() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(inv_);
  }
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  std::size_t spectrum_size() const {
    return static_cast<std::size_t>(height_) * (width_ / 2 + 1);
  }

  std::vector<std::complex<double>> forward(std::span<const double> x) const {
    std::vector<double> in(x.begin(), x.end());
    std::vector<std::complex<double>> out(spectrum_size());
    fftw_execute_dft_r2c(fwd_, in.data(), reinterpret_cast<fftw_complex*>(out.data()));
    return out;
  }

  void inverse(std::vector<std::complex<double>> spec, std::span<double> out) const {
    fftw_execute_dft_c2r(inv_, reinterpret_cast<fftw_complex*>(spec.data()), out.data());
    const double scale = 1.0 / (static_cast<double>(width_) * height_);
    for (double& v : out) v *= scale;
  }

 private:
  int width_, height_;
  fftw_plan fwd_;
  fftw_plan inv_;
};

class BlurOperator final : public LinearOperator {
 public:
  BlurOperator(const BlurKernel& kernel, int width, int height)
      : width_(width), height_(height), plan_(width, height) {
    kernel.validate();
    if (width <= 0 || height <= 0) throw std::invalid_argument("blur: non-positive shape");
    if (kernel.width > width || kernel.height > height)
      throw std::invalid_argument("blur: kernel larger than image");
    transfer_ = plan_.forward(embed(kernel, /*square=*/false));
    transfer_sq_ = plan_.forward(embed(kernel, /*square=*/true));
  }

  std::size_t in_dim() const override { return n(); }
  std::size_t out_dim() const override { return n(); }

  void apply(std::span<const double> x, std::span<double> out) const override {
    convolve(x, out, /*conjugate=*/false);
  }
  void apply_adjoint(std::span<const double> u, std::span<double> out) const override {
    convolve(u, out, /*conjugate=*/true);
  }

  // diag(H^T Diag(w) H)_n = sum_o h(o)^2 w_{n+o}: correlation of w with the
  // squared taps.
  std::vector<double> normal_diag(std::span<const double> w) const override {
    std::vector<double> out(n());
    auto spec = plan_.forward(w);
    for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= std::conj(transfer_sq_[i]);
    plan_.inverse(std::move(spec), out);
    return out;
  }

 private:
  std::size_t n() const { return static_cast<std::size_t>(width_) * height_; }

  // Embeds kernel taps at their circular offsets from the anchor.
  std::vector<double> embed(const BlurKernel& kernel, bool square) const {
    std::vector<double> grid(n(), 0.0);
    const int ar = kernel.height / 2, ac = kernel.width / 2;
    for (int i = 0; i < kernel.height; ++i)
      for (int j = 0; j < kernel.width; ++j) {
        const double t = kernel.taps[static_cast<std::size_t>(i) * kernel.width + j];
        const int r = ((i - ar) % height_ + height_) % height_;
        const int c = ((j - ac) % width_ + width_) % width_;
        grid[static_cast<std::size_t>(r) * width_ + c] += square ? t * t : t;
      }
    return grid;
  }

  void convolve(std::span<const double> x, std::span<double> out, bool conjugate) const {
    auto spec = plan_.forward(x);
    for (std::size_t i = 0; i < spec.size(); ++i)
      spec[i] *= conjugate ? std::conj(transfer_[i]) : transfer_[i];
    plan_.inverse(std::move(spec), out);
  }

  int width_, height_;
  FftPlan plan_;
  std::vector<std::complex<double>> transfer_;
  std::vector<std::complex<double>> transfer_sq_;
};

}  // namespace

std::unique_ptr<LinearOperator> make_blur(const BlurKernel& kernel, int width, int height) {
  return std::make_unique<BlurOperator>(kernel, width, height);
}

// ---------------------------------------------------------------------------
// Analysis operators

void AnalysisOperator::block_sq_norms(std::span<const double> x, std::span<double> out) const {
  const std::size_t S = block_size();
  std::vector<double> stacked(out_dim());
  apply(x, stacked);
  for (std::size_t j = 0; j < block_count(); ++j) {
    double s = 0.0;
    for (std::size_t k = 0; k < S; ++k) s += stacked[j * S + k] * stacked[j * S + k];
    out[j] = s;
  }
}

namespace {

struct StencilTap {
  int dr = 0, dc = 0;
  double coeff = 0.0;
};
using StencilRow = std::vector<StencilTap>;

// Wraps offsets into [0, h) x [0, w) and merges taps that land on the same
// pixel; required for exact squared-coefficient accumulation on small grids.
StencilRow canonicalize(const StencilRow& row, int width, int height) {
  std::map<std::pair<int, int>, double> merged;
  for (const auto& t : row) {
    const int r = ((t.dr % height) + height) % height;
    const int c = ((t.dc % width) + width) % width;
    merged[{r, c}] += t.coeff;
  }
  StencilRow out;
  for (const auto& [off, coeff] : merged)
    if (coeff != 0.0) out.push_back({off.first, off.second, coeff});
  return out;
}

// Translation-invariant block operator: the same S stencil rows applied at
// every pixel with periodic wrap, J = N.
class StencilAnalysisOperator final : public AnalysisOperator {
 public:
  StencilAnalysisOperator(int width, int height, PriorKind kind,
                          const std::vector<StencilRow>& rows)
      : width_(width), height_(height), kind_(kind) {
    if (width <= 0 || height <= 0)
      throw std::invalid_argument("analysis operator: non-positive shape");
    rows_.reserve(rows.size());
    for (const auto& row : rows) rows_.push_back(canonicalize(row, width, height));
  }

  std::size_t in_dim() const override { return n(); }
  std::size_t out_dim() const override { return n() * rows_.size(); }
  std::size_t block_count() const override { return n(); }
  std::size_t block_size() const override { return rows_.size(); }
  PriorKind kind() const override { return kind_; }

  void apply(std::span<const double> x, std::span<double> out) const override {
    const std::size_t S = rows_.size();
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        for (std::size_t s = 0; s < S; ++s) {
          double acc = 0.0;
          for (const auto& t : rows_[s]) acc += t.coeff * x[pixel(r + t.dr, c + t.dc)];
          out[j * S + s] = acc;
        }
      }
  }

  void apply_adjoint(std::span<const double> u, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t S = rows_.size();
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        for (std::size_t s = 0; s < S; ++s) {
          const double us = u[j * S + s];
          if (us == 0.0) continue;
          for (const auto& t : rows_[s]) out[pixel(r + t.dr, c + t.dc)] += t.coeff * us;
        }
      }
  }

  void block_apply(std::size_t j, std::span<const double> x,
                   std::span<double> out) const override {
    const int r = static_cast<int>(j) / width_;
    const int c = static_cast<int>(j) % width_;
    for (std::size_t s = 0; s < rows_.size(); ++s) {
      double acc = 0.0;
      for (const auto& t : rows_[s]) acc += t.coeff * x[pixel(r + t.dr, c + t.dc)];
      out[s] = acc;
    }
  }

  std::vector<double> normal_diag(std::span<const double> w) const override {
    std::vector<double> out(n(), 0.0);
    const std::size_t S = rows_.size();
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        for (std::size_t s = 0; s < S; ++s) {
          const double ws = w[j * S + s];
          for (const auto& t : rows_[s])
            out[pixel(r + t.dr, c + t.dc)] += ws * t.coeff * t.coeff;
        }
      }
    return out;
  }

  void block_trace_terms(std::span<const double> d, std::span<double> out) const override {
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        double acc = 0.0;
        for (const auto& row : rows_)
          for (const auto& t : row) acc += t.coeff * t.coeff * d[pixel(r + t.dr, c + t.dc)];
        out[j] = acc;
      }
  }

 private:
  std::size_t n() const { return static_cast<std::size_t>(width_) * height_; }

  std::size_t pixel(int r, int c) const {
    if (r < 0) r += height_;
    else if (r >= height_) r -= height_;
    if (c < 0) c += width_;
    else if (c >= width_) c -= width_;
    return static_cast<std::size_t>(r) * width_ + c;
  }

  int width_, height_;
  PriorKind kind_;
  std::vector<StencilRow> rows_;
};

StencilRow gradient_difference(int dr, int dc, bool horizontal) {
  // (forward gradient at pixel + (dr,dc)) - (forward gradient at pixel)
  const int gr = horizontal ? 0 : 1;
  const int gc = horizontal ? 1 : 0;
  return {{dr + gr, dc + gc, 1.0}, {dr, dc, -1.0}, {gr, gc, -1.0}, {0, 0, 1.0}};
}

}  // namespace

std::unique_ptr<AnalysisOperator> make_tv(int width, int height) {
  std::vector<StencilRow> rows = {
      {{0, 1, 1.0}, {0, 0, -1.0}},  // horizontal forward difference
      {{1, 0, 1.0}, {0, 0, -1.0}},  // vertical forward difference
  };
  return std::make_unique<StencilAnalysisOperator>(width, height, PriorKind::kTV, rows);
}

std::unique_ptr<AnalysisOperator> make_hessian(int width, int height) {
  const double s2 = std::sqrt(2.0);
  std::vector<StencilRow> rows = {
      {{0, -1, 1.0}, {0, 0, -2.0}, {0, 1, 1.0}},                      // hh
      {{1, 1, s2}, {1, 0, -s2}, {0, 1, -s2}, {0, 0, s2}},             // sqrt(2) hv
      {{-1, 0, 1.0}, {0, 0, -2.0}, {1, 0, 1.0}},                      // vv
  };
  return std::make_unique<StencilAnalysisOperator>(width, height, PriorKind::kHessian, rows);
}

std::unique_ptr<AnalysisOperator> make_sltv(int width, int height) {
  static constexpr int kOffsets[6][2] = {{0, 1}, {1, 0}, {1, 1}, {0, 2}, {2, 0}, {1, -1}};
  std::vector<StencilRow> rows;
  for (const auto& off : kOffsets) {
    rows.push_back(gradient_difference(off[0], off[1], /*horizontal=*/true));
    rows.push_back(gradient_difference(off[0], off[1], /*horizontal=*/false));
  }
  return std::make_unique<StencilAnalysisOperator>(width, height, PriorKind::kSLTV, rows);
}

// ---------------------------------------------------------------------------
// Non-local TV

namespace {

constexpr int kNltvRadius = 3;      // 7x7 search window
constexpr int kNltvDirections = 49;

class NltvOperator final : public AnalysisOperator {
 public:
  NltvOperator(int width, int height, std::vector<double> weights)
      : width_(width), height_(height), sqrt_w_(std::move(weights)) {
    if (sqrt_w_.size() != n() * kNltvDirections)
      throw std::invalid_argument("nltv: weight tensor shape mismatch");
    for (double& w : sqrt_w_) {
      if (w < 0.0) throw std::invalid_argument("nltv: negative weight");
      w = std::sqrt(w);
    }
  }

  std::size_t in_dim() const override { return n(); }
  std::size_t out_dim() const override { return n() * block_size(); }
  std::size_t block_count() const override { return n(); }
  // Each direction contributes the weighted forward difference and its
  // reverse.
  std::size_t block_size() const override { return 2 * kNltvDirections; }
  PriorKind kind() const override { return PriorKind::kNLTV; }

  void apply(std::span<const double> x, std::span<double> out) const override {
    for (std::size_t j = 0; j < n(); ++j) block_apply(j, x, out.subspan(j * block_size(), block_size()));
  }

  void apply_adjoint(std::span<const double> u, std::span<double> out) const override {
    std::fill(out.begin(), out.end(), 0.0);
    const std::size_t S = block_size();
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        for (int t = 0; t < kNltvDirections; ++t) {
          const auto [dr, dc] = offset(t);
          if (dr == 0 && dc == 0) continue;
          const double s = sqrt_w_[j * kNltvDirections + t];
          if (s == 0.0) continue;
          const std::size_t jn = pixel(r + dr, c + dc);
          const double g = u[j * S + 2 * t] - u[j * S + 2 * t + 1];
          out[jn] += s * g;
          out[j] -= s * g;
        }
      }
  }

  void block_apply(std::size_t j, std::span<const double> x,
                   std::span<double> out) const override {
    const int r = static_cast<int>(j) / width_;
    const int c = static_cast<int>(j) % width_;
    for (int t = 0; t < kNltvDirections; ++t) {
      const auto [dr, dc] = offset(t);
      double diff = 0.0;
      if (dr != 0 || dc != 0) {
        const double s = sqrt_w_[j * kNltvDirections + t];
        diff = s * (x[pixel(r + dr, c + dc)] - x[j]);
      }
      out[2 * t] = diff;
      out[2 * t + 1] = -diff;
    }
  }

  void block_sq_norms(std::span<const double> x, std::span<double> out) const override {
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        double acc = 0.0;
        for (int t = 0; t < kNltvDirections; ++t) {
          const auto [dr, dc] = offset(t);
          if (dr == 0 && dc == 0) continue;
          const double s = sqrt_w_[j * kNltvDirections + t];
          const double diff = s * (x[pixel(r + dr, c + dc)] - x[j]);
          acc += 2.0 * diff * diff;
        }
        out[j] = acc;
      }
  }

  std::vector<double> normal_diag(std::span<const double> w) const override {
    std::vector<double> out(n(), 0.0);
    const std::size_t S = block_size();
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        for (int t = 0; t < kNltvDirections; ++t) {
          const auto [dr, dc] = offset(t);
          if (dr == 0 && dc == 0) continue;
          const double s2 = sqrt_w_[j * kNltvDirections + t] * sqrt_w_[j * kNltvDirections + t];
          const double ws = w[j * S + 2 * t] + w[j * S + 2 * t + 1];
          const std::size_t jn = pixel(r + dr, c + dc);
          out[j] += s2 * ws;
          out[jn] += s2 * ws;
        }
      }
    return out;
  }

  void block_trace_terms(std::span<const double> d, std::span<double> out) const override {
    for (int r = 0; r < height_; ++r)
      for (int c = 0; c < width_; ++c) {
        const std::size_t j = static_cast<std::size_t>(r) * width_ + c;
        double acc = 0.0;
        for (int t = 0; t < kNltvDirections; ++t) {
          const auto [dr, dc] = offset(t);
          if (dr == 0 && dc == 0) continue;
          const double s2 = sqrt_w_[j * kNltvDirections + t] * sqrt_w_[j * kNltvDirections + t];
          acc += 2.0 * s2 * (d[j] + d[pixel(r + dr, c + dc)]);
        }
        out[j] = acc;
      }
  }

 private:
  std::size_t n() const { return static_cast<std::size_t>(width_) * height_; }

  static std::pair<int, int> offset(int t) {
    return {t / 7 - kNltvRadius, t % 7 - kNltvRadius};
  }

  std::size_t pixel(int r, int c) const {
    r = ((r % height_) + height_) % height_;
    c = ((c % width_) + width_) % width_;
    return static_cast<std::size_t>(r) * width_ + c;
  }

  int width_, height_;
  std::vector<double> sqrt_w_;  // stored as sqrt(omega), pixel-major
};

}  // namespace

std::vector<double> nltv_weights(const Image& reference, const NltvParams& params) {
  validate(reference);
  const int W = reference.width, H = reference.height;
  const std::size_t N = reference.size();

  double lo = reference.data[0], hi = reference.data[0];
  for (double v : reference.data) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  double h = params.bandwidth > 0.0 ? params.bandwidth : 0.1 * (hi - lo);
  if (h <= 0.0) h = 1.0;  // flat reference: distances are all zero anyway
  const double inv_h2 = 1.0 / (h * h);

  const int pr = params.patch_radius;
  // Mean per-pixel patch distance; a raw 25-pixel sum would concentrate all
  // the weight on the center direction for realistic bandwidths.
  const double patch_scale = 1.0 / ((2.0 * pr + 1.0) * (2.0 * pr + 1.0));
  auto pix = [&](int r, int c) {
    r = ((r % H) + H) % H;
    c = ((c % W) + W) % W;
    return static_cast<std::size_t>(r) * W + c;
  };

  std::vector<double> weights(N * kNltvDirections);
  for (int r = 0; r < H; ++r)
    for (int c = 0; c < W; ++c) {
      const std::size_t j = static_cast<std::size_t>(r) * W + c;
      double row_sum = 0.0;
      for (int t = 0; t < kNltvDirections; ++t) {
        const int dr = t / 7 - kNltvRadius;
        const int dc = t % 7 - kNltvRadius;
        double dist2 = 0.0;
        for (int pr_i = -pr; pr_i <= pr; ++pr_i)
          for (int pc_i = -pr; pc_i <= pr; ++pc_i) {
            const double diff = reference.data[pix(r + pr_i, c + pc_i)] -
                                reference.data[pix(r + dr + pr_i, c + dc + pc_i)];
            dist2 += diff * diff;
          }
        const double w = std::exp(-dist2 * patch_scale * inv_h2);
        weights[j * kNltvDirections + t] = w;
        row_sum += w;
      }
      for (int t = 0; t < kNltvDirections; ++t) weights[j * kNltvDirections + t] /= row_sum;
    }
  return weights;
}

std::unique_ptr<AnalysisOperator> make_nltv(int width, int height, const Image& reference,
                                            const NltvParams& params) {
  if (reference.width != width || reference.height != height)
    throw std::invalid_argument("nltv: reference shape mismatch");
  return std::make_unique<NltvOperator>(width, height, nltv_weights(reference, params));
}

std::unique_ptr<AnalysisOperator> make_nltv_from_weights(int width, int height,
                                                         std::vector<double> weights) {
  return std::make_unique<NltvOperator>(width, height, std::move(weights));
}

std::unique_ptr<AnalysisOperator> make_prior(PriorKind kind, int width, int height,
                                             const Image* nltv_reference,
                                             const NltvParams& params) {
  switch (kind) {
    case PriorKind::kTV:
      return make_tv(width, height);
    case PriorKind::kHessian:
      return make_hessian(width, height);
    case PriorKind::kSLTV:
      return make_sltv(width, height);
    case PriorKind::kNLTV:
      if (!nltv_reference) throw std::invalid_argument("nltv prior requires a reference image");
      return make_nltv(width, height, *nltv_reference, params);
  }
  throw std::invalid_argument("unknown prior kind");
}

}  // namespace pgvba
