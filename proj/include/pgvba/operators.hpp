#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "pgvba/image.hpp"

namespace pgvba {

/// 2-D convolution kernel with odd side lengths and unit mass.
struct BlurKernel {
  int width = 1;
  int height = 1;
  std::vector<double> taps;  // row-major, anchor at the center tap

  static BlurKernel delta();
  static BlurKernel uniform(int size);
  static BlurKernel gaussian(int size, double std_dev);

  /// Enforces odd side lengths, non-negative taps, unit sum (1e-12).
  void validate() const;
};

/// Parses the kernel mini-language: "uniform:5", "gaussian:25:1.6".
BlurKernel parse_kernel(const std::string& spec);

/// Matrix-free linear map with an adjoint.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual std::size_t in_dim() const = 0;
  virtual std::size_t out_dim() const = 0;

  virtual void apply(std::span<const double> x, std::span<double> out) const = 0;
  virtual void apply_adjoint(std::span<const double> u, std::span<double> out) const = 0;

  /// diag(A^T Diag(w) A): for input coordinate n, sum_i w_i A_in^2.
  virtual std::vector<double> normal_diag(std::span<const double> w) const = 0;

  std::vector<double> apply(std::span<const double> x) const {
    std::vector<double> out(out_dim());
    apply(x, out);
    return out;
  }
  std::vector<double> apply_adjoint(std::span<const double> u) const {
    std::vector<double> out(in_dim());
    apply_adjoint(u, out);
    return out;
  }
};

/// Identity on n coordinates; mostly used to disable the blur in toys.
class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(std::size_t n) : n_(n) {}
  std::size_t in_dim() const override { return n_; }
  std::size_t out_dim() const override { return n_; }
  void apply(std::span<const double> x, std::span<double> out) const override;
  void apply_adjoint(std::span<const double> u, std::span<double> out) const override;
  std::vector<double> normal_diag(std::span<const double> w) const override;

 private:
  std::size_t n_;
};

enum class PriorKind { kTV, kHessian, kSLTV, kNLTV };

/// Block analysis operator D = [D_1; ...; D_J], one block of S rows per
/// pixel. Stacked output is block-major: out[j*S + s].
class AnalysisOperator : public LinearOperator {
 public:
  virtual std::size_t block_count() const = 0;  // J
  virtual std::size_t block_size() const = 0;   // S

  virtual void block_apply(std::size_t j, std::span<const double> x,
                           std::span<double> out) const = 0;

  /// ||D_j x||^2 for every block at once.
  virtual void block_sq_norms(std::span<const double> x, std::span<double> out) const;

  /// Per-block trace terms against a diagonal covariance: for block j,
  /// sum_n (D_j^T D_j)_nn d_n.
  virtual void block_trace_terms(std::span<const double> d, std::span<double> out) const = 0;

  virtual PriorKind kind() const = 0;
};

struct NltvParams {
  int patch_radius = 2;    // 5x5 patches
  double bandwidth = 0.0;  // 0 = 10% of the reference dynamic range
};

/// Periodic circular convolution with the kernel; adjoint is correlation
/// with the flipped kernel. FFT-backed.
std::unique_ptr<LinearOperator> make_blur(const BlurKernel& kernel, int width, int height);

/// First-order forward differences, S=2 rows per pixel (horizontal, vertical).
std::unique_ptr<AnalysisOperator> make_tv(int width, int height);

/// Second-order differences, S=3 rows per pixel (hh, sqrt(2)*hv, vv).
std::unique_ptr<AnalysisOperator> make_hessian(int width, int height);

/// Differences of neighboring gradients over a fixed 6-offset stencil, S=12.
std::unique_ptr<AnalysisOperator> make_sltv(int width, int height);

/// Non-local differences over a 7x7 window (49 directions), weighted by
/// patch similarity on the reference image; S=98 (each direction contributes
/// the weighted forward difference and its reverse).
std::unique_ptr<AnalysisOperator> make_nltv(int width, int height, const Image& reference,
                                            const NltvParams& params = {});

/// Same NLTV geometry with precomputed weights (width*height x 49, row-major).
std::unique_ptr<AnalysisOperator> make_nltv_from_weights(int width, int height,
                                                         std::vector<double> weights);

/// Normalized patch-similarity weights for the NLTV prior, one row of 49
/// direction weights per pixel, each row summing to 1.
std::vector<double> nltv_weights(const Image& reference, const NltvParams& params = {});

std::unique_ptr<AnalysisOperator> make_prior(PriorKind kind, int width, int height,
                                             const Image* nltv_reference = nullptr,
                                             const NltvParams& params = {});

}  // namespace pgvba
