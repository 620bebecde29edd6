#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "pgvba/image.hpp"
#include "pgvba/operators.hpp"

namespace pgvba {

enum class NoiseFamily { kGaussian, kCauchy, kAnscombe, kGast, kSPoiss, kWl2 };

NoiseFamily parse_family(const std::string& name);
std::string family_name(NoiseFamily f);

/// Per-pixel data-fidelity model: family tag plus its scale parameters.
struct NoiseModel {
  NoiseFamily family = NoiseFamily::kGaussian;
  double sigma = 1.0;      // Gaussian noise std-dev
  double eps_floor = 1e-3; // lower bound for the curvature mu

  double sigma2() const { return sigma * sigma; }
  void validate() const;
};

/// Data-fidelity value phi(v; y). For the square-root/Poisson-type families
/// the function is replaced on v<0 by its quadratic extension, making it
/// differentiable on all of R.
double phi(double v, double y, const NoiseModel& model);

/// Derivative of phi in v, including the extension branch.
double dphi(double v, double y, const NoiseModel& model);

/// Lipschitz constant of phi' for the given observation.
double beta_lipschitz(double y, const NoiseModel& model);

/// Curvature mu(y) >= eps used by the majorization: max{beta, eps} for all
/// families except WL2, which uses max{(y+sigma^2)^2/sigma^6, eps}.
double mu_curvature(double y, const NoiseModel& model);

/// Clips each sample into the family's validity domain.
std::vector<double> truncate_data(std::span<const double> y_raw, const NoiseModel& model);

/// Observed data bundled with its per-pixel curvatures and Lipschitz
/// constants. Immutable after construction.
struct DataTerm {
  NoiseModel model;
  std::vector<double> y;     // truncated observations
  std::vector<double> mu;    // mu_i(y_i)
  std::vector<double> beta;  // beta_i(y_i)

  static DataTerm make(std::span<const double> y_raw, const NoiseModel& model);
  std::size_t size() const { return y.size(); }
};

/// Exact mixed Poisson-Gaussian negative log-likelihood of a single pixel
/// with Poisson intensity `intensity`. The infinite sum is truncated
/// adaptively; validation use only.
double exact_pg_nll_pixel(double intensity, double y, double sigma);

/// Sum of exact_pg_nll_pixel over the blurred image. Throws if any Poisson
/// intensity is negative.
double exact_pg_nll(const Image& x, std::span<const double> y_raw,
                    const LinearOperator& blur, double sigma);

}  // namespace pgvba
