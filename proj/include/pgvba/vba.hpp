#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include "pgvba/cg.hpp"
#include "pgvba/likelihood.hpp"
#include "pgvba/operators.hpp"

namespace pgvba {

enum class CovMode { kDiagonal, kMonteCarlo };

struct VbaConfig {
  double kappa = 0.5;        // prior shape exponent, in (0, 1]
  double hyper_alpha = 1e-3; // Gamma hyperprior shape
  double hyper_beta = 1e-3;  // Gamma hyperprior rate
  CovMode cov_mode = CovMode::kDiagonal;
  int num_samples = 160;     // Monte-Carlo mode sample count
  double stop_tol = 1e-6;    // relative change of the mean
  int max_outer_iters = 500;
  CgParams mean_cg{1e-6, 500};
  CgParams sample_cg{1e-4, 200};
  std::uint64_t master_seed = 0;
  int threads = 0;           // 0 = hardware concurrency

  void validate() const;
};

/// Gamma posterior factor; the regularization estimate is the mean a/b.
struct GammaFactor {
  double a = 1.0;
  double b = 1.0;
  double mean() const { return a / b; }
};

/// Covariance approximation carried by the Gaussian factor: either a
/// diagonal surrogate d ~ diag(Sigma) or a set of posterior samples.
struct CovApprox {
  CovMode mode = CovMode::kDiagonal;
  std::vector<double> diag;
  std::vector<std::vector<double>> samples;
};

struct GaussianFactor {
  std::vector<double> mean;
  CovApprox cov;
};

struct TraceRow {
  int iter = 0;
  double seconds = 0.0;
  double gamma = 0.0;
  double rel_change = 0.0;
  std::optional<double> snr;
};

struct VbaTrace {
  CovMode cov_mode = CovMode::kDiagonal;
  int num_samples = 0;
  std::vector<TraceRow> rows;

  /// Stable schema: `iter,seconds,gamma,rel_change,snr` after a comment
  /// line recording the covariance mode (and N_s in Monte-Carlo mode).
  void write_csv(std::ostream& out) const;
};

/// E[||D_j x||^2] under a diagonal covariance: ||D_j m||^2 plus the
/// column-norm-weighted trace term.
std::vector<double> lambda_expectation_diag(const AnalysisOperator& prior,
                                            std::span<const double> mean,
                                            std::span<const double> cov_diag);

/// Monte-Carlo estimate (1/N_s) sum_s ||D_j n_s||^2.
std::vector<double> lambda_expectation_samples(const AnalysisOperator& prior,
                                               const std::vector<std::vector<double>>& samples);

/// Maximum-likelihood initial regularization on x0:
/// gamma0 = N / (2 kappa sum_j ||D_j x0||^(2 kappa)).
/// Falls back to 1 (with *fell_back set) when the prior energy vanishes.
double gamma_init(std::span<const double> x0, const AnalysisOperator& prior, double kappa,
                  bool* fell_back = nullptr);

/// One inference problem: posterior factor state plus the four update steps.
/// run() drives the full loop; the individual updates stay public so they
/// can be exercised in isolation.
class VbaEngine {
 public:
  VbaEngine(const LinearOperator& blur, const AnalysisOperator& prior, DataTerm data,
            VbaConfig config);

  /// w <- w_hat(H x0), lambda_j <- ||D_j x0||^2 (floored), a <- N/(2 kappa) + alpha,
  /// b <- a / gamma_init(x0), m <- x0.
  void initialize(std::span<const double> x0);

  /// Sigma^{-1} v = H^T Diag(mu) H v + 2 (a/b) D^T Lambda D v with
  /// Lambda block j = kappa lambda_j^(kappa-1) I_S.
  void precision_apply(std::span<const double> v, std::span<double> out) const;
  std::vector<double> precision_apply(std::span<const double> v) const;
  std::vector<double> precision_diag() const;

  /// Solves Sigma^{-1} m = H^T (mu .* w) by warm-started CG.
  CgResult update_mean();

  /// In diagonal covariance mode, refreshes d = 1 / diag(Sigma^{-1}).
  void update_diag_cov();

  /// Draws ns samples n_s ~ N(m, Sigma) by perturbation-optimization and
  /// replaces the mean with their empirical average. Per-sample seeds are
  /// derived from (master_seed, iteration, sample index).
  CovApprox sample_posterior(int ns, int iteration);

  void update_w();
  void update_lambda();
  void update_gamma();

  /// One full update cycle (steps a-d); iteration indexes the sampler seeds.
  void step(int iteration);

  const std::vector<double>& mean() const { return gaussian_.mean; }
  const CovApprox& cov() const { return gaussian_.cov; }
  const std::vector<double>& w() const { return w_; }
  const std::vector<double>& lambda() const { return lambda_; }
  GammaFactor gamma_factor() const { return gamma_; }
  const DataTerm& data() const { return data_; }
  const VbaConfig& config() const { return config_; }
  int lambda_floor_hits() const { return lambda_floor_hits_; }
  bool gamma_init_fell_back() const { return gamma_init_fell_back_; }

 private:
  std::vector<double> rhs_mean() const;  // H^T (mu .* w)
  void refresh_block_weights();

  const LinearOperator& blur_;
  const AnalysisOperator& prior_;
  DataTerm data_;
  VbaConfig config_;

  GaussianFactor gaussian_;
  GammaFactor gamma_;
  std::vector<double> w_;
  std::vector<double> lambda_;
  std::vector<double> block_weights_;  // kappa * lambda_j^(kappa-1), cached
  int lambda_floor_hits_ = 0;
  bool gamma_init_fell_back_ = false;
};

struct VbaResult {
  std::vector<double> mean;
  GammaFactor gamma;
  VbaTrace trace;
  int iterations = 0;
  bool converged = false;
};

/// Full inference: truncates the data, initializes from the degraded image,
/// and iterates the four updates until the mean stabilizes.
VbaResult run(std::span<const double> y_raw, const LinearOperator& blur,
              const AnalysisOperator& prior, const NoiseModel& noise, const VbaConfig& config,
              std::span<const double> ground_truth = {});

/// Upper bound on KL(q || posterior) up to additive constants independent of
/// (q, w, lambda), evaluated with a dense covariance. Requires the canonical
/// shape a = N/(2 kappa) + alpha and N <= 64; validation use only.
/// varsigma_values, when given, overrides the per-pixel numeric sup.
double kl_upper_bound(const LinearOperator& blur, const AnalysisOperator& prior,
                      const DataTerm& data, std::span<const double> m,
                      std::span<const double> sigma_dense, double a, double b,
                      std::span<const double> w, std::span<const double> lambda, double kappa,
                      double hyper_alpha, double hyper_beta,
                      std::span<const double> varsigma_values = {});

}  // namespace pgvba
