#include "pgvba/vba.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <thread>

#include "pgvba/majorize.hpp"
#include "pgvba/rng.hpp"

namespace pgvba {

namespace {
constexpr double kLambdaFloor = 1e-12;
}

void VbaConfig::validate() const {
  if (!(kappa > 0.0 && kappa <= 1.0)) throw std::invalid_argument("config: kappa must lie in (0,1]");
  if (!(hyper_alpha > 0.0) || !(hyper_beta > 0.0))
    throw std::invalid_argument("config: hyperprior parameters must be positive");
  if (!(stop_tol > 0.0)) throw std::invalid_argument("config: stop_tol must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("config: max_outer_iters must be >= 1");
  if (cov_mode == CovMode::kMonteCarlo && num_samples < 2)
    throw std::invalid_argument("config: Monte-Carlo mode needs at least 2 samples");
}

void VbaTrace::write_csv(std::ostream& out) const {
  out << "# cov=" << (cov_mode == CovMode::kDiagonal ? "diag" : "mc");
  if (cov_mode == CovMode::kMonteCarlo) out << " ns=" << num_samples;
  out << "\n";
  out << "iter,seconds,gamma,rel_change,snr\n";
  char buf[160];
  for (const auto& row : rows) {
    std::snprintf(buf, sizeof(buf), "%d,%.6f,%.12g,%.12g,", row.iter, row.seconds, row.gamma,
                  row.rel_change);
    out << buf;
    if (row.snr) {
      std::snprintf(buf, sizeof(buf), "%.9g", *row.snr);
      out << buf;
    }
    out << "\n";
  }
}

std::vector<double> lambda_expectation_diag(const AnalysisOperator& prior,
                                            std::span<const double> mean,
                                            std::span<const double> cov_diag) {
  std::vector<double> lambda(prior.block_count());
  prior.block_sq_norms(mean, lambda);
  if (!cov_diag.empty()) {
    std::vector<double> tr(prior.block_count());
    prior.block_trace_terms(cov_diag, tr);
    for (std::size_t j = 0; j < lambda.size(); ++j) lambda[j] += tr[j];
  }
  return lambda;
}

std::vector<double> lambda_expectation_samples(const AnalysisOperator& prior,
                                               const std::vector<std::vector<double>>& samples) {
  if (samples.empty()) throw std::invalid_argument("lambda_expectation_samples: no samples");
  std::vector<double> lambda(prior.block_count(), 0.0);
  std::vector<double> bn(prior.block_count());
  for (const auto& sample : samples) {
    prior.block_sq_norms(sample, bn);
    for (std::size_t j = 0; j < lambda.size(); ++j) lambda[j] += bn[j];
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (double& l : lambda) l *= inv;
  return lambda;
}

double gamma_init(std::span<const double> x0, const AnalysisOperator& prior, double kappa,
                  bool* fell_back) {
  if (fell_back) *fell_back = false;
  const std::size_t J = prior.block_count();
  std::vector<double> bn(J);
  prior.block_sq_norms(x0, bn);
  double energy = 0.0;
  for (double v : bn) energy += std::pow(v, kappa);
  if (!(energy > 0.0)) {
    if (fell_back) *fell_back = true;
    return 1.0;
  }
  return static_cast<double>(prior.in_dim()) / (2.0 * kappa * energy);
}

VbaEngine::VbaEngine(const LinearOperator& blur, const AnalysisOperator& prior, DataTerm data,
                     VbaConfig config)
    : blur_(blur), prior_(prior), data_(std::move(data)), config_(std::move(config)) {
  config_.validate();
  if (blur_.out_dim() != data_.size())
    throw std::invalid_argument("vba: data length does not match the blur output");
  if (prior_.in_dim() != blur_.in_dim())
    throw std::invalid_argument("vba: prior and blur disagree on the signal size");
}

void VbaEngine::initialize(std::span<const double> x0) {
  const std::size_t N = blur_.in_dim();
  if (x0.size() != N) throw std::invalid_argument("vba: initializer length mismatch");

  gaussian_.mean.assign(x0.begin(), x0.end());
  gaussian_.cov.mode = config_.cov_mode;
  gaussian_.cov.diag.clear();
  gaussian_.cov.samples.clear();

  const auto hx = blur_.apply(x0);
  w_.resize(data_.size());
  for (std::size_t i = 0; i < w_.size(); ++i)
    w_[i] = hx[i] - dphi(hx[i], data_.y[i], data_.model) / data_.mu[i];

  lambda_.resize(prior_.block_count());
  prior_.block_sq_norms(x0, lambda_);
  lambda_floor_hits_ = 0;
  for (double& l : lambda_)
    if (l < kLambdaFloor) {
      l = kLambdaFloor;
      ++lambda_floor_hits_;
    }

  gamma_.a = static_cast<double>(N) / (2.0 * config_.kappa) + config_.hyper_alpha;
  const double gamma0 = gamma_init(x0, prior_, config_.kappa, &gamma_init_fell_back_);
  gamma_.b = gamma_.a / gamma0;

  refresh_block_weights();
  if (config_.cov_mode == CovMode::kDiagonal) update_diag_cov();
}

// Block weights of the prior precision: Lambda_j = kappa lambda_j^(kappa-1).
// Cached because the precision is applied once per CG iteration.
void VbaEngine::refresh_block_weights() {
  block_weights_.resize(lambda_.size());
  for (std::size_t j = 0; j < lambda_.size(); ++j)
    block_weights_[j] = config_.kappa * std::pow(lambda_[j], config_.kappa - 1.0);
}

void VbaEngine::precision_apply(std::span<const double> v, std::span<double> out) const {
  const std::size_t N = blur_.in_dim();
  // H^T Diag(mu) H v
  std::vector<double> hv(blur_.out_dim());
  blur_.apply(v, hv);
  for (std::size_t i = 0; i < hv.size(); ++i) hv[i] *= data_.mu[i];
  blur_.apply_adjoint(hv, out);

  if (prior_.out_dim() == 0) return;
  // 2 (a/b) D^T Lambda D v
  const std::size_t S = prior_.block_size();
  std::vector<double> dv(prior_.out_dim());
  prior_.apply(v, dv);
  for (std::size_t j = 0; j < prior_.block_count(); ++j)
    for (std::size_t s = 0; s < S; ++s) dv[j * S + s] *= block_weights_[j];
  std::vector<double> dtv(N);
  prior_.apply_adjoint(dv, dtv);
  const double scale = 2.0 * gamma_.mean();
  for (std::size_t i = 0; i < N; ++i) out[i] += scale * dtv[i];
}

std::vector<double> VbaEngine::precision_apply(std::span<const double> v) const {
  std::vector<double> out(blur_.in_dim());
  precision_apply(v, out);
  return out;
}

std::vector<double> VbaEngine::precision_diag() const {
  auto diag = blur_.normal_diag(data_.mu);
  if (prior_.out_dim() == 0) return diag;
  const std::size_t S = prior_.block_size();
  std::vector<double> stacked(prior_.out_dim());
  for (std::size_t j = 0; j < prior_.block_count(); ++j)
    for (std::size_t s = 0; s < S; ++s) stacked[j * S + s] = block_weights_[j];
  const auto pd = prior_.normal_diag(stacked);
  const double scale = 2.0 * gamma_.mean();
  for (std::size_t i = 0; i < diag.size(); ++i) diag[i] += scale * pd[i];
  return diag;
}

std::vector<double> VbaEngine::rhs_mean() const {
  std::vector<double> u(data_.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = data_.mu[i] * w_[i];
  return blur_.apply_adjoint(u);
}

CgResult VbaEngine::update_mean() {
  SpdSystem system{blur_.in_dim(),
                   [this](std::span<const double> v, std::span<double> out) {
                     precision_apply(v, out);
                   },
                   precision_diag()};
  auto result = cg_solve(system, rhs_mean(), config_.mean_cg, gaussian_.mean);
  gaussian_.mean = result.x;
  return result;
}

void VbaEngine::update_diag_cov() {
  auto diag = precision_diag();
  for (double& d : diag) {
    if (!(d > 0.0)) throw std::runtime_error("diag_cov: non-positive precision diagonal");
    d = 1.0 / d;
  }
  gaussian_.cov.mode = CovMode::kDiagonal;
  gaussian_.cov.diag = std::move(diag);
  gaussian_.cov.samples.clear();
}

CovApprox VbaEngine::sample_posterior(int ns, int iteration) {
  if (ns < 2) throw std::invalid_argument("sample_posterior: need at least 2 samples");
  const std::size_t N = blur_.in_dim();
  const std::size_t M = data_.size();
  const std::size_t S = prior_.block_size();
  const std::size_t J = prior_.block_count();

  std::vector<double> u(M);
  for (std::size_t i = 0; i < M; ++i) u[i] = data_.mu[i] * w_[i];
  std::vector<double> sqrt_mu(M);
  for (std::size_t i = 0; i < M; ++i) sqrt_mu[i] = std::sqrt(data_.mu[i]);
  std::vector<double> eta_std(J);
  const double gamma_mean = gamma_.mean();
  for (std::size_t j = 0; j < J; ++j) eta_std[j] = std::sqrt(2.0 * gamma_mean * block_weights_[j]);

  const SpdSystem system{N,
                         [this](std::span<const double> v, std::span<double> out) {
                           precision_apply(v, out);
                         },
                         precision_diag()};

  std::vector<std::vector<double>> samples(ns);
  auto draw_sample = [&](int s) {
    Rng rng(derive_seed(config_.master_seed, static_cast<std::uint64_t>(iteration),
                        static_cast<std::uint64_t>(s)));
    // Perturbation: nu ~ N(u, Diag(mu)), eta ~ N(0, 2 gamma Lambda), so that
    // z = H^T nu + D^T eta has covariance Sigma^{-1} and the solve below
    // yields an exact N(m, Sigma) draw.
    std::vector<double> nu(M);
    for (std::size_t i = 0; i < M; ++i) nu[i] = u[i] + sqrt_mu[i] * rng.normal();
    std::vector<double> z(N);
    blur_.apply_adjoint(nu, z);
    if (prior_.out_dim() != 0) {
      std::vector<double> eta(prior_.out_dim());
      for (std::size_t j = 0; j < J; ++j)
        for (std::size_t k = 0; k < S; ++k) eta[j * S + k] = eta_std[j] * rng.normal();
      std::vector<double> dte(N);
      prior_.apply_adjoint(eta, dte);
      for (std::size_t i = 0; i < N; ++i) z[i] += dte[i];
    }
    samples[s] = cg_solve(system, z, config_.sample_cg).x;
  };

  int threads = config_.threads > 0 ? config_.threads
                                    : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::max(1, std::min(threads, ns));
  if (threads == 1) {
    for (int s = 0; s < ns; ++s) draw_sample(s);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (int s = next.fetch_add(1); s < ns; s = next.fetch_add(1)) draw_sample(s);
      });
    for (auto& t : pool) t.join();
  }

  // Ordered reduction keeps the result independent of thread scheduling.
  std::vector<double> mean(N, 0.0);
  for (int s = 0; s < ns; ++s)
    for (std::size_t i = 0; i < N; ++i) mean[i] += samples[s][i];
  for (double& v : mean) v /= ns;

  gaussian_.mean = std::move(mean);
  gaussian_.cov.mode = CovMode::kMonteCarlo;
  gaussian_.cov.diag.clear();
  gaussian_.cov.samples = std::move(samples);
  return gaussian_.cov;
}

void VbaEngine::update_w() {
  const auto hm = blur_.apply(gaussian_.mean);
  for (std::size_t i = 0; i < w_.size(); ++i)
    w_[i] = hm[i] - dphi(hm[i], data_.y[i], data_.model) / data_.mu[i];
}

void VbaEngine::update_lambda() {
  const std::size_t J = prior_.block_count();
  if (J == 0) return;
  if (gaussian_.cov.mode == CovMode::kMonteCarlo && !gaussian_.cov.samples.empty())
    lambda_ = lambda_expectation_samples(prior_, gaussian_.cov.samples);
  else
    lambda_ = lambda_expectation_diag(prior_, gaussian_.mean, gaussian_.cov.diag);
  for (double& l : lambda_)
    if (l < kLambdaFloor) {
      l = kLambdaFloor;
      ++lambda_floor_hits_;
    }
  refresh_block_weights();
}

void VbaEngine::update_gamma() {
  double sum = 0.0;
  for (double l : lambda_) sum += std::pow(l, config_.kappa);
  gamma_.b = sum + config_.hyper_beta;
}

void VbaEngine::step(int iteration) {
  if (config_.cov_mode == CovMode::kMonteCarlo) {
    sample_posterior(config_.num_samples, iteration);
  } else {
    update_mean();
    update_diag_cov();
  }
  update_w();
  update_lambda();
  update_gamma();
}

VbaResult run(std::span<const double> y_raw, const LinearOperator& blur,
              const AnalysisOperator& prior, const NoiseModel& noise, const VbaConfig& config,
              std::span<const double> ground_truth) {
  config.validate();
  if (blur.in_dim() != blur.out_dim())
    throw std::invalid_argument("run: blur must be square so the degraded image can seed x");
  if (!ground_truth.empty() && ground_truth.size() != blur.in_dim())
    throw std::invalid_argument("run: ground truth length mismatch");

  VbaEngine engine(blur, prior, DataTerm::make(y_raw, noise), config);
  engine.initialize(engine.data().y);

  VbaResult result;
  result.trace.cov_mode = config.cov_mode;
  result.trace.num_samples = config.cov_mode == CovMode::kMonteCarlo ? config.num_samples : 0;

  const double gt_norm = ground_truth.empty() ? 0.0 : norm(ground_truth);
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> prev = engine.mean();
  for (int k = 1; k <= config.max_outer_iters; ++k) {
    engine.step(k);

    const auto& m = engine.mean();
    double diff2 = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) {
      const double d = m[i] - prev[i];
      diff2 += d * d;
    }
    const double prev_norm = norm(prev);
    const double rel = prev_norm > 0.0 ? std::sqrt(diff2) / prev_norm : std::sqrt(diff2);

    TraceRow row;
    row.iter = k;
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    row.gamma = engine.gamma_factor().mean();
    row.rel_change = rel;
    if (!ground_truth.empty()) {
      double err2 = 0.0;
      for (std::size_t i = 0; i < m.size(); ++i) {
        const double d = ground_truth[i] - m[i];
        err2 += d * d;
      }
      row.snr = err2 > 0.0 ? 20.0 * std::log10(gt_norm / std::sqrt(err2))
                           : std::numeric_limits<double>::infinity();
    }
    result.trace.rows.push_back(row);
    result.iterations = k;

    if (rel <= config.stop_tol) {
      result.converged = true;
      break;
    }
    prev = m;
  }

  result.mean = engine.mean();
  result.gamma = engine.gamma_factor();
  return result;
}

// ---------------------------------------------------------------------------
// Dense KL upper bound (validation only)

namespace {

// Cholesky log-determinant of a symmetric positive definite matrix.
double log_det_spd(std::vector<double> a, std::size_t n) {
  double logdet = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    double d = a[k * n + k];
    for (std::size_t p = 0; p < k; ++p) d -= a[k * n + p] * a[k * n + p];
    if (!(d > 0.0)) throw std::runtime_error("kl_upper_bound: covariance is not SPD");
    const double l = std::sqrt(d);
    a[k * n + k] = l;
    for (std::size_t i = k + 1; i < n; ++i) {
      double v = a[i * n + k];
      for (std::size_t p = 0; p < k; ++p) v -= a[i * n + p] * a[k * n + p];
      a[i * n + k] = v / l;
    }
    logdet += 2.0 * std::log(l);
  }
  return logdet;
}

}  // namespace

double kl_upper_bound(const LinearOperator& blur, const AnalysisOperator& prior,
                      const DataTerm& data, std::span<const double> m,
                      std::span<const double> sigma_dense, double a, double b,
                      std::span<const double> w, std::span<const double> lambda, double kappa,
                      double hyper_alpha, double hyper_beta,
                      std::span<const double> varsigma_values) {
  const std::size_t N = blur.in_dim();
  const std::size_t M = data.size();
  if (N > 64) throw std::invalid_argument("kl_upper_bound: dense oracle limited to N <= 64");
  if (sigma_dense.size() != N * N) throw std::invalid_argument("kl_upper_bound: Sigma shape");
  const double a_expected = static_cast<double>(N) / (2.0 * kappa) + hyper_alpha;
  if (std::abs(a - a_expected) > 1e-9 * a_expected)
    throw std::invalid_argument("kl_upper_bound: requires the canonical Gamma shape");

  const double logdet = log_det_spd({sigma_dense.begin(), sigma_dense.end()}, N);

  // E[T] = sum_i mu_i ( 1/2 ((Hm)_i - w_i)^2 + 1/2 (H Sigma H^T)_ii + varsigma_i(w_i) )
  const auto hm = blur.apply(m);
  std::vector<double> unit(M, 0.0), hrow(N), tmp(N);
  double expected_T = 0.0;
  for (std::size_t i = 0; i < M; ++i) {
    unit[i] = 1.0;
    blur.apply_adjoint(unit, hrow);
    unit[i] = 0.0;
    for (std::size_t p = 0; p < N; ++p) {
      double s = 0.0;
      for (std::size_t q = 0; q < N; ++q) s += sigma_dense[p * N + q] * hrow[q];
      tmp[p] = s;
    }
    const double quad = dot(hrow, tmp);
    const double rs = hm[i] - w[i];
    const double vs = varsigma_values.empty()
                          ? varsigma_numeric(w[i], data.y[i], data.model)
                          : varsigma_values[i];
    expected_T += data.mu[i] * (0.5 * rs * rs + 0.5 * quad + vs);
  }

  // E||D_j x||^2 = ||D_j m||^2 + trace(D_j^T D_j Sigma), via dense rows of D.
  const std::size_t J = prior.block_count();
  const std::size_t S = prior.block_size();
  std::vector<double> bn(J);
  prior.block_sq_norms(m, bn);
  std::vector<double> dfull(J * S * N);
  std::vector<double> unit_n(N, 0.0), col(J * S);
  for (std::size_t nu = 0; nu < N; ++nu) {
    unit_n[nu] = 1.0;
    prior.apply(unit_n, col);
    unit_n[nu] = 0.0;
    for (std::size_t t = 0; t < J * S; ++t) dfull[t * N + nu] = col[t];
  }
  double prior_term = 0.0;
  for (std::size_t j = 0; j < J; ++j) {
    double trace = 0.0;
    for (std::size_t s = 0; s < S; ++s) {
      const double* row = &dfull[(j * S + s) * N];
      for (std::size_t p = 0; p < N; ++p) {
        double acc = 0.0;
        for (std::size_t q = 0; q < N; ++q) acc += sigma_dense[p * N + q] * row[q];
        trace += row[p] * acc;
      }
    }
    const double ej = bn[j] + trace;
    prior_term += (kappa * ej + (1.0 - kappa) * lambda[j]) * std::pow(lambda[j], kappa - 1.0);
  }

  return -0.5 * logdet + a * std::log(b) + (a / b) * (hyper_beta + prior_term) + expected_T;
}

}  // namespace pgvba
