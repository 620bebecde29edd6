#include "pgvba/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace pgvba {

namespace {

constexpr double kAnscombeShift = 3.0 / 8.0;

bool has_extension(NoiseFamily f) {
  // The square-root/Poisson-type families are Lipschitz-differentiable only
  // on R+ and are replaced on R- by a quadratic extension.
  return f == NoiseFamily::kAnscombe || f == NoiseFamily::kGast ||
         f == NoiseFamily::kSPoiss || f == NoiseFamily::kWl2;
}

// Data-fidelity value on the family's native branch (v >= 0 for the
// extended families).
double phi_native(double v, double y, const NoiseModel& m) {
  const double s2 = m.sigma2();
  switch (m.family) {
    case NoiseFamily::kGaussian: {
      const double r = v - y;
      return r * r / (2.0 * s2);
    }
    case NoiseFamily::kCauchy: {
      const double r = v - y;
      return std::log1p(r * r / s2);
    }
    case NoiseFamily::kAnscombe: {
      const double d = std::sqrt(y + kAnscombeShift) - std::sqrt(v + kAnscombeShift);
      return 2.0 * d * d;
    }
    case NoiseFamily::kGast: {
      const double c = s2 + kAnscombeShift;
      const double d = std::sqrt(y + c) - std::sqrt(v + c);
      return 2.0 * d * d;
    }
    case NoiseFamily::kSPoiss:
      return (v + s2) - (y + s2) * std::log(v + s2);
    case NoiseFamily::kWl2: {
      const double r = y - v;
      return r * r / (2.0 * (s2 + v)) + 0.5 * std::log(s2 + v);
    }
  }
  throw std::logic_error("unknown noise family");
}

double dphi_native(double v, double y, const NoiseModel& m) {
  const double s2 = m.sigma2();
  switch (m.family) {
    case NoiseFamily::kGaussian:
      return (v - y) / s2;
    case NoiseFamily::kCauchy: {
      const double r = v - y;
      return 2.0 * r / (s2 + r * r);
    }
    case NoiseFamily::kAnscombe:
      return 2.0 - 2.0 * std::sqrt(y + kAnscombeShift) / std::sqrt(v + kAnscombeShift);
    case NoiseFamily::kGast: {
      const double c = s2 + kAnscombeShift;
      return 2.0 - 2.0 * std::sqrt(y + c) / std::sqrt(v + c);
    }
    case NoiseFamily::kSPoiss:
      return 1.0 - (y + s2) / (v + s2);
    case NoiseFamily::kWl2: {
      const double a = y + s2;
      const double u = v + s2;
      return 0.5 - a * a / (2.0 * u * u) + 0.5 / u;
    }
  }
  throw std::logic_error("unknown noise family");
}

// Curvature of the quadratic extension on R-. This is the Lipschitz
// constant of phi', except for WL2 where it is capped at the curvature
// mu(y): otherwise v^2/2 - phi(v)/mu would lose convexity on R- for
// low-count observations and the half-quadratic construction degenerates.
double extension_curvature(double y, const NoiseModel& m) {
  const double b = beta_lipschitz(y, m);
  if (m.family == NoiseFamily::kWl2) return std::min(b, mu_curvature(y, m));
  return b;
}

}  // namespace

NoiseFamily parse_family(const std::string& name) {
  if (name == "gaussian") return NoiseFamily::kGaussian;
  if (name == "cauchy") return NoiseFamily::kCauchy;
  if (name == "anscombe") return NoiseFamily::kAnscombe;
  if (name == "gast") return NoiseFamily::kGast;
  if (name == "spoiss") return NoiseFamily::kSPoiss;
  if (name == "wl2") return NoiseFamily::kWl2;
  throw std::invalid_argument("unknown noise family '" + name + "'");
}

std::string family_name(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::kGaussian: return "gaussian";
    case NoiseFamily::kCauchy: return "cauchy";
    case NoiseFamily::kAnscombe: return "anscombe";
    case NoiseFamily::kGast: return "gast";
    case NoiseFamily::kSPoiss: return "spoiss";
    case NoiseFamily::kWl2: return "wl2";
  }
  return "?";
}

void NoiseModel::validate() const {
  const bool needs_sigma = family != NoiseFamily::kAnscombe && family != NoiseFamily::kGast;
  if (needs_sigma && !(sigma > 0.0))
    throw std::invalid_argument("noise model: sigma must be positive for this family");
  if (sigma < 0.0) throw std::invalid_argument("noise model: negative sigma");
  if (!(eps_floor > 0.0)) throw std::invalid_argument("noise model: eps_floor must be positive");
}

double phi(double v, double y, const NoiseModel& model) {
  if (v < 0.0 && has_extension(model.family)) {
    const double c = extension_curvature(y, model);
    return phi_native(0.0, y, model) + dphi_native(0.0, y, model) * v + 0.5 * c * v * v;
  }
  return phi_native(v, y, model);
}

double dphi(double v, double y, const NoiseModel& model) {
  if (v < 0.0 && has_extension(model.family)) {
    return dphi_native(0.0, y, model) + extension_curvature(y, model) * v;
  }
  return dphi_native(v, y, model);
}

double beta_lipschitz(double y, const NoiseModel& model) {
  const double s2 = model.sigma2();
  switch (model.family) {
    case NoiseFamily::kGaussian:
      return 1.0 / s2;
    case NoiseFamily::kCauchy:
      return 2.0 / s2;
    case NoiseFamily::kAnscombe:
      return std::pow(kAnscombeShift, -1.5) * std::sqrt(y + kAnscombeShift);
    case NoiseFamily::kGast: {
      const double c = s2 + kAnscombeShift;
      return std::pow(c, -1.5) * std::sqrt(y + c);
    }
    case NoiseFamily::kSPoiss:
      return (y + s2) / (s2 * s2);
    case NoiseFamily::kWl2: {
      const double a = y + s2;
      return std::max(a * a / (s2 * s2 * s2) - 0.5 / (s2 * s2),
                      1.0 / (54.0 * a * a * a * a));
    }
  }
  throw std::logic_error("unknown noise family");
}

double mu_curvature(double y, const NoiseModel& model) {
  if (model.family == NoiseFamily::kWl2) {
    const double a = y + model.sigma2();
    const double s2 = model.sigma2();
    return std::max(a * a / (s2 * s2 * s2), model.eps_floor);
  }
  return std::max(beta_lipschitz(y, model), model.eps_floor);
}

std::vector<double> truncate_data(std::span<const double> y_raw, const NoiseModel& model) {
  std::vector<double> y(y_raw.begin(), y_raw.end());
  const double s2 = model.sigma2();
  switch (model.family) {
    case NoiseFamily::kGaussian:
    case NoiseFamily::kCauchy:
      break;
    case NoiseFamily::kAnscombe:
      for (double& v : y) v = std::max(v, -kAnscombeShift);
      break;
    case NoiseFamily::kGast:
      for (double& v : y) v = std::max(v, -kAnscombeShift - s2);
      break;
    case NoiseFamily::kSPoiss:
      for (double& v : y) v = std::max(v, -s2);
      break;
    case NoiseFamily::kWl2:
      for (double& v : y)
        if (v == -s2) v += model.eps_floor;
      break;
  }
  return y;
}

DataTerm DataTerm::make(std::span<const double> y_raw, const NoiseModel& model) {
  model.validate();
  DataTerm term;
  term.model = model;
  term.y = truncate_data(y_raw, model);
  term.mu.resize(term.y.size());
  term.beta.resize(term.y.size());
  for (std::size_t i = 0; i < term.y.size(); ++i) {
    term.beta[i] = beta_lipschitz(term.y[i], model);
    term.mu[i] = mu_curvature(term.y[i], model);
  }
  return term;
}

double exact_pg_nll_pixel(double intensity, double y, double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("exact_pg_nll: sigma must be positive");
  if (intensity < 0.0) throw std::invalid_argument("exact_pg_nll: negative Poisson intensity");
  const double s2 = sigma * sigma;
  const double log_norm = 0.5 * std::log(2.0 * std::numbers::pi * s2);
  if (intensity == 0.0) {
    // Degenerate Poisson at 0: only the n=0 term survives.
    return y * y / (2.0 * s2) + log_norm;
  }
  const double log_lam = std::log(intensity);
  auto log_term = [&](double n) {
    const double r = y - n;
    return -intensity + n * log_lam - std::lgamma(n + 1.0) - r * r / (2.0 * s2) - log_norm;
  };

  const long n0 = std::max(0L, static_cast<long>(std::ceil(y - 8.0 * sigma)));
  long n1 = static_cast<long>(std::ceil(y + 8.0 * sigma + 40.0 + 4.0 * intensity));
  n1 = std::max(n1, n0);

  std::vector<double> terms;
  terms.reserve(static_cast<std::size_t>(n1 - n0 + 8));
  double mx = -std::numeric_limits<double>::infinity();
  for (long n = n0; n <= n1; ++n) {
    terms.push_back(log_term(static_cast<double>(n)));
    mx = std::max(mx, terms.back());
  }
  // Extend until the tail is negligible relative to the largest term.
  for (long n = n1 + 1; n < n1 + 1000000; ++n) {
    const double lt = log_term(static_cast<double>(n));
    terms.push_back(lt);
    mx = std::max(mx, lt);
    if (std::exp(lt - mx) < 1e-15) break;
  }
  double sum = 0.0;
  for (double lt : terms) sum += std::exp(lt - mx);
  return -(mx + std::log(sum));
}

double exact_pg_nll(const Image& x, std::span<const double> y_raw, const LinearOperator& blur,
                    double sigma) {
  if (y_raw.size() != blur.out_dim())
    throw std::invalid_argument("exact_pg_nll: data length mismatch");
  auto hx = blur.apply(x.span());
  double total = 0.0;
  for (std::size_t i = 0; i < hx.size(); ++i)
    total += exact_pg_nll_pixel(hx[i], y_raw[i], sigma);
  return total;
}

}  // namespace pgvba
