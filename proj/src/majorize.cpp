#include "pgvba/majorize.hpp"

#include <algorithm>
#include <cmath>

namespace pgvba {

double w_hat(double v, double y, const NoiseModel& model) {
  return v - dphi(v, y, model) / mu_curvature(y, model);
}

namespace {

// Best value and location of f on a uniform grid.
std::pair<double, double> grid_max(double lo, double hi, int points,
                                   const auto& f) {
  double best_v = -std::numeric_limits<double>::infinity();
  double best_t = lo;
  const double step = (hi - lo) / points;
  for (int i = 0; i <= points; ++i) {
    const double t = lo + step * i;
    const double v = f(t);
    if (v > best_v) {
      best_v = v;
      best_t = t;
    }
  }
  return {best_v, best_t};
}

}  // namespace

double varsigma_numeric(double w, double y, const NoiseModel& model, const VarsigmaGrid& grid) {
  const double mu = mu_curvature(y, model);
  auto objective = [&](double t) {
    const double d = w - t;
    return -0.5 * d * d + phi(t, y, model) / mu;
  };
  const double scale = std::max({1.0, std::abs(w), std::abs(y)});
  double lo = w - grid.half_range * scale;
  double hi = w + grid.half_range * scale;
  auto [best, t_star] = grid_max(lo, hi, grid.points, objective);
  double step = (hi - lo) / grid.points;
  for (int pass = 0; pass < grid.refine_passes; ++pass) {
    auto [v, t] = grid_max(t_star - step, t_star + step, grid.refine_points, objective);
    if (v > best) {
      best = v;
      t_star = t;
    }
    step = 2.0 * step / grid.refine_points;
  }
  return best;
}

double surrogate_T(double v, double w, double y, const NoiseModel& model,
                   const VarsigmaGrid& grid) {
  const double mu = mu_curvature(y, model);
  const double d = v - w;
  return mu * (0.5 * d * d + varsigma_numeric(w, y, model, grid));
}

double prior_majorant_Q(double dxnorm2, double lambda, double gamma, double kappa) {
  if (!(lambda > 0.0)) throw std::invalid_argument("prior_majorant_Q: lambda must be positive");
  if (!(gamma > 0.0)) throw std::invalid_argument("prior_majorant_Q: gamma must be positive");
  if (dxnorm2 < 0.0) throw std::invalid_argument("prior_majorant_Q: negative norm");
  if (!(kappa > 0.0 && kappa <= 1.0))
    throw std::invalid_argument("prior_majorant_Q: kappa must lie in (0,1]");
  return gamma * (kappa * dxnorm2 + (1.0 - kappa) * lambda) * std::pow(lambda, kappa - 1.0);
}

double lambda_opt(double expected_dxnorm2) {
  if (expected_dxnorm2 < 0.0)
    throw std::invalid_argument("lambda_opt: negative expectation signals a broken covariance");
  return expected_dxnorm2;
}

}  // namespace pgvba
