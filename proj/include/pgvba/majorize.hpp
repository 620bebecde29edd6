#pragma once

#include "pgvba/likelihood.hpp"

namespace pgvba {

/// Minimizer of w -> T(v, w; y): v - phi'(v)/mu(y).
double w_hat(double v, double y, const NoiseModel& model);

struct VarsigmaGrid {
  double half_range = 50.0;  // scaled by max(1, |w|, |y|)
  int points = 10000;
  // Three passes keep the sup error below 1e-6 even after multiplication by
  // large curvatures mu(y).
  int refine_passes = 3;
  int refine_points = 200;
};

/// Numeric evaluation of varsigma(w; y) = sup_t( -1/2 (w-t)^2 + phi(t;y)/mu(y) )
/// by grid search with local refinement. Validation use only; the production
/// updates never need it.
double varsigma_numeric(double w, double y, const NoiseModel& model,
                        const VarsigmaGrid& grid = {});

/// Half-quadratic surrogate T(v, w; y) = mu(y) (1/2 (v-w)^2 + varsigma(w;y)).
/// Majorizes phi(v; y) for every w, with equality at w_hat(v).
double surrogate_T(double v, double w, double y, const NoiseModel& model,
                   const VarsigmaGrid& grid = {});

/// Majorant of gamma * ||D_j x||^(2 kappa):
/// Q_j = gamma (kappa dxnorm2 + (1-kappa) lambda) / lambda^(1-kappa).
double prior_majorant_Q(double dxnorm2, double lambda, double gamma, double kappa);

/// Optimal auxiliary variable: lambda_j = E[||D_j x||^2]. The expectation
/// (mean-norm plus covariance trace) is assembled by the caller.
double lambda_opt(double expected_dxnorm2);

}  // namespace pgvba
