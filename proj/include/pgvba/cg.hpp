#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace pgvba {

/// Symmetric positive definite system given as a matrix-free apply, with an
/// optional diagonal for Jacobi preconditioning.
struct SpdSystem {
  std::size_t dim = 0;
  std::function<void(std::span<const double>, std::span<double>)> apply;
  std::vector<double> jacobi_diag;  // empty = unpreconditioned
};

struct CgParams {
  double rel_tol = 1e-6;
  int max_iters = 500;
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double rel_residual = 0.0;  // ||b - Ax|| / ||b||
  bool converged = false;
};

/// (Preconditioned) conjugate gradient. Stops when the residual ratio drops
/// below rel_tol or max_iters is reached (reported, not fatal). Throws on
/// non-finite values, which signal an indefinite or broken system.
CgResult cg_solve(const SpdSystem& system, std::span<const double> rhs,
                  const CgParams& params = {}, std::span<const double> x0 = {});

}  // namespace pgvba
