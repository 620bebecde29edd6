#include "pgvba/cg.hpp"

#include <cmath>
#include <stdexcept>

#include "pgvba/image.hpp"

namespace pgvba {

CgResult cg_solve(const SpdSystem& system, std::span<const double> rhs, const CgParams& params,
                  std::span<const double> x0) {
  const std::size_t n = system.dim;
  if (rhs.size() != n) throw std::invalid_argument("cg_solve: rhs length mismatch");
  if (!x0.empty() && x0.size() != n) throw std::invalid_argument("cg_solve: x0 length mismatch");
  if (!(params.rel_tol > 0.0) || params.max_iters < 1)
    throw std::invalid_argument("cg_solve: invalid parameters");
  const bool precond = !system.jacobi_diag.empty();
  if (precond && system.jacobi_diag.size() != n)
    throw std::invalid_argument("cg_solve: jacobi diagonal length mismatch");

  CgResult result;
  result.x.assign(n, 0.0);
  const double rhs_norm = norm(rhs);
  if (rhs_norm == 0.0) {
    result.converged = true;
    return result;
  }

  std::vector<double> r(rhs.begin(), rhs.end());
  if (!x0.empty()) {
    std::copy(x0.begin(), x0.end(), result.x.begin());
    std::vector<double> ax(n);
    system.apply(result.x, ax);
    for (std::size_t i = 0; i < n; ++i) r[i] -= ax[i];
  }

  auto precondition = [&](const std::vector<double>& v) {
    std::vector<double> z(v);
    if (precond)
      for (std::size_t i = 0; i < n; ++i) z[i] /= system.jacobi_diag[i];
    return z;
  };

  std::vector<double> z = precondition(r);
  std::vector<double> p = z;
  std::vector<double> ap(n);
  double rz = dot(r, z);
  double res = norm(r);
  if (!std::isfinite(res)) throw std::runtime_error("cg_solve: non-finite residual");

  while (res / rhs_norm > params.rel_tol && result.iterations < params.max_iters) {
    system.apply(p, ap);
    const double pap = dot(p, ap);
    if (!std::isfinite(pap) || pap <= 0.0)
      throw std::runtime_error("cg_solve: system is not positive definite");
    const double alpha = rz / pap;
    for (std::size_t i = 0; i < n; ++i) {
      result.x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    res = norm(r);
    if (!std::isfinite(res)) throw std::runtime_error("cg_solve: non-finite residual");
    z = precondition(r);
    const double rz_new = dot(r, z);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
    ++result.iterations;
  }

  result.rel_residual = res / rhs_norm;
  result.converged = result.rel_residual <= params.rel_tol;
  return result;
}

}  // namespace pgvba
