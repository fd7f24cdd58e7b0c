#include "fsteta/linear_solver.hpp"

#include "fsteta/errors.hpp"

#include <cassert>
#include <cmath>
#include <string>

namespace fsteta {

void SolverConfig::validate() const {
  if (!(rel_tolerance > 0.0 && rel_tolerance <= 1e-6))
    throw ConfigurationError("solver rel_tolerance must lie in (0, 1e-6], got " +
                             std::to_string(rel_tolerance));
}

Vector solve_spd(const SparseMatrix &A, const Vector &b, const SolverConfig &config) {
  config.validate();
  const Eigen::Index n = A.rows();
  if (A.cols() != n || b.size() != n)
    throw UsageError("solve_spd: dimension mismatch (" + std::to_string(A.rows()) + "x" +
                     std::to_string(A.cols()) + " vs " + std::to_string(b.size()) + ")");

  Vector x = Vector::Zero(n);
  const double b_norm = b.norm();
  if (b_norm == 0.0)
    return x;

  Vector inv_diag = Vector::Ones(n);
  if (config.preconditioner == Preconditioner::diagonal) {
    const Vector diag = A.diagonal();
    for (Eigen::Index i = 0; i < n; ++i)
      inv_diag[i] = diag[i] > 0.0 ? 1.0 / diag[i] : 1.0;
  }

  const std::size_t max_it =
      config.max_iterations > 0 ? config.max_iterations : 10 * static_cast<std::size_t>(n);
  const double target = config.rel_tolerance * b_norm;

  Vector r = b;
  Vector z = inv_diag.cwiseProduct(r);
  Vector p = z;
  Vector Ap(n);
  double rz = r.dot(z);

  for (std::size_t it = 0; it < max_it; ++it) {
    Ap.noalias() = A * p;
    const double pAp = p.dot(Ap);
    if (!(pAp > 0.0))
      throw SolverError("solve_spd: matrix is not positive definite", r.norm() / b_norm);
    const double step = rz / pAp;
    x.noalias() += step * p;
    r.noalias() -= step * Ap;

    if (r.norm() <= target) {
      // The recursive residual drifts; confirm with the true one.
      r = b - A * x;
      if (r.norm() <= target)
        return x;
      z = inv_diag.cwiseProduct(r);
      p = z;
      rz = r.dot(z);
      continue;
    }

    z = inv_diag.cwiseProduct(r);
    const double rz_next = r.dot(z);
    p = z + (rz_next / rz) * p;
    rz = rz_next;
  }

  const double residual = (b - A * x).norm() / b_norm;
  throw SolverError("solve_spd: no convergence after " + std::to_string(max_it) +
                        " iterations (relative residual " + std::to_string(residual) + ")",
                    residual);
}

} // namespace fsteta
