#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>

namespace fsteta {

using Vector = Eigen::VectorXd;
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

enum class Preconditioner { none, diagonal };

struct SolverConfig {
  double rel_tolerance = 1e-12;
  /// 0 selects 10 * dimension.
  std::size_t max_iterations = 0;
  Preconditioner preconditioner = Preconditioner::diagonal;

  /// Throws ConfigurationError unless rel_tolerance is in (0, 1e-6].
  void validate() const;
};

/// Preconditioned conjugate gradients for symmetric positive-definite A.
///
/// Returns x with ||Ax - b||_2 <= rel_tolerance * ||b||_2. A zero right-hand
/// side returns exactly zero. Throws SolverError (carrying the final relative
/// residual) when max_iterations is exhausted and UsageError on a dimension
/// mismatch. Summation order is fixed, so repeated calls are bitwise identical.
Vector solve_spd(const SparseMatrix &A, const Vector &b, const SolverConfig &config = {});

} // namespace fsteta
