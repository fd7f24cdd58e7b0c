#pragma once

// Independent reference computations shared by the unit and acceptance tests.

#include "fsteta/fem.hpp"
#include "fsteta/theta_scheme.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>

namespace fsteta::oracle {

/// Decay factor of one fractional-step theta step applied to a (K, M)
/// eigenmode with eigenvalue lambda and f = 0.
inline double scalar_step_factor(double lambda, double k, const SchemeParams &p) {
  const double a = 1.0 / (p.theta * k), b = 1.0 / (p.theta_tilde * k);
  const double outer = (a - p.beta1 * lambda) / (a + p.alpha1 * lambda);
  const double middle = (b - p.alpha1 * lambda) / (b + p.beta1 * lambda);
  return outer * middle * outer;
}

/// Stiffness entry from the cotangent formula: K_ij = -cot(angle opposite ij) / 2.
inline LocalMatrix cotangent_stiffness(const std::array<Point, 3> &p) {
  LocalMatrix K{};
  for (int m = 0; m < 3; ++m) {
    const int i = (m + 1) % 3, j = (m + 2) % 3;
    const double ux = p[i].x - p[m].x, uy = p[i].y - p[m].y;
    const double vx = p[j].x - p[m].x, vy = p[j].y - p[m].y;
    const double cot = (ux * vx + uy * vy) / std::abs(ux * vy - uy * vx);
    K[i][j] = K[j][i] = -0.5 * cot;
  }
  for (int i = 0; i < 3; ++i)
    K[i][i] = -(K[i][(i + 1) % 3] + K[i][(i + 2) % 3]);
  return K;
}

/// Mass entries by the edge-midpoint rule, exact for quadratics.
inline LocalMatrix midpoint_mass(const std::array<Point, 3> &p) {
  const double area =
      0.5 * std::abs((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
  // Barycentric coordinates of the three edge midpoints.
  const double mids[3][3] = {{0.5, 0.5, 0.0}, {0.0, 0.5, 0.5}, {0.5, 0.0, 0.5}};
  LocalMatrix M{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (const auto &q : mids)
        M[i][j] += area / 3.0 * q[i] * q[j];
  return M;
}

/// Dense generalized eigenpairs K v = lambda M v, ascending, M-orthonormal.
inline Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eigenpairs(const FeSpace &space) {
  const Eigen::MatrixXd K = Eigen::MatrixXd(space.stiffness());
  const Eigen::MatrixXd M = Eigen::MatrixXd(space.mass());
  return Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd>(K, M);
}

} // namespace fsteta::oracle
