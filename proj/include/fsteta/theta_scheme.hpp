#pragma once

#include "fsteta/fem.hpp"

#include <array>
#include <cstddef>
#include <vector>

namespace fsteta {

/// Time levels 0 = t^0 < t^1 < ... < t^N = T.
class TimeGrid {
public:
  /// Throws ConfigurationError unless the levels start at 0 and increase strictly.
  explicit TimeGrid(std::vector<double> times);

  /// t^n = n T / N, k_n = T / N.
  static TimeGrid uniform(std::size_t steps, double final_time);

  std::size_t num_steps() const noexcept { return times_.size() - 1; }
  double time(std::size_t n) const { return times_.at(n); }
  /// k_n = t^n - t^{n-1}, n >= 1.
  double step(std::size_t n) const;
  double final_time() const noexcept { return times_.back(); }
  const std::vector<double> &times() const noexcept { return times_; }

private:
  std::vector<double> times_;
};

inline TimeGrid make_uniform_grid(std::size_t steps, double final_time) {
  return TimeGrid::uniform(steps, final_time);
}

/// theta = 1 - sqrt(2)/2.
double default_theta();
/// (1 - 2 theta) / (1 - theta), the classical splitting weight.
double default_alpha(double theta);

/// Weights of the fractional-step theta scheme together with its time grid.
struct SchemeParams {
  double theta;
  double theta_tilde;
  double alpha1, beta1;
  double alpha2, beta2;
  TimeGrid grid;

  /// Default weights on the given grid: theta = 1 - sqrt(2)/2 and
  /// alpha1 = alpha2 = (1 - 2 theta) / (1 - theta).
  static SchemeParams standard(TimeGrid grid);
  /// Explicit weights; beta_i = 1 - alpha_i and theta_tilde = 1 - 2 theta.
  static SchemeParams with_weights(TimeGrid grid, double theta, double alpha1, double alpha2);

  /// Throws ConfigurationError unless theta is in (0, 1/3), alpha1 in (1/2, 1]
  /// and alpha2 in (0, 1), with consistent betas and theta_tilde.
  void validate() const;

  /// t^{n-1+theta}.
  double t_theta(std::size_t n) const { return grid.time(n - 1) + theta * grid.step(n); }
  /// t^{n-theta}.
  double t_one_minus_theta(std::size_t n) const {
    return grid.time(n - 1) + (theta + theta_tilde) * grid.step(n);
  }
};

/// Everything one time step produces. Laplacian fields hold (-Delta_h) applied
/// to the corresponding state; proj_f holds P0 f at t^{n-1}, t^{n-1+theta},
/// t^{n-theta} and t^n, in that order.
struct StepRecord {
  std::size_t index = 0;
  double t_prev = 0.0;
  double k = 0.0;
  FeFunction u_prev, u_theta, u_onemtheta, u_new;
  FeFunction lap_prev, lap_theta, lap_onemtheta, lap_new;
  std::array<FeFunction, 4> proj_f;

  double t_new() const { return t_prev + k; }
};

/// Galerkin fractional-step theta scheme on a fixed mesh (all transfer
/// operators are the identity).
class ThetaScheme {
public:
  ThetaScheme(const FeSpace &space, SchemeParams params, ScalarField forcing);

  const FeSpace &space() const noexcept { return *space_; }
  const SchemeParams &params() const noexcept { return params_; }
  const ScalarField &forcing() const noexcept { return forcing_; }

  /// Three substeps from U^{n-1} = prev to U^n. SolverError messages name the
  /// failing substep.
  StepRecord advance(const FeFunction &prev, std::size_t n) const;

  /// N records, each starting from the previous U^n.
  std::vector<StepRecord> run(const FeFunction &u0) const;

private:
  struct StepMatrices {
    double k;
    SparseMatrix outer;  // M / (theta k) + alpha1 K
    SparseMatrix middle; // M / (theta_tilde k) + beta1 K
  };
  const StepMatrices &matrices_for(double k) const;

  const FeSpace *space_;
  SchemeParams params_;
  ScalarField forcing_;
  std::vector<StepMatrices> matrices_;
};

} // namespace fsteta
