#pragma once

#include "fsteta/fem.hpp"
#include "fsteta/theta_scheme.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace fsteta {

/// Interpolation/regularity constants entering the estimators. They are not
/// computable for a given mesh family; all default to one.
struct EstimatorConstants {
  double c1 = 1.0;  ///< Clement H1 stability.
  double c11 = 1.0; ///< Clement L2 approximation, first order.
  double C11 = 1.0; ///< Weight of ||h (-Delta_h) w|| in gamma.
  double C12 = 1.0; ///< Element residual weight in eta.
  double C22 = 1.0; ///< Facet jump weight in eta.

  /// Throws ConfigurationError unless every constant is strictly positive.
  void validate() const;
  /// Sets a constant by name ("c1", "c11", "C11", "C12", "C22").
  void set(std::string_view name, double value);
};

/// Maps a function on the previous mesh to the current one.
using Transfer = std::function<FeFunction(const FeFunction &)>;
FeFunction identity_transfer(const FeFunction &v);

/// Quadratic-in-time coefficient of the three-level reconstruction, with the
/// second differences of the discrete Laplacians (z) and of the projected data (y).
struct ThreeLevelTerms {
  FeFunction w_tilde;
  FeFunction z;
  FeFunction y;
};

/// Per-variant quantities built from a time-reconstruction coefficient w.
struct ReconstructionTerms {
  double gamma = 0.0;  ///< gamma_n(w)
  double eta = 0.0;    ///< eta_n(w)
  double norm = 0.0;   ///< ||w||
};

struct StepEstimates {
  std::size_t n = 0;
  double k = 0.0;
  double k_prev = 0.0; ///< Zero at n = 1.
  double eta_u = 0.0;  ///< eta_n(U^n)
  ReconstructionTerms two_level;
  std::optional<ReconstructionTerms> three_level; ///< Absent at n = 1.
  double norm_xi_theta = 0.0;
  double norm_xi_theta_prev = 0.0; ///< ||xi_Theta^{n-1}||, zero at n = 1.
  double delta = 0.0;
  double beta = 0.0;
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double norm_xi_phi = 0.0;
  double norm_proj_xi_phi = 0.0;
  double norm_proj_xi_phi_prev = 0.0;
  double z_norm = 0.0;
  double y_norm = 0.0;
  double compact_residual = 0.0; ///< Relative residual of the compact form.
};

/// Computes every a posteriori quantity of one step from StepRecords.
class EstimatorSet {
public:
  EstimatorSet(const FeSpace &space, const SchemeParams &params, ScalarField forcing,
               EstimatorConstants constants = {});

  const EstimatorConstants &constants() const noexcept { return constants_; }

  /// Elliptic reconstruction estimator
  /// C12 ||h^2 (-Delta_h) v|| + C22 ||h^{3/2} J[grad v]||. For P1 functions
  /// the element residual reduces to the discrete Laplacian.
  double eta(const FeFunction &v) const;
  /// Same, with (-Delta_h) v already at hand.
  double eta(const FeFunction &v, const FeFunction &laplacian) const;

  /// Linear-in-time blend of the endpoint discrete Laplacians on I_n.
  FeFunction theta_field(double t, const StepRecord &rec) const;
  /// Correction term of the discrete Laplacian, weights (alpha1, beta1).
  FeFunction xi_theta(const StepRecord &rec) const;

  /// Linear interpolant of f between t^{n-1} and t^n.
  ScalarField phi_field(const StepRecord &rec) const;
  /// Correction term of the data, weights (alpha2, beta2); constant in time.
  ScalarField xi_phi(const StepRecord &rec) const;
  /// phi(t) - xi_phi.
  ScalarField phi_hat_field(const StepRecord &rec) const;
  /// P0 xi_phi, assembled from the cached projections of f.
  FeFunction projected_xi_phi(const StepRecord &rec) const;

  /// (L^n - L^{n-1}) / k_n - (P0 f^n - P0 f^{n-1}) / k_n.
  FeFunction w_two_level(const StepRecord &rec) const;
  /// Requires rec.index >= 2 and prev.index == rec.index - 1 (UsageError otherwise).
  ThreeLevelTerms w_three_level(const StepRecord &rec, const StepRecord &prev) const;

  /// (k^2 / sqrt 30) (c1 |w|_1 + C11 ||h (-Delta_h) w||).
  double gamma(const FeFunction &w, double k) const;
  double gamma(const FeFunction &w, const FeFunction &laplacian, double k) const;

  /// Space estimator of the change U^{n-1} -> U^n. The volume part carries
  /// 1/k_n, the jump part does not.
  double delta(const StepRecord &rec) const;
  /// ||(Pi - I)(Delta_h U^{n-1} + U^{n-1} / k_n)||; zero for the identity.
  double beta_coarsening(const StepRecord &rec, const Transfer &transfer = identity_transfer) const;

  /// (1/k) int_{I_n} ||f(s) - phi(s)|| ds by 3-point Gauss in time.
  double zeta1(const StepRecord &rec) const;
  /// c11 max_j ||h (I - P0)(f^j + xi_phi)||, j in {n-1, n}.
  double zeta2(const StepRecord &rec) const;

  /// Relative L2 residual of
  ///   (U^n - U^{n-1}) / k + Theta(t^{n-1/2}) - xi_Theta = P0 phi(t^{n-1/2}) - P0 xi_phi.
  double compact_form_residual(const StepRecord &rec) const;

  /// All quantities of step rec.index; prev is required for the three-level
  /// terms and must be null at n = 1.
  StepEstimates step_estimates(const StepRecord &rec, const StepRecord *prev) const;

  /// Computable bound for ||u0 - R^0 U^0||: ||u0 - U^0|| + eta_0(U^0).
  double initial_error_bound(const ScalarField &u0, const FeFunction &U0) const;

private:
  const FeSpace *space_;
  SchemeParams params_;
  ScalarField forcing_;
  EstimatorConstants constants_;
};

/// Max defect of the four-point rule
///   beta theta g(0) + alpha (1 - theta) g(theta) + beta (1 - theta) g(1 - theta) + alpha theta g(1)
/// against int_0^1 g for g in {1, s}.
double quadrature_exactness_check(double alpha, double theta = default_theta());

enum class Variant { two_level, three_level };

/// Accumulated estimator values after step m.
struct EstimatorRow {
  std::size_t m = 0;
  double t = 0.0;
  double E_T1_two = 0.0, E_T1_three = 0.0;
  double E_T2 = 0.0, E_T3 = 0.0;
  double E_S1_two = 0.0, E_S1_three = 0.0;
  double E_S2 = 0.0, E_C = 0.0;
  double E_D1 = 0.0, E_D2 = 0.0;
  double E_ell = 0.0;
  double E_rec_two = 0.0, E_rec_three = 0.0;
  double E_m1 = 0.0;
  double total_two = 0.0, total_three = 0.0;
  double bound_two = 0.0, bound_three = 0.0;

  double total(Variant v) const { return v == Variant::two_level ? total_two : total_three; }
  double bound(Variant v) const { return v == Variant::two_level ? bound_two : bound_three; }
};

/// Running sums and maxima over the steps of one run.
///
/// Three-level terms start at n = 2; step 1 feeds its two-level values into
/// the three-level sums. E_ell includes eta_0(U^0).
class EstimatorAccumulator {
public:
  /// `initial_error` bounds ||u0 - R^0 U^0||; `eta0` is eta_0(U^0).
  EstimatorAccumulator(double eta0, double initial_error);

  /// Throws UsageError unless steps arrive in order 1, 2, ...
  void accumulate(const StepEstimates &step, double t);

  /// Values after the last accumulated step, with totals and bounds filled in.
  EstimatorRow current() const;
  const std::vector<EstimatorRow> &history() const noexcept { return history_; }

  /// CSV with one row per m; see csv_header() for the column order.
  void write_csv(std::ostream &out) const;
  static std::string_view csv_header();

private:
  EstimatorRow finalize(EstimatorRow row) const;

  double initial_error_;
  EstimatorRow row_;
  double t1_two_sq_ = 0.0, t1_three_sq_ = 0.0;
  std::vector<EstimatorRow> history_;
};

/// Writes EstimatorAccumulator::csv_header() then one "%.4e" row per entry.
void write_estimator_csv(std::ostream &out, std::span<const EstimatorRow> rows);

} // namespace fsteta
