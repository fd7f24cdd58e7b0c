#pragma once

#include "fsteta/estimators.hpp"
#include "fsteta/fem.hpp"
#include "fsteta/theta_scheme.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fsteta {

/// Manufactured solution of u_t - Delta u = f on the unit square with zero
/// boundary values.
struct CaseSpec {
  int case_id = 0;
  std::string description;
  ScalarField exact_u;
  GradientField exact_grad_u;
  ScalarField forcing;
  ScalarField u0;
};

/// Case 1: sin(pi t) sin(pi x) sin(pi y).
/// Case 2: sin(15 pi t) sin(pi x) sin(pi y), fast in time.
/// Case 3: sin(pi t / 2) sin(10 pi x) sin(10 pi y), fast in space.
/// Throws UsageError for any other id.
CaseSpec make_case(int case_id);

/// u = 0, f = 0; every error and estimator must vanish.
CaseSpec zero_case();

struct ErrorMetrics {
  double max_nodal_l2_error = 0.0;       ///< max_n ||u(t^n) - U^n||
  double e_total = 0.0;                  ///< (max_n ||e^n||^2 + sum_n k_n ||grad e^n||^2)^(1/2)
  std::vector<double> nodal_l2_errors;   ///< ||e^n||, n = 0..N
};

ErrorMetrics error_metrics(const FeSpace &space, const TimeGrid &grid, const FeFunction &U0,
                           const std::vector<StepRecord> &trajectory, const CaseSpec &c);

/// log(E(i+1)/E(i)) / log(h(i+1)/h(i)). Throws UsageError on length mismatch,
/// fewer than two entries, or nonpositive input.
std::vector<double> eoc(std::span<const double> values, std::span<const double> meshsizes);

struct StudyOptions {
  double final_time = 1.0;
  /// Unset selects 1 - sqrt(2)/2.
  std::optional<double> theta;
  /// Unset selects (1 - 2 theta) / (1 - theta).
  std::optional<double> alpha1;
  std::optional<double> alpha2;
  EstimatorConstants constants;
  double solver_tolerance = 1e-12;
};

struct RunReport {
  int level = 0;
  double h = 0.0;        ///< Grid spacing 2^-level (the tables' "h = k").
  double diameter = 0.0; ///< Element diameter sqrt(2) 2^-level.
  double k = 0.0;
  std::size_t steps = 0;
  double max_nodal_l2_error = 0.0;
  double e_total = 0.0;
  EstimatorRow estimators;               ///< Values at t^N.
  std::vector<EstimatorRow> history;     ///< One row per m.
  std::vector<double> nodal_l2_errors;   ///< n = 0..N
  double effectivity_two = 0.0;
  double effectivity_three = 0.0;
  double max_compact_residual = 0.0;
};

/// One level: h = k = 2^-level, N = T / k steps.
RunReport run_level(const CaseSpec &c, int level, const StudyOptions &options = {});

/// Levels level_min..level_max in order. `on_report` sees each report as soon
/// as its level finishes, so callers can flush partial results.
std::vector<RunReport> run_study(const CaseSpec &c, int level_min, int level_max,
                                 const StudyOptions &options = {},
                                 const std::function<void(const RunReport &)> &on_report = {});

enum class TableFormat { csv, markdown };
enum class VariantSelection { two, three, both };

struct Table {
  std::string name;  ///< File stem.
  std::string title;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

/// Errors, reconstruction, time and space tables with EOC columns.
std::vector<Table> build_tables(const std::vector<RunReport> &reports,
                                VariantSelection variant = VariantSelection::both);
std::string render(const Table &table, TableFormat format);

/// Writes <out>/<table>.{csv,md} for the four tables plus
/// <out>/estimators_L<level>.csv per report. Throws std::runtime_error when
/// the directory cannot be written.
void emit(const std::vector<RunReport> &reports, TableFormat format,
          const std::filesystem::path &out_dir, VariantSelection variant = VariantSelection::both);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Reliability of the theorem-form bounds for every case; convergence orders
/// and effectivity drift for case 1 on levels >= 4.
std::vector<CheckResult> check_reports(const std::vector<RunReport> &reports, int case_id);

} // namespace fsteta
