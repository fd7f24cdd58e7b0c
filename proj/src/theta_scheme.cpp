#include "fsteta/theta_scheme.hpp"

#include "fsteta/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace fsteta {

TimeGrid::TimeGrid(std::vector<double> times) : times_(std::move(times)) {
  if (times_.size() < 2 || times_.front() != 0.0)
    throw ConfigurationError("time grid needs t^0 = 0 and at least one step");
  for (std::size_t n = 1; n < times_.size(); ++n)
    if (!(times_[n] > times_[n - 1]))
      throw ConfigurationError("time grid must increase strictly");
}

TimeGrid TimeGrid::uniform(std::size_t steps, double final_time) {
  if (steps < 1 || !(final_time > 0.0))
    throw ConfigurationError("uniform grid needs N >= 1 and T > 0");
  std::vector<double> times(steps + 1);
  for (std::size_t n = 0; n <= steps; ++n)
    times[n] = static_cast<double>(n) * final_time / static_cast<double>(steps);
  times.back() = final_time;
  return TimeGrid(std::move(times));
}

double TimeGrid::step(std::size_t n) const {
  if (n < 1 || n >= times_.size())
    throw UsageError("time step index " + std::to_string(n) + " out of range");
  return times_[n] - times_[n - 1];
}

double default_theta() { return 1.0 - std::sqrt(2.0) / 2.0; }

double default_alpha(double theta) { return (1.0 - 2.0 * theta) / (1.0 - theta); }

SchemeParams SchemeParams::standard(TimeGrid grid) {
  const double theta = default_theta();
  const double alpha = default_alpha(theta);
  return with_weights(std::move(grid), theta, alpha, alpha);
}

SchemeParams SchemeParams::with_weights(TimeGrid grid, double theta, double alpha1,
                                        double alpha2) {
  SchemeParams p{theta, 1.0 - 2.0 * theta, alpha1, 1.0 - alpha1, alpha2, 1.0 - alpha2,
                 std::move(grid)};
  p.validate();
  return p;
}

void SchemeParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0 / 3.0))
    throw ConfigurationError("theta must lie in (0, 1/3), got " + std::to_string(theta));
  if (!(alpha1 > 0.5 && alpha1 <= 1.0))
    throw ConfigurationError("alpha1 must lie in (1/2, 1], got " + std::to_string(alpha1));
  if (!(alpha2 > 0.0 && alpha2 < 1.0))
    throw ConfigurationError("alpha2 must lie in (0, 1), got " + std::to_string(alpha2));
  if (std::abs(theta_tilde - (1.0 - 2.0 * theta)) > 1e-15 ||
      std::abs(beta1 - (1.0 - alpha1)) > 1e-15 || std::abs(beta2 - (1.0 - alpha2)) > 1e-15)
    throw ConfigurationError("inconsistent theta_tilde/beta weights");
}

ThetaScheme::ThetaScheme(const FeSpace &space, SchemeParams params, ScalarField forcing)
    : space_(&space), params_(std::move(params)), forcing_(std::move(forcing)) {
  params_.validate();
  const SparseMatrix &M = space.mass();
  const SparseMatrix &K = space.stiffness();
  for (std::size_t n = 1; n <= params_.grid.num_steps(); ++n) {
    const double k = params_.grid.step(n);
    bool known = false;
    for (const auto &m : matrices_)
      known = known || m.k == k;
    if (known)
      continue;
    SparseMatrix outer = (1.0 / (params_.theta * k)) * M + params_.alpha1 * K;
    SparseMatrix middle = (1.0 / (params_.theta_tilde * k)) * M + params_.beta1 * K;
    matrices_.push_back({k, std::move(outer), std::move(middle)});
  }
}

const ThetaScheme::StepMatrices &ThetaScheme::matrices_for(double k) const {
  for (const auto &m : matrices_)
    if (m.k == k)
      return m;
  throw UsageError("no substep matrices for step size " + std::to_string(k));
}

namespace {

Vector solve_substep(const SparseMatrix &A, const Vector &b, const SolverConfig &config,
                     const char *label, std::size_t n) {
  try {
    return solve_spd(A, b, config);
  } catch (const SolverError &e) {
    throw SolverError(std::string(label) + " of step " + std::to_string(n) + ": " + e.what(),
                      e.residual());
  }
}

} // namespace

StepRecord ThetaScheme::advance(const FeFunction &prev, std::size_t n) const {
  const FeSpace &V = *space_;
  const SchemeParams &p = params_;
  if (prev.mesh_id() != V.mesh().id() || static_cast<std::size_t>(prev.size()) != V.num_dofs())
    throw UsageError("advance: previous state does not belong to the scheme's space");

  const double k = p.grid.step(n);
  const StepMatrices &mats = matrices_for(k);
  const SparseMatrix &M = V.mass();
  const SparseMatrix &K = V.stiffness();
  const SolverConfig &cfg = V.solver();

  const std::array<double, 4> times{p.grid.time(n - 1), p.t_theta(n), p.t_one_minus_theta(n),
                                    p.grid.time(n)};
  std::array<Vector, 4> loads;
  for (int i = 0; i < 4; ++i)
    loads[i] = V.load_vector(forcing_, times[i]);

  StepRecord rec;
  rec.index = n;
  rec.t_prev = times[0];
  rec.k = k;
  rec.u_prev = prev;

  const double outer_scale = 1.0 / (p.theta * k);
  const double middle_scale = 1.0 / (p.theta_tilde * k);

  Vector rhs = outer_scale * (M * prev.coeffs()) - p.beta1 * (K * prev.coeffs()) +
               p.alpha2 * loads[1] + p.beta2 * loads[0];
  rec.u_theta = V.from_coeffs(solve_substep(mats.outer, rhs, cfg, "substep 1", n));

  rhs = middle_scale * (M * rec.u_theta.coeffs()) - p.alpha1 * (K * rec.u_theta.coeffs()) +
        p.beta2 * loads[2] + p.alpha2 * loads[1];
  rec.u_onemtheta = V.from_coeffs(solve_substep(mats.middle, rhs, cfg, "substep 2", n));

  rhs = outer_scale * (M * rec.u_onemtheta.coeffs()) - p.beta1 * (K * rec.u_onemtheta.coeffs()) +
        p.alpha2 * loads[3] + p.beta2 * loads[2];
  rec.u_new = V.from_coeffs(solve_substep(mats.outer, rhs, cfg, "substep 3", n));

  rec.lap_prev = V.discrete_laplacian(rec.u_prev);
  rec.lap_theta = V.discrete_laplacian(rec.u_theta);
  rec.lap_onemtheta = V.discrete_laplacian(rec.u_onemtheta);
  rec.lap_new = V.discrete_laplacian(rec.u_new);
  for (int i = 0; i < 4; ++i)
    rec.proj_f[i] = V.solve_mass(loads[i]);
  return rec;
}

std::vector<StepRecord> ThetaScheme::run(const FeFunction &u0) const {
  std::vector<StepRecord> records;
  records.reserve(params_.grid.num_steps());
  for (std::size_t n = 1; n <= params_.grid.num_steps(); ++n)
    records.push_back(advance(n == 1 ? u0 : records.back().u_new, n));
  return records;
}

} // namespace fsteta
