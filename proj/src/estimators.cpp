#include "fsteta/estimators.hpp"

#include "fsteta/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace fsteta {

void EstimatorConstants::validate() const {
  for (double c : {c1, c11, C11, C12, C22})
    if (!(c > 0.0) || !std::isfinite(c))
      throw ConfigurationError("estimator constants must be positive and finite");
}

void EstimatorConstants::set(std::string_view name, double value) {
  if (name == "c1")
    c1 = value;
  else if (name == "c11")
    c11 = value;
  else if (name == "C11")
    C11 = value;
  else if (name == "C12")
    C12 = value;
  else if (name == "C22")
    C22 = value;
  else
    throw ConfigurationError("unknown estimator constant '" + std::string(name) + "'");
  validate();
}

FeFunction identity_transfer(const FeFunction &v) { return v; }

EstimatorSet::EstimatorSet(const FeSpace &space, const SchemeParams &params, ScalarField forcing,
                           EstimatorConstants constants)
    : space_(&space), params_(params), forcing_(std::move(forcing)), constants_(constants) {
  params_.validate();
  constants_.validate();
}

double EstimatorSet::eta(const FeFunction &v) const {
  return eta(v, space_->discrete_laplacian(v));
}

double EstimatorSet::eta(const FeFunction &v, const FeFunction &laplacian) const {
  return constants_.C12 * space_->weighted_element_norm(laplacian, 2.0) +
         constants_.C22 * space_->jump_norm(v, 1.5);
}

FeFunction EstimatorSet::theta_field(double t, const StepRecord &rec) const {
  const double l1 = (t - rec.t_prev) / rec.k;
  return (1.0 - l1) * rec.lap_prev + l1 * rec.lap_new;
}

FeFunction EstimatorSet::xi_theta(const StepRecord &rec) const {
  const double theta = params_.theta;
  // Theta(t^{n-1+theta}) and Theta(t^{n-theta}) in terms of the local time fraction.
  const FeFunction at_theta = (1.0 - theta) * rec.lap_prev + theta * rec.lap_new;
  const FeFunction at_one_minus = theta * rec.lap_prev + (1.0 - theta) * rec.lap_new;
  return (1.0 - theta) * (params_.alpha1 * (at_theta - rec.lap_theta) +
                          params_.beta1 * (at_one_minus - rec.lap_onemtheta));
}

ScalarField EstimatorSet::phi_field(const StepRecord &rec) const {
  const double t0 = rec.t_prev, t1 = rec.t_new(), k = rec.k;
  return {[f = forcing_.eval, t0, t1, k](double x, double y, double t) {
            const double l1 = (t - t0) / k;
            return (1.0 - l1) * f(x, y, t0) + l1 * f(x, y, t1);
          },
          "phi"};
}

ScalarField EstimatorSet::xi_phi(const StepRecord &rec) const {
  const double theta = params_.theta, a = params_.alpha2, b = params_.beta2;
  const double t0 = rec.t_prev, t1 = rec.t_new();
  const double ta = params_.t_theta(rec.index), tb = params_.t_one_minus_theta(rec.index);
  return {[f = forcing_.eval, theta, a, b, t0, t1, ta, tb](double x, double y, double) {
            const double f0 = f(x, y, t0), f1 = f(x, y, t1);
            const double phi_a = (1.0 - theta) * f0 + theta * f1;
            const double phi_b = theta * f0 + (1.0 - theta) * f1;
            return (1.0 - theta) * (a * (phi_a - f(x, y, ta)) + b * (phi_b - f(x, y, tb)));
          },
          "xi_phi"};
}

ScalarField EstimatorSet::phi_hat_field(const StepRecord &rec) const {
  return {[phi = phi_field(rec).eval, xi = xi_phi(rec).eval](double x, double y, double t) {
            return phi(x, y, t) - xi(x, y, t);
          },
          "phi_hat"};
}

FeFunction EstimatorSet::projected_xi_phi(const StepRecord &rec) const {
  const double theta = params_.theta;
  const auto &p = rec.proj_f;
  const FeFunction phi_a = (1.0 - theta) * p[0] + theta * p[3];
  const FeFunction phi_b = theta * p[0] + (1.0 - theta) * p[3];
  return (1.0 - theta) * (params_.alpha2 * (phi_a - p[1]) + params_.beta2 * (phi_b - p[2]));
}

FeFunction EstimatorSet::w_two_level(const StepRecord &rec) const {
  return (1.0 / rec.k) * ((rec.lap_new - rec.lap_prev) - (rec.proj_f[3] - rec.proj_f[0]));
}

ThreeLevelTerms EstimatorSet::w_three_level(const StepRecord &rec, const StepRecord &prev) const {
  if (rec.index < 2)
    throw UsageError("three-level reconstruction needs n >= 2");
  if (prev.index + 1 != rec.index)
    throw UsageError("three-level reconstruction needs consecutive records");
  const double k = rec.k, kp = prev.k, r = kp / k;
  ThreeLevelTerms out;
  out.w_tilde = (-2.0 / (k + kp)) * ((1.0 / k) * (rec.u_new - rec.u_prev) -
                                     (1.0 / kp) * (prev.u_new - prev.u_prev));
  out.z = 0.5 * (r * rec.lap_new - (1.0 + r) * rec.lap_prev + prev.lap_prev);
  out.y = 0.5 * (r * rec.proj_f[3] - (1.0 + r) * rec.proj_f[0] + prev.proj_f[0]);
  return out;
}

double EstimatorSet::gamma(const FeFunction &w, double k) const {
  return gamma(w, space_->discrete_laplacian(w), k);
}

double EstimatorSet::gamma(const FeFunction &w, const FeFunction &laplacian, double k) const {
  return k * k / std::sqrt(30.0) *
         (constants_.c1 * space_->h1_seminorm(w) +
          constants_.C11 * space_->weighted_element_norm(laplacian, 1.0));
}

double EstimatorSet::delta(const StepRecord &rec) const {
  const FeFunction lap_change = (1.0 / rec.k) * (rec.lap_new - rec.lap_prev);
  return constants_.C12 * space_->weighted_element_norm(lap_change, 2.0) +
         constants_.C22 * space_->jump_norm(rec.u_new - rec.u_prev, 1.5);
}

double EstimatorSet::beta_coarsening(const StepRecord &rec, const Transfer &transfer) const {
  const FeFunction v = (1.0 / rec.k) * rec.u_prev - rec.lap_prev;
  return space_->l2_norm(transfer(v) - v);
}

double EstimatorSet::zeta1(const StepRecord &rec) const {
  const double t0 = rec.t_prev, t1 = rec.t_new();
  double integral = 0.0;
  for (const auto &g : gauss3_unit_interval()) {
    const double s = g.node;
    const ScalarField diff{[f = forcing_.eval, t0, t1, s](double x, double y, double t) {
                             return f(x, y, t) - (1.0 - s) * f(x, y, t0) - s * f(x, y, t1);
                           },
                           "f - phi"};
    integral += g.weight * space_->field_norm(diff, t0 + s * rec.k);
  }
  return integral;
}

double EstimatorSet::zeta2(const StepRecord &rec) const {
  const ScalarField xi = xi_phi(rec);
  const FeFunction proj_xi = projected_xi_phi(rec);
  double worst = 0.0;
  for (const double t : {rec.t_prev, rec.t_new()}) {
    const ScalarField g{[f = forcing_.eval, xi = xi.eval, t](double x, double y, double) {
                          return f(x, y, t) + xi(x, y, t);
                        },
                        "f + xi_phi"};
    const FeFunction &proj_f = t == rec.t_prev ? rec.proj_f[0] : rec.proj_f[3];
    worst = std::max(worst, space_->weighted_field_error(g, t, proj_f + proj_xi, 1.0));
  }
  return constants_.c11 * worst;
}

double EstimatorSet::compact_form_residual(const StepRecord &rec) const {
  const FeFunction difference = (1.0 / rec.k) * (rec.u_new - rec.u_prev);
  const FeFunction theta_mid = theta_field(rec.t_prev + 0.5 * rec.k, rec);
  const FeFunction phi_mid = 0.5 * (rec.proj_f[0] + rec.proj_f[3]);
  const FeFunction residual =
      difference + theta_mid - xi_theta(rec) - (phi_mid - projected_xi_phi(rec));
  const double scale =
      space_->l2_norm(difference) + space_->l2_norm(theta_mid) + space_->l2_norm(phi_mid);
  const double norm = space_->l2_norm(residual);
  return scale > 0.0 ? norm / scale : norm;
}

StepEstimates EstimatorSet::step_estimates(const StepRecord &rec, const StepRecord *prev) const {
  StepEstimates out;
  out.n = rec.index;
  out.k = rec.k;
  out.eta_u = eta(rec.u_new, rec.lap_new);

  const FeFunction w = w_two_level(rec);
  const FeFunction lap_w = space_->discrete_laplacian(w);
  out.two_level = {gamma(w, lap_w, rec.k), eta(w, lap_w), space_->l2_norm(w)};

  out.norm_xi_theta = space_->l2_norm(xi_theta(rec));
  out.delta = delta(rec);
  out.beta = beta_coarsening(rec);
  out.zeta1 = zeta1(rec);
  out.zeta2 = zeta2(rec);
  out.norm_xi_phi = space_->field_norm(xi_phi(rec), rec.t_prev);
  out.norm_proj_xi_phi = space_->l2_norm(projected_xi_phi(rec));
  out.compact_residual = compact_form_residual(rec);

  if (rec.index >= 2) {
    if (prev == nullptr)
      throw UsageError("step_estimates: step " + std::to_string(rec.index) +
                       " needs the previous record");
    const ThreeLevelTerms three = w_three_level(rec, *prev);
    const FeFunction lap_wt = space_->discrete_laplacian(three.w_tilde);
    out.three_level = ReconstructionTerms{gamma(three.w_tilde, lap_wt, rec.k),
                                          eta(three.w_tilde, lap_wt),
                                          space_->l2_norm(three.w_tilde)};
    out.k_prev = prev->k;
    out.z_norm = space_->l2_norm(three.z);
    out.y_norm = space_->l2_norm(three.y);
    out.norm_xi_theta_prev = space_->l2_norm(xi_theta(*prev));
    out.norm_proj_xi_phi_prev = space_->l2_norm(projected_xi_phi(*prev));
  }
  return out;
}

double EstimatorSet::initial_error_bound(const ScalarField &u0, const FeFunction &U0) const {
  return space_->field_error_l2(u0, 0.0, U0) + eta(U0);
}

double quadrature_exactness_check(double alpha, double theta) {
  const double beta = 1.0 - alpha;
  const double theta_tilde = 1.0 - 2.0 * theta;
  auto rule = [&](auto g) {
    return beta * theta * g(0.0) + alpha * (theta + theta_tilde) * g(theta) +
           beta * (theta + theta_tilde) * g(1.0 - theta) + alpha * theta * g(1.0);
  };
  const double constant = std::abs(rule([](double) { return 1.0; }) - 1.0);
  const double linear = std::abs(rule([](double s) { return s; }) - 0.5);
  return std::max(constant, linear);
}

// ---------------------------------------------------------------------------
// EstimatorAccumulator

EstimatorAccumulator::EstimatorAccumulator(double eta0, double initial_error)
    : initial_error_(initial_error) {
  row_.E_ell = eta0;
}

void EstimatorAccumulator::accumulate(const StepEstimates &s, double t) {
  if (s.n != row_.m + 1)
    throw UsageError("estimator steps out of order: expected " + std::to_string(row_.m + 1) +
                     ", got " + std::to_string(s.n));
  const double k = s.k;
  const ReconstructionTerms &two = s.two_level;
  const ReconstructionTerms &three = s.three_level ? *s.three_level : two;

  row_.m = s.n;
  row_.t = t;
  t1_two_sq_ += k * two.gamma * two.gamma;
  t1_three_sq_ += k * three.gamma * three.gamma;
  row_.E_T1_two = std::sqrt(t1_two_sq_);
  row_.E_T1_three = std::sqrt(t1_three_sq_);
  row_.E_T2 += 2.0 * k * s.norm_xi_theta;
  row_.E_S1_two += 0.5 * k * k * two.eta;
  row_.E_S1_three += 0.5 * k * k * three.eta;
  row_.E_S2 += 2.0 * k * s.delta;
  row_.E_C += 2.0 * k * s.beta;
  row_.E_D1 += 2.0 * k * (s.zeta1 + s.norm_xi_phi);
  row_.E_D2 += std::sqrt(k) * s.zeta2;
  row_.E_ell = std::max(row_.E_ell, s.eta_u);
  row_.E_rec_two = std::max(row_.E_rec_two, k * k / 8.0 * (two.eta + two.norm));
  row_.E_rec_three = std::max(row_.E_rec_three, k * k / 8.0 * (three.eta + three.norm));
  if (s.three_level) {
    const double weight = k / (2.0 * (k + s.k_prev));
    row_.E_T3 += k * weight * s.z_norm;
    row_.E_m1 += k * (weight * s.y_norm + k / 4.0 * (s.norm_xi_theta + s.norm_xi_theta_prev) +
                      k / 4.0 * (s.norm_proj_xi_phi + s.norm_proj_xi_phi_prev));
  }
  history_.push_back(finalize(row_));
}

EstimatorRow EstimatorAccumulator::finalize(EstimatorRow r) const {
  r.total_two = r.E_T1_two + r.E_T2 + r.E_S1_two + r.E_S2 + r.E_ell + r.E_rec_two;
  r.total_three = r.E_T1_three + r.E_T2 + r.E_T3 + r.E_S1_three + r.E_S2 + r.E_ell + r.E_rec_three;
  const double initial = std::sqrt(2.0) * initial_error_;
  const double linear_two = r.E_T2 + r.E_S1_two + r.E_S2 + r.E_C + r.E_D1;
  const double linear_three =
      r.E_T2 + r.E_T3 + r.E_S1_three + r.E_S2 + r.E_C + r.E_D1 + r.E_m1;
  r.bound_two = initial + r.E_T1_two + std::hypot(linear_two, r.E_D2) + r.E_rec_two + r.E_ell;
  r.bound_three =
      initial + r.E_T1_three + std::hypot(linear_three, r.E_D2) + r.E_rec_three + r.E_ell;
  return r;
}

EstimatorRow EstimatorAccumulator::current() const { return finalize(row_); }

std::string_view EstimatorAccumulator::csv_header() {
  return "m,t,E_T1_two,E_T1_three,E_T2,E_T3,E_S1_two,E_S1_three,E_S2,E_C,E_D1,E_D2,E_ell,"
         "E_rec_two,E_rec_three,E_m1,total_two,total_three,bound_two,bound_three";
}

void EstimatorAccumulator::write_csv(std::ostream &out) const {
  write_estimator_csv(out, history_);
}

void write_estimator_csv(std::ostream &out, std::span<const EstimatorRow> rows) {
  out << EstimatorAccumulator::csv_header() << '\n';
  char buf[32];
  for (const auto &r : rows) {
    out << r.m;
    for (double v : {r.t, r.E_T1_two, r.E_T1_three, r.E_T2, r.E_T3, r.E_S1_two, r.E_S1_three,
                     r.E_S2, r.E_C, r.E_D1, r.E_D2, r.E_ell, r.E_rec_two, r.E_rec_three, r.E_m1,
                     r.total_two, r.total_three, r.bound_two, r.bound_three}) {
      std::snprintf(buf, sizeof buf, ",%.4e", v);
      out << buf;
    }
    out << '\n';
  }
}

} // namespace fsteta
