#include "fsteta/errors.hpp"
#include "fsteta/estimators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <sstream>

using namespace fsteta;

namespace {

constexpr double kPi = 3.14159265358979323846;

FeSpace space_at(int level) { return FeSpace(std::make_shared<const Mesh>(Mesh::uniform(level))); }

FeFunction random_function(const FeSpace &V, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Vector c(V.num_dofs());
  for (auto &v : c)
    v = u(rng);
  return V.from_coeffs(c);
}

const ScalarField sine{[](double x, double y, double) { return std::sin(kPi * x) * std::sin(kPi * y); },
                       "sin sin"};

// Record n of a synthetic trajectory with the given states; Laplacians and
// projections are filled in consistently.
StepRecord synthetic_record(const FeSpace &V, const SchemeParams &p, std::size_t n,
                            const FeFunction &prev, const FeFunction &next,
                            const ScalarField &f = zero_field()) {
  StepRecord rec;
  rec.index = n;
  rec.t_prev = p.grid.time(n - 1);
  rec.k = p.grid.step(n);
  rec.u_prev = prev;
  rec.u_new = next;
  rec.u_theta = (1.0 - p.theta) * prev + p.theta * next;
  rec.u_onemtheta = p.theta * prev + (1.0 - p.theta) * next;
  rec.lap_prev = V.discrete_laplacian(rec.u_prev);
  rec.lap_theta = V.discrete_laplacian(rec.u_theta);
  rec.lap_onemtheta = V.discrete_laplacian(rec.u_onemtheta);
  rec.lap_new = V.discrete_laplacian(rec.u_new);
  const double times[4] = {rec.t_prev, p.t_theta(n), p.t_one_minus_theta(n), rec.t_new()};
  for (int i = 0; i < 4; ++i)
    rec.proj_f[i] = V.l2_project(f, times[i]);
  return rec;
}

// Level-1 centre hat as a pointwise field.
const ScalarField level1_hat{[](double x, double y, double) {
                               const double a = std::abs(x - 0.5), b = std::abs(y - 0.5);
                               const double d =
                                   (x - 0.5) * (y - 0.5) >= 0.0 ? std::max(a, b) : a + b;
                               return std::max(0.0, 1.0 - 2.0 * d);
                             },
                             "hat"};

} // namespace

TEST(Estimators, ZeroInputsGiveExactZeros) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const EstimatorSet E(V, p, zero_field());
  const StepRecord r1 = synthetic_record(V, p, 1, V.zero(), V.zero());
  const StepRecord r2 = synthetic_record(V, p, 2, V.zero(), V.zero());
  EXPECT_EQ(E.eta(V.zero()), 0.0);
  EXPECT_EQ(E.gamma(V.zero(), 0.25), 0.0);
  EXPECT_EQ(E.initial_error_bound(zero_field(), V.zero()), 0.0);
  const StepEstimates s = E.step_estimates(r2, &r1);
  for (double v : {s.eta_u, s.two_level.gamma, s.two_level.eta, s.two_level.norm, s.norm_xi_theta,
                   s.delta, s.beta, s.zeta1, s.zeta2, s.norm_xi_phi, s.norm_proj_xi_phi, s.z_norm,
                   s.y_norm, s.compact_residual, s.three_level->gamma, s.three_level->eta,
                   s.three_level->norm})
    EXPECT_EQ(v, 0.0);
}

TEST(Estimators, Homogeneity) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const EstimatorSet E(V, p, zero_field());
  const FeFunction w = random_function(V, 3);
  for (double c : {-3.0, 0.5, 2.0}) {
    EXPECT_NEAR(E.gamma(c * w, 0.25), std::abs(c) * E.gamma(w, 0.25), 1e-12 * E.gamma(w, 0.25));
    EXPECT_NEAR(E.eta(c * w), std::abs(c) * E.eta(w), 1e-12 * E.eta(w));
  }
  const FeFunction u = random_function(V, 4);
  const double d1 = E.delta(synthetic_record(V, p, 1, u, u + w));
  const double d2 = E.delta(synthetic_record(V, p, 1, u, u + 3.0 * w));
  EXPECT_NEAR(d2, 3.0 * d1, 1e-12 * d2);
}

TEST(Estimators, StationaryStateHasNoTimeResidual) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const ScalarField f{[](double x, double y, double) { return x * y; }, "xy"};
  const EstimatorSet E(V, p, f);
  const FeFunction u = random_function(V, 5);
  const StepRecord rec = synthetic_record(V, p, 2, u, u, f);
  EXPECT_EQ(E.w_two_level(rec).coeffs().norm(), 0.0);
  EXPECT_EQ(E.delta(rec), 0.0);
}

TEST(Estimators, ThetaFieldEndpointsAndCorrection) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const EstimatorSet E(V, p, zero_field());
  StepRecord rec = synthetic_record(V, p, 2, random_function(V, 1), random_function(V, 2));
  EXPECT_LE((E.theta_field(rec.t_prev, rec) - rec.lap_prev).coeffs().norm(), 1e-14);
  EXPECT_LE((E.theta_field(rec.t_new(), rec) - rec.lap_new).coeffs().norm(), 1e-12);
  // Intermediate states on the linear path give a vanishing correction.
  EXPECT_LE(V.l2_norm(E.xi_theta(rec)), 1e-12 * V.l2_norm(rec.lap_new));
  // Direct evaluation with perturbed intermediate Laplacians.
  const FeFunction d = random_function(V, 9);
  const FeFunction base = E.xi_theta(rec);
  rec.lap_theta += d;
  const FeFunction expected = base - (1.0 - p.theta) * p.alpha1 * d;
  EXPECT_LE((E.xi_theta(rec) - expected).coeffs().norm(), 1e-12 * d.coeffs().norm());
}

TEST(Estimators, DataCorrectionVanishesForLinearInTime) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  for (const ScalarField &f :
       {ScalarField{[](double x, double y, double) { return 3.0 + x * y; }, "const"},
        ScalarField{[](double x, double y, double t) { return (2.0 * t - 1.0) * std::sin(x + y); },
                    "linear"}}) {
    const EstimatorSet E(V, p, f);
    const StepRecord rec = synthetic_record(V, p, 3, V.zero(), V.zero(), f);
    EXPECT_LE(V.field_norm(E.xi_phi(rec), 0.0), 1e-14);
    EXPECT_LE(V.l2_norm(E.projected_xi_phi(rec)), 1e-13);
    EXPECT_LE(E.zeta1(rec), 1e-14);
    const double x = 0.3, y = 0.7, t = 0.6;
    EXPECT_NEAR(E.phi_field(rec)(x, y, t), f(x, y, t), 1e-14);
    EXPECT_NEAR(E.phi_hat_field(rec)(x, y, t), f(x, y, t), 1e-14);
  }
}

TEST(Estimators, DataCorrectionIsSecondOrderInK) {
  const FeSpace V = space_at(2);
  const ScalarField f{[](double x, double y, double t) { return std::cos(3.0 * t) * (1.0 + x * y); },
                      "f"};
  double previous = 0.0;
  for (std::size_t steps = 8; steps <= 64; steps *= 2) {
    const auto p = SchemeParams::standard(TimeGrid::uniform(steps, 1.0));
    const EstimatorSet E(V, p, f);
    const StepRecord rec = synthetic_record(V, p, 1, V.zero(), V.zero(), f);
    const double norm = V.field_norm(E.xi_phi(rec), 0.0);
    if (previous > 0.0)
      EXPECT_NEAR(std::log2(previous / norm), 2.0, 0.1);
    previous = norm;
  }
}

TEST(Estimators, DataOscillation) {
  const FeSpace V = space_at(1);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const ScalarField f{[](double x, double y, double t) { return t * level1_hat(x, y, t); }, "t hat"};
  const EstimatorSet E(V, p, f);
  const StepRecord rec = synthetic_record(V, p, 2, V.zero(), V.zero(), f);
  EXPECT_LE(E.zeta1(rec), 1e-14);
  EXPECT_LE(E.zeta2(rec), 1e-12);

  const FeSpace W = space_at(3);
  const EstimatorSet S(W, p, sine);
  EXPECT_GT(S.zeta2(synthetic_record(W, p, 2, W.zero(), W.zero(), sine)), 1e-4);
}

TEST(Estimators, ThreeLevelReconstruction) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const EstimatorSet E(V, p, zero_field());
  const FeFunction u0 = random_function(V, 1), dir = random_function(V, 2);
  // U^n = U^0 + n k V.
  const StepRecord r1 = synthetic_record(V, p, 1, u0, u0 + 0.25 * dir);
  const StepRecord r2 = synthetic_record(V, p, 2, r1.u_new, u0 + 0.5 * dir);
  const ThreeLevelTerms t = E.w_three_level(r2, r1);
  EXPECT_LE(t.w_tilde.coeffs().lpNorm<Eigen::Infinity>(), 1e-12);
  EXPECT_LE(V.l2_norm(t.z), 1e-10 * V.l2_norm(r2.lap_new));

  EXPECT_THROW(E.w_three_level(r1, r1), UsageError);
  const StepRecord r3 = synthetic_record(V, p, 3, r2.u_new, r2.u_new);
  EXPECT_THROW(E.w_three_level(r3, r1), UsageError);
  EXPECT_THROW(E.step_estimates(r2, nullptr), UsageError);
}

TEST(Estimators, SecondDifferenceCoefficients) {
  const FeSpace V = space_at(2);
  // Non-uniform grid: k_1 = 0.2, k_2 = 0.5, r = 0.4.
  const auto p = SchemeParams::standard(TimeGrid({0.0, 0.2, 0.7, 1.0}));
  const EstimatorSet E(V, p, zero_field());
  const FeFunction a = random_function(V, 1), b = random_function(V, 2), c = random_function(V, 3);
  const StepRecord r1 = synthetic_record(V, p, 1, a, b);
  const StepRecord r2 = synthetic_record(V, p, 2, b, c);
  const ThreeLevelTerms t = E.w_three_level(r2, r1);
  const double r = 0.2 / 0.5;
  const FeFunction La = V.discrete_laplacian(a), Lb = V.discrete_laplacian(b),
                   Lc = V.discrete_laplacian(c);
  const FeFunction z = 0.5 * (r * Lc - (1.0 + r) * Lb + La);
  EXPECT_LE((t.z - z).coeffs().norm(), 1e-12 * z.coeffs().norm());
  const FeFunction w = (-2.0 / 0.7) * ((1.0 / 0.5) * (c - b) - (1.0 / 0.2) * (b - a));
  EXPECT_LE((t.w_tilde - w).coeffs().norm(), 1e-12 * w.coeffs().norm());

  // Uniform steps reduce z to half the plain second difference.
  const auto q = SchemeParams::standard(TimeGrid::uniform(3, 1.0));
  const EstimatorSet F(V, q, zero_field());
  const ThreeLevelTerms u = F.w_three_level(synthetic_record(V, q, 2, b, c),
                                            synthetic_record(V, q, 1, a, b));
  const FeFunction second = 0.5 * (Lc - 2.0 * Lb + La);
  EXPECT_LE((u.z - second).coeffs().norm(), 1e-12 * second.coeffs().norm());
}

TEST(Estimators, EigenmodeTimeCoefficient) {
  const FeSpace V = space_at(3);
  const auto eig = oracle::eigenpairs(V);
  const auto p = SchemeParams::standard(TimeGrid::uniform(8, 1.0));
  const ThetaScheme scheme(V, p, zero_field());
  const EstimatorSet E(V, p, zero_field());
  const Vector v = eig.eigenvectors().col(0);
  const double lambda = eig.eigenvalues()(0);
  const StepRecord rec = scheme.advance(V.from_coeffs(v), 1);
  const FeFunction w = E.w_two_level(rec);
  const FeFunction expected = (lambda / rec.k) * (rec.u_new - rec.u_prev);
  EXPECT_LE((w - expected).coeffs().lpNorm<Eigen::Infinity>(),
            1e-9 * expected.coeffs().lpNorm<Eigen::Infinity>());
}

TEST(Estimators, CoarseningTermWithTransfers) {
  const FeSpace V = space_at(3);
  const auto p = SchemeParams::standard(TimeGrid::uniform(4, 1.0));
  const EstimatorSet E(V, p, zero_field());
  const StepRecord rec = synthetic_record(V, p, 2, random_function(V, 1), random_function(V, 2));
  EXPECT_EQ(E.beta_coarsening(rec), 0.0);
  EXPECT_EQ(E.beta_coarsening(synthetic_record(V, p, 2, V.zero(), V.zero()),
                              [](const FeFunction &v) { return 0.5 * v; }),
            0.0);

  const Transfer drop_first = [](const FeFunction &v) {
    FeFunction out = v;
    out.coeffs()(0) = 0.0;
    return out;
  };
  const FeFunction v = (1.0 / rec.k) * rec.u_prev - rec.lap_prev;
  const double direct = std::abs(v.coeffs()(0)) * std::sqrt(V.mass().coeff(0, 0));
  EXPECT_NEAR(E.beta_coarsening(rec, drop_first), direct, 1e-12 * direct);
}

TEST(Estimators, EllipticEstimatorConvergesAtSecondOrder) {
  std::vector<double> values;
  for (int level = 3; level <= 6; ++level) {
    const FeSpace V = space_at(level);
    const EstimatorSet E(V, SchemeParams::standard(TimeGrid::uniform(1, 1.0)), zero_field());
    values.push_back(E.eta(V.interpolate(sine, 0.0)));
  }
  for (std::size_t i = 1; i < values.size(); ++i)
    EXPECT_NEAR(std::log2(values[i - 1] / values[i]), 2.0, 0.15);
}

TEST(Estimators, CompactFormHoldsOnSchemeSteps) {
  const FeSpace V = space_at(3);
  const ScalarField f{[](double x, double y, double t) {
                        return std::cos(5.0 * t) * std::sin(kPi * x) * (1.0 + y * y);
                      },
                      "f"};
  for (const auto &p : {SchemeParams::standard(TimeGrid::uniform(8, 1.0)),
                        SchemeParams::with_weights(TimeGrid::uniform(8, 1.0), default_theta(), 0.8,
                                                   0.3)}) {
    const ThetaScheme scheme(V, p, f);
    const EstimatorSet E(V, p, f);
    for (const auto &rec : scheme.run(V.interpolate(sine, 0.0)))
      EXPECT_LE(E.compact_form_residual(rec), 1e-9);
  }
}

TEST(Estimators, CompactFormNeedsTheExactQuadrature) {
  const FeSpace V = space_at(3);
  const ScalarField f{[](double x, double, double t) { return std::cos(5.0 * t) * x; }, "f"};
  const auto p = SchemeParams::with_weights(TimeGrid::uniform(8, 1.0), 0.25, 0.9, 0.4);
  ASSERT_GT(quadrature_exactness_check(0.9, 0.25), 1e-3);
  const ThetaScheme scheme(V, p, f);
  const EstimatorSet E(V, p, f);
  double worst = 0.0;
  for (const auto &rec : scheme.run(V.interpolate(sine, 0.0)))
    worst = std::max(worst, E.compact_form_residual(rec));
  EXPECT_GT(worst, 1e-4);
}

TEST(Estimators, QuadratureExactness) {
  for (double alpha : {0.3, default_alpha(default_theta()), 0.9})
    EXPECT_LE(quadrature_exactness_check(alpha), 1e-14);
  EXPECT_LE(quadrature_exactness_check(0.5, 0.2), 1e-15);
  EXPECT_NEAR(quadrature_exactness_check(0.6, 0.25), 0.0125, 1e-15);
}

TEST(Estimators, Constants) {
  EstimatorConstants c;
  EXPECT_NO_THROW(c.validate());
  c.set("C22", 2.0);
  EXPECT_EQ(c.C22, 2.0);
  EXPECT_THROW(c.set("C99", 1.0), ConfigurationError);
  EXPECT_THROW(c.set("c1", 0.0), ConfigurationError);
  EXPECT_THROW(c.set("c11", -1.0), ConfigurationError);
}

TEST(Accumulator, OrderingAndHandValues) {
  EstimatorAccumulator acc(0.0, 0.0);
  StepEstimates s;
  s.n = 2;
  EXPECT_THROW(acc.accumulate(s, 1.0), UsageError);
  s.n = 1;
  s.k = 1.0;
  s.two_level.gamma = 2.0;
  acc.accumulate(s, 1.0);
  const EstimatorRow row = acc.current();
  EXPECT_DOUBLE_EQ(row.E_T1_two, 2.0);
  EXPECT_DOUBLE_EQ(row.E_T1_three, 2.0); // step 1 feeds the three-level sum
  EXPECT_DOUBLE_EQ(row.total_two, 2.0);
  EXPECT_DOUBLE_EQ(row.bound_two, 2.0);
  EXPECT_EQ(row.E_T3, 0.0);
  EXPECT_EQ(acc.history().size(), 1u);
  EXPECT_THROW(acc.accumulate(s, 2.0), UsageError);
}

TEST(Accumulator, AllZeroSteps) {
  EstimatorAccumulator acc(0.0, 0.0);
  for (std::size_t n = 1; n <= 3; ++n) {
    StepEstimates s;
    s.n = n;
    s.k = 0.25;
    if (n > 1)
      s.three_level = ReconstructionTerms{};
    acc.accumulate(s, 0.25 * static_cast<double>(n));
  }
  const EstimatorRow r = acc.current();
  for (double v : {r.E_T1_two, r.E_T1_three, r.E_T2, r.E_T3, r.E_S1_two, r.E_S1_three, r.E_S2,
                   r.E_C, r.E_D1, r.E_D2, r.E_ell, r.E_rec_two, r.E_rec_three, r.E_m1, r.total_two,
                   r.total_three, r.bound_two, r.bound_three})
    EXPECT_EQ(v, 0.0);
}

TEST(Accumulator, SumsByHand) {
  EstimatorAccumulator acc(0.5, 0.1);
  StepEstimates s1;
  s1.n = 1;
  s1.k = 0.5;
  s1.eta_u = 0.2;
  s1.two_level = {1.0, 2.0, 3.0};
  s1.norm_xi_theta = 4.0;
  s1.delta = 1.0;
  s1.zeta1 = 1.0;
  s1.zeta2 = 2.0;
  acc.accumulate(s1, 0.5);
  StepEstimates s2 = s1;
  s2.n = 2;
  s2.k_prev = 0.5;
  s2.eta_u = 0.7;
  s2.three_level = ReconstructionTerms{0.5, 1.0, 1.0};
  s2.z_norm = 2.0;
  s2.y_norm = 1.0;
  s2.norm_xi_theta_prev = 4.0;
  acc.accumulate(s2, 1.0);
  const EstimatorRow r = acc.current();
  EXPECT_DOUBLE_EQ(r.E_T1_two, std::sqrt(0.5 + 0.5));
  EXPECT_DOUBLE_EQ(r.E_T1_three, std::sqrt(0.5 + 0.5 * 0.25));
  EXPECT_DOUBLE_EQ(r.E_T2, 2.0 * 0.5 * 4.0 * 2.0);
  EXPECT_DOUBLE_EQ(r.E_S1_two, 2.0 * 0.125 * 2.0);
  EXPECT_DOUBLE_EQ(r.E_S1_three, 0.125 * 2.0 + 0.125 * 1.0);
  EXPECT_DOUBLE_EQ(r.E_S2, 2.0);
  EXPECT_DOUBLE_EQ(r.E_D1, 2.0);
  EXPECT_DOUBLE_EQ(r.E_D2, 2.0 * std::sqrt(0.5) * 2.0);
  EXPECT_DOUBLE_EQ(r.E_ell, 0.7);
  EXPECT_DOUBLE_EQ(r.E_rec_two, 0.25 / 8.0 * 5.0);
  EXPECT_DOUBLE_EQ(r.E_rec_three, 0.25 / 8.0 * 5.0);
  EXPECT_DOUBLE_EQ(r.E_T3, 0.5 * 0.5 / 2.0 * 2.0);
  EXPECT_DOUBLE_EQ(r.E_m1, 0.5 * (0.25 * 1.0 + 0.125 * 8.0));
  EXPECT_DOUBLE_EQ(r.E_C, 0.0);
  const double linear_two = r.E_T2 + r.E_S1_two + r.E_S2 + r.E_D1;
  EXPECT_DOUBLE_EQ(r.bound_two, std::sqrt(2.0) * 0.1 + r.E_T1_two +
                                    std::hypot(linear_two, r.E_D2) + r.E_rec_two + r.E_ell);
  EXPECT_DOUBLE_EQ(r.total_three, r.E_T1_three + r.E_T2 + r.E_T3 + r.E_S1_three + r.E_S2 +
                                      r.E_ell + r.E_rec_three);
}

TEST(Accumulator, CsvLayout) {
  EstimatorAccumulator acc(0.0, 0.0);
  StepEstimates s;
  s.n = 1;
  s.k = 1.0;
  s.two_level.gamma = 2.0;
  acc.accumulate(s, 1.0);
  std::ostringstream out;
  acc.write_csv(out);
  std::istringstream in(out.str());
  std::string header, row, extra;
  std::getline(in, header);
  std::getline(in, row);
  EXPECT_FALSE(std::getline(in, extra));
  EXPECT_EQ(header, EstimatorAccumulator::csv_header());
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_EQ(row.rfind("1,1.0000e+00,2.0000e+00,2.0000e+00,", 0), 0u) << row;
}
