#include "fsteta/fem.hpp"

#include "fsteta/errors.hpp"

#include <cmath>
#include <ostream>
#include <vector>

namespace fsteta {

ScalarField zero_field() {
  return {[](double, double, double) { return 0.0; }, "zero"};
}

// ---------------------------------------------------------------------------
// FeFunction

namespace {

void require_same_mesh(const FeFunction &a, const FeFunction &b) {
  if (a.mesh_id() != b.mesh_id() || a.size() != b.size())
    throw UsageError("FE functions live on different meshes");
}

std::array<double, 3> barycentric_gradient_x(const std::array<Point, 3> &p, double two_area) {
  return {(p[1].y - p[2].y) / two_area, (p[2].y - p[0].y) / two_area,
          (p[0].y - p[1].y) / two_area};
}

std::array<double, 3> barycentric_gradient_y(const std::array<Point, 3> &p, double two_area) {
  return {(p[2].x - p[1].x) / two_area, (p[0].x - p[2].x) / two_area,
          (p[1].x - p[0].x) / two_area};
}

double signed_area(const std::array<Point, 3> &p) {
  return 0.5 * ((p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y));
}

std::array<Point, 3> corners(const Mesh &mesh, std::size_t tri) {
  const auto &t = mesh.triangles()[tri];
  return {mesh.vertices()[t[0]], mesh.vertices()[t[1]], mesh.vertices()[t[2]]};
}

} // namespace

FeFunction &FeFunction::operator+=(const FeFunction &other) {
  require_same_mesh(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

FeFunction &FeFunction::operator-=(const FeFunction &other) {
  require_same_mesh(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

FeFunction &FeFunction::operator*=(double s) {
  coeffs_ *= s;
  return *this;
}

void FeFunction::write_text(std::ostream &out) const {
  const auto precision = out.precision(17);
  for (Eigen::Index i = 0; i < coeffs_.size(); ++i)
    out << coeffs_[i] << '\n';
  out.precision(precision);
}

FeFunction operator+(FeFunction a, const FeFunction &b) { return a += b; }
FeFunction operator-(FeFunction a, const FeFunction &b) { return a -= b; }
FeFunction operator*(double s, FeFunction a) { return a *= s; }
FeFunction operator*(FeFunction a, double s) { return a *= s; }

// ---------------------------------------------------------------------------
// Local matrices and assembly

LocalMatrix local_mass(const std::array<Point, 3> &p) {
  const double area = std::abs(signed_area(p));
  LocalMatrix m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  return m;
}

LocalMatrix local_stiffness(const std::array<Point, 3> &p) {
  const double area = signed_area(p);
  const auto gx = barycentric_gradient_x(p, 2.0 * area);
  const auto gy = barycentric_gradient_y(p, 2.0 * area);
  LocalMatrix k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      k[i][j] = std::abs(area) * (gx[i] * gx[j] + gy[i] * gy[j]);
  return k;
}

namespace {

template <class LocalFn>
SparseMatrix assemble(const Mesh &mesh, DofScope scope, LocalFn local) {
  const bool all = scope == DofScope::all_vertices;
  const auto n = static_cast<Eigen::Index>(all ? mesh.num_vertices() : mesh.num_dofs());
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const auto &tri = mesh.triangles()[t];
    const LocalMatrix a = local(corners(mesh, t));
    for (int i = 0; i < 3; ++i) {
      const int row = all ? tri[i] : mesh.dof_map()[tri[i]];
      if (row < 0)
        continue;
      for (int j = 0; j < 3; ++j) {
        const int col = all ? tri[j] : mesh.dof_map()[tri[j]];
        if (col >= 0)
          triplets.emplace_back(row, col, a[i][j]);
      }
    }
  }
  SparseMatrix matrix(n, n);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return matrix;
}

} // namespace

SparseMatrix assemble_mass(const Mesh &mesh, DofScope scope) {
  return assemble(mesh, scope, local_mass);
}

SparseMatrix assemble_stiffness(const Mesh &mesh, DofScope scope) {
  return assemble(mesh, scope, local_stiffness);
}

// ---------------------------------------------------------------------------
// FeSpace

FeSpace::FeSpace(std::shared_ptr<const Mesh> mesh, SolverConfig solver)
    : mesh_(std::move(mesh)), solver_(solver) {
  if (!mesh_)
    throw UsageError("FeSpace requires a mesh");
  solver_.validate();
  mass_ = assemble_mass(*mesh_);
  stiffness_ = assemble_stiffness(*mesh_);
  basis_gradients_.reserve(mesh_->num_triangles());
  for (std::size_t t = 0; t < mesh_->num_triangles(); ++t) {
    const auto p = corners(*mesh_, t);
    const double two_area = 2.0 * signed_area(p);
    const auto gx = barycentric_gradient_x(p, two_area);
    const auto gy = barycentric_gradient_y(p, two_area);
    basis_gradients_.push_back({{{gx[0], gy[0]}, {gx[1], gy[1]}, {gx[2], gy[2]}}});
  }
}

void FeSpace::check(const FeFunction &v) const {
  if (v.mesh_id() != mesh_->id() || static_cast<std::size_t>(v.size()) != num_dofs())
    throw UsageError("FE function does not belong to this space");
}

FeFunction FeSpace::zero() const { return {mesh_->id(), Vector::Zero(num_dofs())}; }

FeFunction FeSpace::from_coeffs(Vector coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != num_dofs())
    throw UsageError("coefficient vector has length " + std::to_string(coeffs.size()) +
                     ", space has " + std::to_string(num_dofs()) + " dofs");
  return {mesh_->id(), std::move(coeffs)};
}

FeFunction FeSpace::interpolate(const ScalarField &g, double t) const {
  Vector c(num_dofs());
  for (std::size_t i = 0; i < num_dofs(); ++i) {
    const Point &p = mesh_->vertices()[mesh_->dof_vertices()[i]];
    c[static_cast<Eigen::Index>(i)] = g(p.x, p.y, t);
  }
  return {mesh_->id(), std::move(c)};
}

Point FeSpace::map_point(std::size_t tri, const std::array<double, 3> &bary) const {
  const auto p = corners(*mesh_, tri);
  return {bary[0] * p[0].x + bary[1] * p[1].x + bary[2] * p[2].x,
          bary[0] * p[0].y + bary[1] * p[1].y + bary[2] * p[2].y};
}

Vector FeSpace::load_vector(const ScalarField &g, double t) const {
  Vector b = Vector::Zero(num_dofs());
  const auto rule = degree4_rule();
  for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
    const auto &tri = mesh_->triangles()[k];
    const double area = mesh_->area(k);
    std::array<double, 3> local{0.0, 0.0, 0.0};
    for (const auto &q : rule) {
      const Point x = map_point(k, q.bary);
      const double value = g(x.x, x.y, t) * q.weight * area;
      for (int i = 0; i < 3; ++i)
        local[i] += value * q.bary[i];
    }
    for (int i = 0; i < 3; ++i) {
      const int dof = mesh_->dof_map()[tri[i]];
      if (dof >= 0)
        b[dof] += local[i];
    }
  }
  return b;
}

FeFunction FeSpace::solve_mass(const Vector &load) const {
  return {mesh_->id(), solve_spd(mass_, load, solver_)};
}

FeFunction FeSpace::l2_project(const ScalarField &g, double t) const {
  return solve_mass(load_vector(g, t));
}

FeFunction FeSpace::discrete_laplacian(const FeFunction &v) const {
  check(v);
  return solve_mass(stiffness_ * v.coeffs());
}

double FeSpace::l2_norm(const FeFunction &v) const {
  check(v);
  return std::sqrt(std::max(0.0, v.coeffs().dot(mass_ * v.coeffs())));
}

double FeSpace::h1_seminorm(const FeFunction &v) const {
  check(v);
  return std::sqrt(std::max(0.0, v.coeffs().dot(stiffness_ * v.coeffs())));
}

double FeSpace::vertex_value(const FeFunction &v, int vertex) const {
  const int dof = mesh_->dof_map()[vertex];
  return dof < 0 ? 0.0 : v.coeffs()[dof];
}

std::array<double, 3> FeSpace::local_values(const FeFunction &v, std::size_t tri) const {
  const auto &t = mesh_->triangles()[tri];
  return {vertex_value(v, t[0]), vertex_value(v, t[1]), vertex_value(v, t[2])};
}

std::array<double, 2> FeSpace::gradient(const FeFunction &v, std::size_t tri) const {
  check(v);
  const auto values = local_values(v, tri);
  const auto &g = basis_gradients_[tri];
  return {values[0] * g[0][0] + values[1] * g[1][0] + values[2] * g[2][0],
          values[0] * g[0][1] + values[1] * g[1][1] + values[2] * g[2][1]};
}

double FeSpace::weighted_element_norm(const FeFunction &v, double power) const {
  check(v);
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
    const auto values = local_values(v, k);
    // v^T M_K v with M_K = area/12 [[2,1,1],[1,2,1],[1,1,2]].
    const double s = values[0] + values[1] + values[2];
    const double sq = values[0] * values[0] + values[1] * values[1] + values[2] * values[2];
    const double local = mesh_->area(k) / 12.0 * (sq + s * s);
    sum += std::pow(mesh_->diameter(k), 2.0 * power) * local;
  }
  return std::sqrt(sum);
}

double FeSpace::jump_norm(const FeFunction &v, double power) const {
  check(v);
  double sum = 0.0;
  for (const Facet &e : mesh_->interior_facets()) {
    const auto gl = gradient(v, static_cast<std::size_t>(e.left_tri));
    const auto gr = gradient(v, static_cast<std::size_t>(*e.right_tri));
    const double jump = (gl[0] - gr[0]) * e.unit_normal.x + (gl[1] - gr[1]) * e.unit_normal.y;
    sum += std::pow(e.length, 2.0 * power) * jump * jump * e.length;
  }
  return std::sqrt(sum);
}

double FeSpace::field_norm(const ScalarField &g, double t,
                           std::span<const TriangleQuadPoint> rule) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
    double local = 0.0;
    for (const auto &q : rule) {
      const Point x = map_point(k, q.bary);
      const double value = g(x.x, x.y, t);
      local += q.weight * value * value;
    }
    sum += mesh_->area(k) * local;
  }
  return std::sqrt(sum);
}

double FeSpace::weighted_field_error(const ScalarField &g, double t, const FeFunction &v,
                                     double power,
                                     std::span<const TriangleQuadPoint> rule) const {
  check(v);
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
    const auto values = local_values(v, k);
    double local = 0.0;
    for (const auto &q : rule) {
      const Point x = map_point(k, q.bary);
      const double vh = q.bary[0] * values[0] + q.bary[1] * values[1] + q.bary[2] * values[2];
      const double diff = g(x.x, x.y, t) - vh;
      local += q.weight * diff * diff;
    }
    sum += std::pow(mesh_->diameter(k), 2.0 * power) * mesh_->area(k) * local;
  }
  return std::sqrt(sum);
}

double FeSpace::field_error_l2(const ScalarField &g, double t, const FeFunction &v) const {
  return weighted_field_error(g, t, v, 0.0, degree5_rule());
}

double FeSpace::field_error_h1(const GradientField &grad, double t, const FeFunction &v) const {
  check(v);
  double sum = 0.0;
  for (std::size_t k = 0; k < mesh_->num_triangles(); ++k) {
    const auto gh = gradient(v, k);
    double local = 0.0;
    for (const auto &q : degree5_rule()) {
      const Point x = map_point(k, q.bary);
      const double dx = grad.dx(x.x, x.y, t) - gh[0];
      const double dy = grad.dy(x.x, x.y, t) - gh[1];
      local += q.weight * (dx * dx + dy * dy);
    }
    sum += mesh_->area(k) * local;
  }
  return std::sqrt(sum);
}

} // namespace fsteta
