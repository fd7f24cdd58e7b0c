#pragma once

#include "fsteta/linear_solver.hpp"
#include "fsteta/mesh.hpp"
#include "fsteta/quadrature.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace fsteta {

/// A space-time field g(x, y, t) evaluable anywhere in the unit square.
struct ScalarField {
  std::function<double(double, double, double)> eval;
  std::string name;

  double operator()(double x, double y, double t) const { return eval(x, y, t); }
};

/// Gradient of a space-time field, component-wise.
struct GradientField {
  ScalarField dx;
  ScalarField dy;
};

ScalarField zero_field();

/// Coefficients of a continuous piecewise-linear function vanishing on the
/// boundary, tagged with the identity of the mesh it lives on.
class FeFunction {
public:
  FeFunction() = default;
  FeFunction(std::uint64_t mesh_id, Vector coeffs) : mesh_id_(mesh_id), coeffs_(std::move(coeffs)) {}

  std::uint64_t mesh_id() const noexcept { return mesh_id_; }
  const Vector &coeffs() const noexcept { return coeffs_; }
  Vector &coeffs() noexcept { return coeffs_; }
  Eigen::Index size() const noexcept { return coeffs_.size(); }

  FeFunction &operator+=(const FeFunction &other);
  FeFunction &operator-=(const FeFunction &other);
  FeFunction &operator*=(double s);

  /// One coefficient per line, full precision.
  void write_text(std::ostream &out) const;

private:
  std::uint64_t mesh_id_ = 0;
  Vector coeffs_;
};

FeFunction operator+(FeFunction a, const FeFunction &b);
FeFunction operator-(FeFunction a, const FeFunction &b);
FeFunction operator*(double s, FeFunction a);
FeFunction operator*(FeFunction a, double s);

/// Which vertices get a row/column in an assembled matrix.
enum class DofScope { interior, all_vertices };

using LocalMatrix = std::array<std::array<double, 3>, 3>;

/// Exact P1 mass matrix of one triangle: (area / 12) * [[2,1,1],[1,2,1],[1,1,2]].
LocalMatrix local_mass(const std::array<Point, 3> &corners);
/// Exact P1 stiffness matrix of one triangle.
LocalMatrix local_stiffness(const std::array<Point, 3> &corners);

SparseMatrix assemble_mass(const Mesh &mesh, DofScope scope = DofScope::interior);
SparseMatrix assemble_stiffness(const Mesh &mesh, DofScope scope = DofScope::interior);

/// P1 Lagrange space with homogeneous Dirichlet data on a fixed mesh.
///
/// Owns the consistent mass and stiffness matrices and every operation the
/// scheme and the estimators need: loads, L2 projection, the discrete
/// Laplacian, norms and facet jumps. Immutable after construction.
class FeSpace {
public:
  explicit FeSpace(std::shared_ptr<const Mesh> mesh, SolverConfig solver = {});

  const Mesh &mesh() const noexcept { return *mesh_; }
  std::shared_ptr<const Mesh> mesh_ptr() const noexcept { return mesh_; }
  const SparseMatrix &mass() const noexcept { return mass_; }
  const SparseMatrix &stiffness() const noexcept { return stiffness_; }
  const SolverConfig &solver() const noexcept { return solver_; }
  std::size_t num_dofs() const noexcept { return mesh_->num_dofs(); }

  FeFunction zero() const;
  /// Throws UsageError on a length mismatch.
  FeFunction from_coeffs(Vector coeffs) const;
  /// Nodal interpolant of g(., t).
  FeFunction interpolate(const ScalarField &g, double t) const;

  /// b_i = int g(., t) phi_i, degree-4 quadrature.
  Vector load_vector(const ScalarField &g, double t) const;
  /// Solves M p = load.
  FeFunction solve_mass(const Vector &load) const;
  /// L2 projection P0 g(., t).
  FeFunction l2_project(const ScalarField &g, double t) const;
  /// Returns d = (-Delta_h) v, i.e. M d = K v.
  FeFunction discrete_laplacian(const FeFunction &v) const;

  double l2_norm(const FeFunction &v) const;
  double h1_seminorm(const FeFunction &v) const;
  /// (sum_K ||h_K^power v||_K^2)^(1/2), exact for P1 v.
  double weighted_element_norm(const FeFunction &v, double power) const;
  /// (sum_e h_e^(2 power) |J[grad v]_e|^2 |e|)^(1/2) over interior facets,
  /// with h_e the facet length.
  double jump_norm(const FeFunction &v, double power) const;

  /// ||g(., t)||, evaluated with the given rule.
  double field_norm(const ScalarField &g, double t,
                    std::span<const TriangleQuadPoint> rule = degree4_rule()) const;
  /// ||h^power (g(., t) - v)||_T evaluated with the given rule.
  double weighted_field_error(const ScalarField &g, double t, const FeFunction &v, double power,
                              std::span<const TriangleQuadPoint> rule = degree4_rule()) const;
  /// ||g(., t) - v||, degree-5 quadrature.
  double field_error_l2(const ScalarField &g, double t, const FeFunction &v) const;
  /// ||grad g(., t) - grad v||, degree-5 quadrature.
  double field_error_h1(const GradientField &grad, double t, const FeFunction &v) const;

  /// Constant gradient of v on triangle `tri`.
  std::array<double, 2> gradient(const FeFunction &v, std::size_t tri) const;
  /// Value of v at vertex `vertex` (zero on the boundary).
  double vertex_value(const FeFunction &v, int vertex) const;

private:
  void check(const FeFunction &v) const;
  std::array<double, 3> local_values(const FeFunction &v, std::size_t tri) const;
  Point map_point(std::size_t tri, const std::array<double, 3> &bary) const;

  std::shared_ptr<const Mesh> mesh_;
  SolverConfig solver_;
  SparseMatrix mass_;
  SparseMatrix stiffness_;
  // Gradients of the three barycentric coordinates per triangle.
  std::vector<std::array<std::array<double, 2>, 3>> basis_gradients_;
};

} // namespace fsteta
