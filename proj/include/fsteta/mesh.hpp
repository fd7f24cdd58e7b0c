#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace fsteta {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

/// An edge of the triangulation. Interior facets carry both neighbours; the
/// normal points from `left_tri` into `right_tri`.
struct Facet {
  std::array<int, 2> endpoints{};
  double length = 0.0;
  Point unit_normal;
  int left_tri = -1;
  std::optional<int> right_tri;
};

/// Uniform criss-cross triangulation of the unit square.
///
/// Each of the 2^level x 2^level cells is split along its positive-slope
/// diagonal. Triangles are stored counterclockwise. Only interior vertices
/// carry degrees of freedom (homogeneous Dirichlet data).
class Mesh {
public:
  static constexpr int kMinLevel = 1;
  static constexpr int kMaxLevel = 12;

  /// Throws ConfigurationError when level is outside [1, 12].
  static Mesh uniform(int level);

  int level() const noexcept { return level_; }
  int cells_per_side() const noexcept { return 1 << level_; }
  /// Grid spacing 2^-level.
  double spacing() const noexcept { return 1.0 / cells_per_side(); }

  /// Process-unique identity; FE functions remember which mesh they live on.
  std::uint64_t id() const noexcept { return id_; }

  const std::vector<Point> &vertices() const noexcept { return vertices_; }
  const std::vector<std::array<int, 3>> &triangles() const noexcept { return triangles_; }
  const std::vector<bool> &boundary_vertex_flags() const noexcept { return boundary_; }
  /// Vertex index -> dof index, or -1 on the boundary.
  const std::vector<int> &dof_map() const noexcept { return dof_map_; }
  /// Dof index -> vertex index.
  const std::vector<int> &dof_vertices() const noexcept { return dof_vertices_; }

  std::size_t num_vertices() const noexcept { return vertices_.size(); }
  std::size_t num_triangles() const noexcept { return triangles_.size(); }
  std::size_t num_dofs() const noexcept { return dof_vertices_.size(); }

  const std::vector<Facet> &interior_facets() const noexcept { return interior_facets_; }
  const std::vector<Facet> &boundary_facets() const noexcept { return boundary_facets_; }
  /// Per triangle, the facet indices of its three edges; interior facets are
  /// numbered first, boundary facets follow at offset interior_facets().size().
  const std::vector<std::array<int, 3>> &triangle_facets() const noexcept { return triangle_facets_; }

  double area(std::size_t tri) const { return areas_[tri]; }
  /// diam(K), the local mesh-size function.
  double diameter(std::size_t tri) const { return diameters_[tri]; }
  double max_diameter() const noexcept;

  /// Plain-text dump: "x y" per vertex, a blank line, then "i j k" per triangle (0-based).
  void write_text(std::ostream &out) const;

private:
  Mesh() = default;

  int level_ = 0;
  std::uint64_t id_ = 0;
  std::vector<Point> vertices_;
  std::vector<std::array<int, 3>> triangles_;
  std::vector<bool> boundary_;
  std::vector<int> dof_map_;
  std::vector<int> dof_vertices_;
  std::vector<Facet> interior_facets_;
  std::vector<Facet> boundary_facets_;
  std::vector<std::array<int, 3>> triangle_facets_;
  std::vector<double> areas_;
  std::vector<double> diameters_;
};

/// Convenience alias for Mesh::uniform.
inline Mesh build_uniform_mesh(int level) { return Mesh::uniform(level); }

/// The interior facets of `mesh`.
const std::vector<Facet> &facet_geometry(const Mesh &mesh);

} // namespace fsteta
