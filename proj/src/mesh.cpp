#include "fsteta/mesh.hpp"

#include "fsteta/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <ostream>
#include <string>
#include <utility>

namespace fsteta {

namespace {

std::uint64_t next_mesh_id() {
  static std::atomic<std::uint64_t> counter{1};
  return counter.fetch_add(1);
}

double distance(const Point &a, const Point &b) { return std::hypot(b.x - a.x, b.y - a.y); }

} // namespace

Mesh Mesh::uniform(int level) {
  if (level < kMinLevel || level > kMaxLevel)
    throw ConfigurationError("mesh level " + std::to_string(level) + " outside [" +
                             std::to_string(kMinLevel) + ", " + std::to_string(kMaxLevel) + "]");

  Mesh mesh;
  mesh.level_ = level;
  mesh.id_ = next_mesh_id();

  const int n = 1 << level;
  const int side = n + 1;
  const double h = 1.0 / n;
  auto vertex = [side](int i, int j) { return j * side + i; };

  mesh.vertices_.reserve(static_cast<std::size_t>(side) * side);
  mesh.boundary_.reserve(static_cast<std::size_t>(side) * side);
  mesh.dof_map_.assign(static_cast<std::size_t>(side) * side, -1);
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) {
      // Integer-based coordinates keep nested meshes bitwise consistent.
      mesh.vertices_.push_back({i * h, j * h});
      const bool on_boundary = i == 0 || j == 0 || i == n || j == n;
      mesh.boundary_.push_back(on_boundary);
      if (!on_boundary) {
        mesh.dof_map_[vertex(i, j)] = static_cast<int>(mesh.dof_vertices_.size());
        mesh.dof_vertices_.push_back(vertex(i, j));
      }
    }
  }

  mesh.triangles_.reserve(2 * static_cast<std::size_t>(n) * n);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      const int a = vertex(i, j), b = vertex(i + 1, j);
      const int c = vertex(i + 1, j + 1), d = vertex(i, j + 1);
      mesh.triangles_.push_back({a, b, c});
      mesh.triangles_.push_back({a, c, d});
    }
  }

  mesh.areas_.reserve(mesh.triangles_.size());
  mesh.diameters_.reserve(mesh.triangles_.size());
  for (const auto &tri : mesh.triangles_) {
    const Point &p0 = mesh.vertices_[tri[0]];
    const Point &p1 = mesh.vertices_[tri[1]];
    const Point &p2 = mesh.vertices_[tri[2]];
    mesh.areas_.push_back(0.5 * ((p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y)));
    mesh.diameters_.push_back(std::max({distance(p0, p1), distance(p1, p2), distance(p2, p0)}));
  }

  // Edge -> (first triangle, local edge, second triangle, local edge).
  struct Adjacency {
    int first = -1, first_local = -1, second = -1, second_local = -1;
  };
  std::map<std::pair<int, int>, Adjacency> edges;
  for (int t = 0; t < static_cast<int>(mesh.triangles_.size()); ++t) {
    const auto &tri = mesh.triangles_[t];
    for (int e = 0; e < 3; ++e) {
      const int u = tri[e], v = tri[(e + 1) % 3];
      auto &adj = edges[{std::min(u, v), std::max(u, v)}];
      if (adj.first < 0) {
        adj.first = t;
        adj.first_local = e;
      } else {
        adj.second = t;
        adj.second_local = e;
      }
    }
  }

  auto centroid = [&mesh](int t) {
    const auto &tri = mesh.triangles_[t];
    Point c;
    for (int v : tri) {
      c.x += mesh.vertices_[v].x / 3.0;
      c.y += mesh.vertices_[v].y / 3.0;
    }
    return c;
  };

  mesh.triangle_facets_.assign(mesh.triangles_.size(), {-1, -1, -1});
  std::vector<std::pair<Facet, Adjacency>> boundary;
  for (const auto &[key, adj] : edges) {
    Facet facet;
    facet.endpoints = {key.first, key.second};
    const Point &p = mesh.vertices_[key.first];
    const Point &q = mesh.vertices_[key.second];
    facet.length = distance(p, q);
    Point normal{(q.y - p.y) / facet.length, -(q.x - p.x) / facet.length};
    const Point c = centroid(adj.first);
    const Point mid{0.5 * (p.x + q.x), 0.5 * (p.y + q.y)};
    if (normal.x * (mid.x - c.x) + normal.y * (mid.y - c.y) < 0.0)
      normal = {-normal.x, -normal.y};
    facet.unit_normal = normal;
    facet.left_tri = adj.first;
    if (adj.second >= 0) {
      facet.right_tri = adj.second;
      const int index = static_cast<int>(mesh.interior_facets_.size());
      mesh.triangle_facets_[adj.first][adj.first_local] = index;
      mesh.triangle_facets_[adj.second][adj.second_local] = index;
      mesh.interior_facets_.push_back(facet);
    } else {
      boundary.emplace_back(facet, adj);
    }
  }
  const int offset = static_cast<int>(mesh.interior_facets_.size());
  for (auto &[facet, adj] : boundary) {
    mesh.triangle_facets_[adj.first][adj.first_local] =
        offset + static_cast<int>(mesh.boundary_facets_.size());
    mesh.boundary_facets_.push_back(facet);
  }
  return mesh;
}

double Mesh::max_diameter() const noexcept {
  return diameters_.empty() ? 0.0 : *std::max_element(diameters_.begin(), diameters_.end());
}

void Mesh::write_text(std::ostream &out) const {
  const auto precision = out.precision(17);
  for (const auto &p : vertices_)
    out << p.x << ' ' << p.y << '\n';
  out << '\n';
  for (const auto &t : triangles_)
    out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
  out.precision(precision);
}

const std::vector<Facet> &facet_geometry(const Mesh &mesh) { return mesh.interior_facets(); }

} // namespace fsteta
