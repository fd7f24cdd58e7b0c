#pragma once

#include <array>
#include <span>

namespace fsteta {

/// Quadrature point in barycentric coordinates; weights sum to one and are
/// scaled by the element area at the call site.
struct TriangleQuadPoint {
  std::array<double, 3> bary;
  double weight;
};

/// Symmetric 6-point rule, exact for polynomials of degree 4.
std::span<const TriangleQuadPoint> degree4_rule();

/// Symmetric 7-point rule, exact for polynomials of degree 5.
std::span<const TriangleQuadPoint> degree5_rule();

/// Gauss-Legendre nodes/weights on [0, 1].
struct GaussPoint1d {
  double node;
  double weight;
};

/// Three-point Gauss-Legendre rule on [0, 1] (exact to degree 5).
std::span<const GaussPoint1d> gauss3_unit_interval();

} // namespace fsteta
