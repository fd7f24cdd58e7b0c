#include "fsteta/quadrature.hpp"

#include <cmath>

namespace fsteta {

namespace {

constexpr TriangleQuadPoint orbit(double a, double w, int rotation) {
  const double b = 1.0 - 2.0 * a;
  switch (rotation) {
  case 0:
    return {{a, a, b}, w};
  case 1:
    return {{a, b, a}, w};
  default:
    return {{b, a, a}, w};
  }
}

// Dunavant, degree 4.
constexpr double kD4A1 = 0.44594849091596488632;
constexpr double kD4W1 = 0.22338158967801146570;
constexpr double kD4A2 = 0.091576213509770743460;
constexpr double kD4W2 = 0.10995174365532186764;

constexpr std::array<TriangleQuadPoint, 6> kDegree4{
    orbit(kD4A1, kD4W1, 0), orbit(kD4A1, kD4W1, 1), orbit(kD4A1, kD4W1, 2),
    orbit(kD4A2, kD4W2, 0), orbit(kD4A2, kD4W2, 1), orbit(kD4A2, kD4W2, 2)};

std::array<TriangleQuadPoint, 7> make_degree5() {
  const double s = std::sqrt(15.0);
  const double a1 = (6.0 - s) / 21.0, w1 = (155.0 - s) / 1200.0;
  const double a2 = (6.0 + s) / 21.0, w2 = (155.0 + s) / 1200.0;
  return {TriangleQuadPoint{{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}, 9.0 / 40.0},
          orbit(a1, w1, 0), orbit(a1, w1, 1), orbit(a1, w1, 2),
          orbit(a2, w2, 0), orbit(a2, w2, 1), orbit(a2, w2, 2)};
}

std::array<GaussPoint1d, 3> make_gauss3() {
  const double d = 0.5 * std::sqrt(3.0 / 5.0);
  return {GaussPoint1d{0.5 - d, 5.0 / 18.0}, GaussPoint1d{0.5, 8.0 / 18.0},
          GaussPoint1d{0.5 + d, 5.0 / 18.0}};
}

} // namespace

std::span<const TriangleQuadPoint> degree4_rule() { return kDegree4; }

std::span<const TriangleQuadPoint> degree5_rule() {
  static const auto rule = make_degree5();
  return rule;
}

std::span<const GaussPoint1d> gauss3_unit_interval() {
  static const auto rule = make_gauss3();
  return rule;
}

} // namespace fsteta
