#pragma once

#include <complex>

// Poincare-disk primitives. Every point handled here satisfies |z| < 1.
namespace hypspec::disk {

using Point = std::complex<double>;

/// Conformal factor of the hyperbolic metric, ds = lambda(z) |dz|.
inline double conformal_factor(Point z) { return 2.0 / (1.0 - std::norm(z)); }

double distance(Point a, Point b);

/// Isometry z -> (z - o) / (1 - conj(o) z), sending o to the origin.
Point move_to_origin(Point z, Point o);

/// Hyperbolic translation by signed distance s along the real diameter.
Point translate_real(Point w, double s);

/// Point at arclength s along the real diameter, pushed a signed distance r
/// along the perpendicular geodesic (Fermi coordinates of the real axis).
Point fermi_point(double s, double r);

/// A complete geodesic, stored as the isometry that carries it onto the real
/// diameter: z -> rot * (z - a) / (1 - conj(a) z).
class Geodesic {
 public:
  static Geodesic through(Point a, Point b);

  Point normalize(Point z) const;
  /// Signed distance from z to the geodesic (sign = side).
  double signed_distance(Point z) const;
  /// Arclength coordinate of the orthogonal projection of z, measured from a.
  double arclength(Point z) const;
  /// Point at arclength s from a.
  Point at(double s) const;
  /// Orthogonal projection onto the geodesic.
  Point project(Point z) const { return at(arclength(z)); }

 private:
  Point a_{};
  Point rot_{1.0, 0.0};
};

}  // namespace hypspec::disk
