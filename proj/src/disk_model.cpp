#include "hypspec/disk_model.hpp"

#include <cmath>

namespace hypspec::disk {

double distance(Point a, Point b) {
  const double t = std::abs(a - b) / std::abs(1.0 - std::conj(a) * b);
  return 2.0 * std::atanh(std::min(t, 1.0 - 1e-16));
}

Point move_to_origin(Point z, Point o) { return (z - o) / (1.0 - std::conj(o) * z); }

Point translate_real(Point w, double s) {
  const double t = std::tanh(0.5 * s);
  return (w + t) / (1.0 + t * w);
}

Point fermi_point(double s, double r) {
  return translate_real(Point(0.0, std::tanh(0.5 * r)), s);
}

Geodesic Geodesic::through(Point a, Point b) {
  Geodesic g;
  g.a_ = a;
  const Point bb = move_to_origin(b, a);
  g.rot_ = std::abs(bb) > 0 ? std::conj(bb) / std::abs(bb) : Point(1.0, 0.0);
  return g;
}

Point Geodesic::normalize(Point z) const { return rot_ * move_to_origin(z, a_); }

double Geodesic::signed_distance(Point z) const {
  const Point w = normalize(z);
  return std::asinh(2.0 * w.imag() / (1.0 - std::norm(w)));
}

double Geodesic::arclength(Point z) const {
  // The foot of the perpendicular from w lies on the real axis at the point
  // whose translate carries it to the imaginary axis.
  const Point w = normalize(z);
  const double n = std::norm(w);
  // Foot point x in (-1,1): x solves 2x/(1+x^2) = 2 Re(w)/(1+|w|^2).
  const double c = 2.0 * w.real() / (1.0 + n);
  const double x = (std::abs(c) < 1e-300) ? 0.0 : (1.0 - std::sqrt(1.0 - c * c)) / c;
  return 2.0 * std::atanh(x);
}

Point Geodesic::at(double s) const {
  const Point u = Point(std::tanh(0.5 * s), 0.0) / rot_;
  return (u + a_) / (1.0 + std::conj(a_) * u);
}

}  // namespace hypspec::disk
