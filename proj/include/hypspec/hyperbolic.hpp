#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

// Closed-form hyperbolic geometry of collars, cusps, pants and right-angled
// polygons, plus 1-D radial eigenvalue oracles.
namespace hypspec::hyp {

/// Half-width of the embedded collar around a closed geodesic of length l:
/// m(l) = asinh(1 / sinh(l/2)).
double collar_halfwidth(double l);

/// U(r) = arcsin(tanh r) = 2 atan(e^r) - pi/2. Harmonic in Fermi coordinates
/// and equal to the integral of sech over [0, r].
double gudermannian(double r);

/// Collar S^1 x [-m, m] with metric dr^2 + (l/2pi)^2 cosh^2 r dtheta^2.
struct FermiCollar {
  double length = 0.0;
  double halfwidth = 0.0;

  static FermiCollar from_length(double l);
  double circumference(double r) const;
  /// Area of the band r0 <= r <= r1.
  double area(double r0, double r1) const;
};

/// epsilon-thin part of a cusp, metric e^{-2r}(eps/2pi)^2 dtheta^2 + dr^2.
struct CuspNeighborhood {
  double epsilon = 0.0;

  static CuspNeighborhood with_threshold(double eps);
  double volume() const { return epsilon; }
  double circumference(double r) const;
};

/// 2 pi (2g - 2 + b + c); throws unless the Euler characteristic is negative.
double gauss_bonnet_area(int genus, int boundaries, int cusps);

struct PantsSpec {
  std::array<double, 3> cuffs{};
  std::array<bool, 3> cusp{};  // zero-length cuffs (bookkeeping only)

  void validate(bool meshable) const;
  double area() const { return gauss_bonnet_area(0, 3, 0); }
};

/// Right-angled hexagon with alternating sides l_i / 2. connecting[i] is the
/// side opposite alternating[i].
struct RightAngledHexagon {
  std::array<double, 3> alternating{};
  std::array<double, 3> connecting{};
};

RightAngledHexagon hexagon_from_cuffs(double l1, double l2, double l3);

/// Cuff length l for which all six sides of the symmetric hexagon coincide,
/// found by root bracketing on the hexagon relation.
double equilateral_hexagon_cuff();

/// Fundamental domain of the right-angled 2v-gon with alternating sides l/2
/// under its dihedral symmetry: a Lambert quadrilateral with vertices
/// M_a (midpoint of a cuff side), X (corner), M_b (midpoint of a seam) and
/// the polygon center O. In Fermi coordinates (s, r) about the cuff side it
/// is { 0 <= s <= quarter_cuff, 0 <= r <= top(s) }.
struct LambertQuad {
  int v = 3;
  double cuff_length = 0.0;
  double quarter_cuff = 0.0;  // M_a X = l / 4
  double half_seam = 0.0;     // X M_b
  double apex = 0.0;          // M_a O

  static LambertQuad for_polygon(int v, double l);
  double top(double s) const;
  double seam_length() const { return 2.0 * half_seam; }
};

enum class Topology { pants_ring, torus_with_holes, custom };

std::string to_string(Topology t);
Topology topology_from_string(const std::string& s);

/// A pants decomposition given explicitly. Gluings are (pants, cuff, pants,
/// cuff); unglued cuffs are the cell boundary. `symmetry` is a permutation of
/// the pants of order v that maps the gluing set to itself and cycles the
/// boundary cuffs.
struct CustomPantsGraph {
  int pants = 0;
  std::vector<std::array<int, 4>> gluings;
  std::vector<int> symmetry;
};

/// Declarative cell: v geodesic boundaries of common length l with an
/// order-v isometry cycling them. Twists are always zero.
struct CellSpec {
  int v = 3;
  double cuff_length = 1.0;
  Topology topology = Topology::pants_ring;
  std::vector<bool> funnels;  // per boundary; empty = none
  double r_trunc = 3.0;
  std::optional<CustomPantsGraph> custom;

  void validate() const;
  bool has_funnel(int boundary) const;
  int funnel_count() const;
  int genus() const;
  /// Area of the compact core (without funnels).
  double core_area() const;
};

// ---- Fermi-coordinate Laplacian ----

/// Partial derivatives of f(r, theta) at a point.
struct FermiJet {
  double f_r = 0.0;
  double f_rr = 0.0;
  double f_thth = 0.0;
};

/// Delta f = -(f_rr + tanh r f_r + (2pi)^2 / (l^2 cosh^2 r) f_thth).
double fermi_laplacian(const FermiJet& jet, double r, double l);

/// Same operator by second-order differences on a uniform (r, theta) grid,
/// theta periodic. values[i * n_theta + j] = f(r_i, theta_j). Returned grid
/// has interior r-rows only (first and last rows dropped).
std::vector<double> fermi_laplacian_grid(const std::vector<double>& values, int n_r,
                                         int n_theta, double r0, double r1, double l);

// ---- 1-D oracles ----

enum class EndCondition { neumann, dirichlet };

struct SturmOptions {
  int base_intervals = 400;
  int levels = 3;  // grids N, 2N, 4N then Richardson
};

/// Lowest eigenvalue of -F'' - tanh r F' + (2 pi k / (l cosh r))^2 F on
/// [r0, r1], i.e. the Fermi Laplacian restricted to the mode e^{ik theta}.
double collar_sturm_liouville(double l, int k, double r0, double r1, EndCondition left,
                              EndCondition right, const SturmOptions& opts = {});

/// Lowest Dirichlet eigenvalue of the geodesic disk of radius R, by shooting
/// on -F'' - coth r F' = lambda F.
double geodesic_disk_dirichlet(double radius, double tol = 1e-12);

/// delta = 1/2 + sqrt(1/4 - lambda0), valid for 0 <= lambda0 <= 1/4.
double critical_exponent(double lambda0);

}  // namespace hypspec::hyp
