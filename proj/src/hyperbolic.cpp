#include "hypspec/hyperbolic.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <set>

#include "hypspec/errors.hpp"

namespace hypspec::hyp {

namespace {
constexpr double kPi = std::numbers::pi;
}

double collar_halfwidth(double l) {
  require(l > 0.0 && std::isfinite(l), "collar_halfwidth: length must be positive");
  return std::asinh(1.0 / std::sinh(0.5 * l));
}

double gudermannian(double r) { return std::asin(std::tanh(r)); }

FermiCollar FermiCollar::from_length(double l) { return {l, collar_halfwidth(l)}; }

double FermiCollar::circumference(double r) const { return length * std::cosh(r); }

double FermiCollar::area(double r0, double r1) const {
  return length * (std::sinh(r1) - std::sinh(r0));
}

CuspNeighborhood CuspNeighborhood::with_threshold(double eps) {
  require(eps > 0.0, "cusp threshold must be positive");
  return {eps};
}

double CuspNeighborhood::circumference(double r) const { return epsilon * std::exp(-r); }

double gauss_bonnet_area(int genus, int boundaries, int cusps) {
  require(genus >= 0 && boundaries >= 0 && cusps >= 0, "negative topological count");
  const int chi = 2 - 2 * genus - boundaries - cusps;
  require(chi < 0, "surface with Euler characteristic " + std::to_string(chi) +
                       " carries no hyperbolic metric");
  return -2.0 * kPi * chi;
}

void PantsSpec::validate(bool meshable) const {
  for (int i = 0; i < 3; ++i) {
    if (cusp[i]) {
      require(!meshable, "cusped cuffs are not meshable");
      continue;
    }
    require(cuffs[i] > 0.0 && std::isfinite(cuffs[i]), "pants cuff lengths must be positive");
  }
}

RightAngledHexagon hexagon_from_cuffs(double l1, double l2, double l3) {
  require(l1 > 0 && l2 > 0 && l3 > 0, "hexagon_from_cuffs: lengths must be positive");
  RightAngledHexagon h;
  h.alternating = {0.5 * l1, 0.5 * l2, 0.5 * l3};
  for (int i = 0; i < 3; ++i) {
    const double a = h.alternating[i];
    const double b = h.alternating[(i + 1) % 3];
    const double c = h.alternating[(i + 2) % 3];
    h.connecting[i] = std::acosh((std::cosh(b) * std::cosh(c) + std::cosh(a)) /
                                 (std::sinh(b) * std::sinh(c)));
  }
  return h;
}

double equilateral_hexagon_cuff() {
  // g(l) = connecting side - l/2 changes sign once on (0, inf).
  auto g = [](double l) { return hexagon_from_cuffs(l, l, l).connecting[0] - 0.5 * l; };
  double lo = 0.1, hi = 10.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) > 0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

LambertQuad LambertQuad::for_polygon(int v, double l) {
  require(v >= 3, "right-angled 2v-gon needs v >= 3");
  require(l > 0.0, "cuff length must be positive");
  LambertQuad q;
  q.v = v;
  q.cuff_length = l;
  q.quarter_cuff = 0.25 * l;
  // cos(pi/v) = sinh(l/4) sinh(b/2) in the Lambert quadrilateral.
  q.half_seam = std::asinh(std::cos(kPi / v) / std::sinh(q.quarter_cuff));
  q.apex = std::atanh(std::tanh(q.half_seam) * std::cosh(q.quarter_cuff));
  return q;
}

double LambertQuad::top(double s) const {
  return std::atanh(std::tanh(half_seam) * std::cosh(quarter_cuff - s));
}

std::string to_string(Topology t) {
  switch (t) {
    case Topology::pants_ring: return "pants_ring";
    case Topology::torus_with_holes: return "torus_with_v_holes";
    case Topology::custom: return "custom";
  }
  return "?";
}

Topology topology_from_string(const std::string& s) {
  if (s == "pants_ring") return Topology::pants_ring;
  if (s == "torus_with_v_holes" || s == "torus_with_holes") return Topology::torus_with_holes;
  if (s == "custom") return Topology::custom;
  throw ValidationError("unknown cell topology '" + s + "'");
}

void CellSpec::validate() const {
  require(v >= 1, "cell needs at least one boundary");
  require(cuff_length > 0.0 && std::isfinite(cuff_length), "cuff_length must be positive");
  require(funnels.empty() || static_cast<int>(funnels.size()) == v,
          "funnels must list one flag per boundary");
  require(r_trunc > 0.0, "r_trunc must be positive");
  switch (topology) {
    case Topology::pants_ring:
      require(v >= 3, "pants_ring needs v >= 3 (use torus_with_v_holes for v < 3)");
      break;
    case Topology::torus_with_holes:
      break;
    case Topology::custom: {
      require(custom.has_value(), "custom topology needs a pants graph");
      const auto& g = *custom;
      require(g.pants >= 1, "custom pants graph is empty");
      require(static_cast<int>(g.symmetry.size()) == g.pants, "symmetry must permute all pants");
      std::set<std::pair<int, int>> used;
      for (const auto& e : g.gluings) {
        for (int k : {0, 2}) {
          require(e[k] >= 0 && e[k] < g.pants && e[k + 1] >= 0 && e[k + 1] < 3,
                  "gluing refers to a missing cuff");
          require(used.insert({e[k], e[k + 1]}).second, "cuff glued twice");
        }
      }
      require(3 * g.pants - 2 * static_cast<int>(g.gluings.size()) == v,
              "custom pants graph leaves a number of free cuffs different from v");
      break;
    }
  }
}

bool CellSpec::has_funnel(int boundary) const {
  return !funnels.empty() && funnels.at(static_cast<std::size_t>(boundary));
}

int CellSpec::funnel_count() const {
  int n = 0;
  for (bool f : funnels) n += f ? 1 : 0;
  return n;
}

int CellSpec::genus() const {
  switch (topology) {
    case Topology::pants_ring: return 0;
    case Topology::torus_with_holes: return 1;
    case Topology::custom: return (custom->pants - v + 2) / 2;
  }
  return 0;
}

double CellSpec::core_area() const { return gauss_bonnet_area(genus(), v, 0); }

double fermi_laplacian(const FermiJet& jet, double r, double l) {
  const double c = std::cosh(r);
  return -(jet.f_rr + std::tanh(r) * jet.f_r + (2 * kPi) * (2 * kPi) / (l * l * c * c) * jet.f_thth);
}

std::vector<double> fermi_laplacian_grid(const std::vector<double>& values, int n_r, int n_theta,
                                         double r0, double r1, double l) {
  require(n_r >= 3 && n_theta >= 3, "grid too small");
  require(values.size() == static_cast<std::size_t>(n_r) * n_theta, "grid size mismatch");
  const double hr = (r1 - r0) / (n_r - 1);
  const double ht = 2 * kPi / n_theta;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n_r - 2) * n_theta);
  auto at = [&](int i, int j) { return values[i * n_theta + ((j + n_theta) % n_theta)]; };
  for (int i = 1; i < n_r - 1; ++i) {
    const double r = r0 + i * hr;
    for (int j = 0; j < n_theta; ++j) {
      FermiJet jet;
      jet.f_r = (at(i + 1, j) - at(i - 1, j)) / (2 * hr);
      jet.f_rr = (at(i + 1, j) - 2 * at(i, j) + at(i - 1, j)) / (hr * hr);
      jet.f_thth = (at(i, j + 1) - 2 * at(i, j) + at(i, j - 1)) / (ht * ht);
      out.push_back(fermi_laplacian(jet, r, l));
    }
  }
  return out;
}

namespace {

// Lowest eigenvalue of the weighted finite-difference discretisation on a
// single uniform grid with n intervals.
double sturm_single(double l, int k, double r0, double r1, EndCondition left, EndCondition right,
                    int n) {
  const double h = (r1 - r0) / n;
  auto w = [](double r) { return std::cosh(r); };
  auto q = [&](double r) {
    const double t = 2 * kPi * k / (l * std::cosh(r));
    return t * t;
  };
  const int first = left == EndCondition::dirichlet ? 1 : 0;
  const int last = right == EndCondition::dirichlet ? n - 1 : n;
  const int m = last - first + 1;
  require(m >= 1, "Sturm-Liouville grid has no unknowns");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(m), sub = Eigen::VectorXd::Zero(std::max(m - 1, 0));
  Eigen::VectorXd mass(m);
  for (int i = first; i <= last; ++i) {
    const double r = r0 + i * h;
    const double cell = (i == 0 || i == n) ? 0.5 * h : h;
    mass[i - first] = w(r) * cell;
    diag[i - first] += q(r) * w(r) * cell;
  }
  for (int i = 0; i < n; ++i) {
    const double wm = w(r0 + (i + 0.5) * h) / h;
    const int a = i - first, b = i + 1 - first;
    if (a >= 0 && a < m) diag[a] += wm;
    if (b >= 0 && b < m) diag[b] += wm;
    if (a >= 0 && b < m) sub[a] = -wm;
  }
  for (int i = 0; i < m; ++i) diag[i] /= mass[i];
  for (int i = 0; i + 1 < m; ++i) sub[i] /= std::sqrt(mass[i] * mass[i + 1]);
  if (m == 1) return diag[0];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  return es.eigenvalues()[0];
}

}  // namespace

double collar_sturm_liouville(double l, int k, double r0, double r1, EndCondition left,
                              EndCondition right, const SturmOptions& opts) {
  require(l > 0.0, "collar length must be positive");
  require(k >= 0, "mode index must be nonnegative");
  require(r1 > r0, "empty radial interval");
  require(opts.levels >= 1 && opts.base_intervals >= 2, "bad Sturm options");
  std::vector<double> table;
  int n = opts.base_intervals;
  for (int i = 0; i < opts.levels; ++i, n *= 2)
    table.push_back(sturm_single(l, k, r0, r1, left, right, n));
  // Richardson on an h^2 expansion.
  double factor = 4.0;
  while (table.size() > 1) {
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < table.size(); ++i)
      next.push_back((factor * table[i + 1] - table[i]) / (factor - 1.0));
    table = std::move(next);
    factor *= 4.0;
  }
  return table.front();
}

namespace {

// Integrates -F'' - coth r F' = lambda F from the origin and reports whether
// F changes sign on (0, R].
bool disk_mode_has_zero(double lambda, double radius) {
  const double r0 = 1e-5;
  const int steps = 8000;
  double f = 1.0 - 0.25 * lambda * r0 * r0;
  double g = -0.5 * lambda * r0;
  const double h = (radius - r0) / steps;
  auto rhs = [lambda](double r, double f_, double g_) {
    return -g_ / std::tanh(r) - lambda * f_;
  };
  double r = r0;
  for (int i = 0; i < steps; ++i) {
    const double k1f = g, k1g = rhs(r, f, g);
    const double k2f = g + 0.5 * h * k1g, k2g = rhs(r + 0.5 * h, f + 0.5 * h * k1f, g + 0.5 * h * k1g);
    const double k3f = g + 0.5 * h * k2g, k3g = rhs(r + 0.5 * h, f + 0.5 * h * k2f, g + 0.5 * h * k2g);
    const double k4f = g + h * k3g, k4g = rhs(r + h, f + h * k3f, g + h * k3g);
    f += h / 6 * (k1f + 2 * k2f + 2 * k3f + k4f);
    g += h / 6 * (k1g + 2 * k2g + 2 * k3g + k4g);
    r += h;
    if (f <= 0.0) return true;
  }
  return false;
}

}  // namespace

double geodesic_disk_dirichlet(double radius, double tol) {
  require(radius > 0.0, "disk radius must be positive");
  double lo = 0.0, hi = 1.0;
  while (!disk_mode_has_zero(hi, radius)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("shooting failed to bracket the disk eigenvalue");
  }
  while (hi - lo > tol * std::max(1.0, hi)) {
    const double mid = 0.5 * (lo + hi);
    (disk_mode_has_zero(mid, radius) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double critical_exponent(double lambda0) {
  require(lambda0 >= 0.0, "lambda0 must be nonnegative");
  require(lambda0 <= 0.25, "critical exponent is undetermined for lambda0 > 1/4");
  return 0.5 + std::sqrt(0.25 - lambda0);
}

}  // namespace hypspec::hyp
