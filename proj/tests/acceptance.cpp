// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hypspec/bounds.hpp"
#include "hypspec/diffusion.hpp"
#include "hypspec/errors.hpp"
#include "hypspec/fem.hpp"
#include "hypspec/graph.hpp"
#include "hypspec/hyperbolic.hpp"
#include "hypspec/surface.hpp"

using namespace hypspec;

namespace {

constexpr double kPi = std::numbers::pi;

// tolerances
constexpr double kCheegerTol = 1e-10;
constexpr int kCheegerMinGraphs = 5;
constexpr int kCheegerMaxInterior = 16;
constexpr double kOracleRel = 0.01;
constexpr double kOrderRatioMin = 3.0 * 0.7;
constexpr double kNeumannFloor = 1e-6;
constexpr double kConstantSpread = 1e-6;
constexpr double kMonoSlack = -1e-8;
constexpr double kSymmetry = 1e-8;
constexpr double kMonotoneTol = 1e-8;
constexpr double kTrendFactor = 2.0;
constexpr double kQuotientSlack = 1e-3;
constexpr double kSandwichTol = 0.05;
constexpr double kPinchRel = 0.20;
constexpr double kCiMultiple = 3.0;
constexpr double kClosedForm = 1e-12;

// runtime budgets, seconds
constexpr double kBudget[] = {10, 120, 600, 600, 900, 900, 300, 1};

// mpmath, 30 digits
constexpr double kCollarL1 = 1.70003949501432344;
constexpr double kDiskR1 = 6.11308181971164858;

struct Verdict {
  bool pass = true;
  std::ostringstream note;

  void expect(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      note << " [failed: " << what << "]";
    }
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

double m_ref(double l) {
  const double x = 1.0 / std::sinh(0.5 * l);
  return std::log(x + std::sqrt(x * x + 1.0));
}

double boundary_fraction(const graph::Graph& g) {
  int b = 0;
  for (int i = 0; i < g.size(); ++i) b += g.is_boundary(i) ? 1 : 0;
  return static_cast<double>(b) / g.size();
}

hyp::CellSpec spec(int v, double l, hyp::Topology t = hyp::Topology::pants_ring) {
  hyp::CellSpec s;
  s.v = v;
  s.cuff_length = l;
  s.topology = t;
  return s;
}

surface::SolveOptions at(double h) {
  surface::SolveOptions o;
  o.mesh.h = h;
  return o;
}

void c1(Verdict& v) {
  const std::vector<std::pair<std::string, graph::Graph>> graphs{
      {"lattice(1,2)", graph::lattice(1, 2)},       {"lattice(1,8)", graph::lattice(1, 8)},
      {"lattice(2,2)", graph::lattice(2, 2)},       {"tree(3,3)", graph::regular_tree(3, 3)},
      {"tree(4,2)", graph::regular_tree(4, 2)},     {"free(2,2)", graph::free_group_ball(2, 2)}};
  int checked = 0;
  for (const auto& [name, g] : graphs) {
    v.expect(g.interior_count() <= kCheegerMaxInterior, name + " too large");
    const Eigen::MatrixXd L(graph::combinatorial_laplacian(g, graph::Dirichlet::tagged));
    const double mu = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(L).eigenvalues()[0];
    graph::CheegerOptions o;
    o.boundary = graph::BoundaryKind::edge;
    const double h = graph::cheeger(g, o).upper;
    const double lower = h * h / (2.0 * g.valence());
    v.expect(lower <= mu + kCheegerTol && mu <= h + kCheegerTol, name);
    ++checked;
  }
  v.expect(checked >= kCheegerMinGraphs, "graph count");
  v.note << checked << " graphs";
}

double collar_fem(double h) {
  const double half = hyp::collar_halfwidth(1.0);
  const auto mesh = mesh::collar_domain(1.0, -half, half, h);
  const auto p = fem::assemble(mesh);
  return fem::solve_low_spectrum(mesh, p, {fem::BC::dirichlet, fem::BC::dirichlet}, 1).eigenvalues[0];
}

void c2(Verdict& v) {
  const double e1 = rel(collar_fem(0.05), kCollarL1);
  const double e2 = rel(collar_fem(0.025), kCollarL1);
  const auto disk = mesh::geodesic_disk(1.0, 0.05);
  const double ed =
      rel(fem::solve_low_spectrum(disk, fem::assemble(disk), {fem::BC::dirichlet}, 1).eigenvalues[0], kDiskR1);
  v.expect(e1 < kOracleRel, "collar h=0.05");
  v.expect(e2 < e1 && e1 / e2 >= kOrderRatioMin, "order");
  v.expect(ed < kOracleRel, "disk");
  v.note << "collar err " << e1 << " -> " << e2 << " (ratio " << e1 / e2 << "), disk err " << ed;
}

void c3(Verdict& v) {
  const auto c = surface::analyze_cell(spec(3, 1.0), at(0.15));
  const auto psi = c.spectrum.psi0();
  v.expect(std::abs(c.lambda0N) <= kNeumannFloor, "Neumann lambda0");
  v.expect(psi.maxCoeff() - psi.minCoeff() <= kConstantSpread, "constant ground state");
  double worst_slack = 1e300;
  for (const auto& [s, h] : {std::pair{spec(3, 1.0), 0.2}, {spec(2, 1.0, hyp::Topology::torus_with_holes), 0.2},
                             {spec(4, 1.0), 0.25}}) {
    const auto r = surface::mono_neumann(s, at(h));
    worst_slack = std::min(worst_slack, r.slack);
  }
  v.expect(worst_slack >= kMonoSlack, "Neumann cut");
  double worst_sym = 0.0;
  for (const auto& [s, h] : {std::pair{spec(3, 1.0), 0.15}, {spec(4, 1.0), 0.25}}) {
    const auto d = surface::analyze_cell(s, at(h));
    if (!d.cell.J) {
      v.expect(false, "cell without symmetry");
      continue;
    }
    worst_sym = std::max(worst_sym, fem::symmetry_check(d.spectrum, d.pencil, *d.cell.J));
  }
  v.expect(worst_sym <= kSymmetry, "symmetry");
  v.note << "lambda0N " << c.lambda0N << ", min cut slack " << worst_slack << ", symmetry defect " << worst_sym;
}

void c4(Verdict& v) {
  const auto so = at(0.1);
  const auto cell = surface::analyze_cell(spec(2, 1.0, hyp::Topology::torus_with_holes), so);
  graph::GraphSpec g;
  g.kind = "lattice";
  g.d = 1;
  const std::vector<int> radii{2, 4, 8};
  const auto seq = surface::lambda0_dirichlet_sequence(cell, g, radii, so);
  for (std::size_t i = 1; i < seq.size(); ++i)
    v.expect(seq[i].lambda0_dirichlet <= seq[i - 1].lambda0_dirichlet + kMonotoneTol, "nonincreasing");
  const double ln = cell.lambda0N;
  const double f4 = boundary_fraction(g.build(4)), f8 = boundary_fraction(g.build(8));
  const double lhs = seq[2].lambda0_dirichlet - ln;
  const double rhs = kTrendFactor * (seq[1].lambda0_dirichlet - ln) * f8 / f4;
  v.expect(lhs <= rhs, "trend");
  const double a2 = bounds::A2(2, 1.0, ln);
  double worst = -1e300;
  for (int r : radii) {
    const auto ball = g.build(r);
    const auto tf = surface::upper_bound_test_function(cell, ball, so);
    const double excess = (tf.quotient - ln) - a2 * boundary_fraction(ball);
    worst = std::max(worst, excess);
    v.expect(excess <= kQuotientSlack, "quotient at radius " + std::to_string(r));
  }
  v.note << "lambda0D " << seq[0].lambda0_dirichlet << ", " << seq[1].lambda0_dirichlet << ", "
         << seq[2].lambda0_dirichlet << "; trend " << lhs << " <= " << rhs << "; quotient excess " << worst;
}

void c5(Verdict& v) {
  const auto so = at(0.1);
  const double l = 1.0;
  const auto cell = surface::analyze_cell(spec(3, l), so);
  graph::GraphSpec g;
  g.kind = "regular_tree";
  g.v = 3;
  const std::vector<int> radii{1, 2, 3};
  const auto seq = surface::lambda0_dirichlet_sequence(cell, g, radii, so);
  const double a1 = bounds::A1(cell.eta, cell.lambda1, l, cell.psi0_cuff);
  const double a2 = bounds::A2(3, l, cell.lambda0N);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const auto ball = g.build(radii[i]);
    const double lower = cell.lambda0N + a1 * seq[i].mu0;
    const double q = surface::upper_bound_test_function(cell, ball, so).quotient;
    const double upper = cell.lambda0N + a2 * boundary_fraction(ball);
    v.expect(lower - kSandwichTol <= seq[i].lambda0_dirichlet, "lower at radius " + std::to_string(radii[i]));
    v.expect(q <= upper + kSandwichTol, "upper at radius " + std::to_string(radii[i]));
    v.note << (i ? "; " : "") << "r" << radii[i] << ": " << lower << " <= " << seq[i].lambda0_dirichlet << ", "
           << q << " <= " << upper;
  }
}

void c6(Verdict& v) {
  auto s = spec(3, 2.0);
  s.funnels = {true, true, true};
  const auto t = surface::pinch_sweep(s, {1.0, 0.4, 0.2, 0.1, 0.05}, at(0.1));
  const auto& last = t.rows.back();
  v.expect(last.epsilon == 0.05, "smallest epsilon");
  const double err = rel(last.ratio, t.target);
  v.expect(err <= kPinchRel, "ratio at 0.05");
  double prev = 1e300;
  for (const auto& r : t.rows) {
    if (r.epsilon >= 1.0) continue;
    const double d = std::abs(r.ratio - t.target);
    v.expect(d <= prev, "trend at " + std::to_string(r.epsilon));
    prev = d;
  }
  v.note << "lambda/eps " << last.ratio << " vs " << t.target << " (error " << err << ")";
}

void c7(Verdict& v) {
  const auto g = graph::lattice(1, 2);
  const auto K = graph::combinatorial_laplacian(g, graph::Dirichlet::none);
  std::vector<int> ends;
  for (int i = 0; i < g.size(); ++i)
    if (g.is_boundary(i)) ends.push_back(i);
  const auto walk = diffusion::build_walk(K, Eigen::VectorXd::Ones(g.size()), ends);
  diffusion::SurvivalOptions o;
  o.n_paths = 100000;
  o.t_max = 10.0;
  o.seed = 11;
  const auto path = diffusion::survival_curve(walk, o);
  const double exact = 2.0 - std::sqrt(2.0);
  v.expect(std::abs(path.fitted_rate - exact) <= kCiMultiple * path.ci_half, "path rate");
  v.note << "path " << path.fitted_rate << " +- " << path.ci_half << " vs " << exact;

  const double half = hyp::collar_halfwidth(1.0);
  const auto mesh = mesh::collar_domain(1.0, -half, half, 0.2);
  const auto cw = diffusion::build_walk(fem::assemble(mesh),
                                        fem::dirichlet_dofs(mesh, {fem::BC::dirichlet, fem::BC::dirichlet}));
  auto oc = o;
  oc.t_max = 4.0;
  oc.seed = 5;
  const auto collar = diffusion::survival_curve(cw, oc);
  const double gen = diffusion::generator_lambda0(cw);
  v.expect(std::abs(collar.fitted_rate - gen) <= kCiMultiple * collar.ci_half, "collar rate");
  v.note << "; collar " << collar.fitted_rate << " +- " << collar.ci_half << " vs " << gen;

  const std::vector<double> bv{0.0, 1.0};
  const auto exact_h = diffusion::harmonic_oracle(walk, K, 0.0, bv);
  diffusion::HarmonicOptions ho;
  ho.paths_per_state = 20000;
  const auto h = diffusion::lambda_harmonic_extend(walk, 0.0, bv, std::nullopt, ho);
  for (int s = 0; s < walk.size(); ++s)
    v.expect(std::abs(h.value[s] - exact_h[s]) <= kCiMultiple * 1.96 * h.stderr_[s], "harmonic state");

  auto o2 = o;
  o2.threads = 3;
  const auto again = diffusion::survival_curve(walk, o2);
  v.expect(again.survival == path.survival && again.fitted_rate == path.fitted_rate, "reproducibility");
}

void c8(Verdict& v) {
  v.expect(rel(bounds::buser_constant(2), std::pow(2.0, 1.25)) <= kClosedForm, "R2");
  double worst = 0.0;
  for (double l : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    const double m = hyp::collar_halfwidth(l);
    worst = std::max(worst, std::abs(std::sinh(m) * std::sinh(0.5 * l) - 1.0));
    const double a2 = (3 - 1) * (1.0 / (m_ref(l) * m_ref(l)) + 0.1);
    v.expect(rel(bounds::A2(3, l, 0.1), a2) <= kClosedForm, "A2");
    v.expect(std::abs(bounds::A_tripleprime(l).minimizer - m_ref(l)) <= kClosedForm, "A''' minimizer");
  }
  v.expect(worst <= kClosedForm, "collar identity");
  const double k = 0.5, K = 2.0, eta = 0.2;
  const auto d = bounds::bounded_decomposition_bounds(k, K, 3, eta, bounds::LowerVariant::printed);
  v.expect(rel(d.upper, (3 - 1) * K / (m_ref(K) * m_ref(K))) <= kClosedForm, "decomposition upper");
  v.expect(rel(d.lower, eta / (1 + K / (k * eta))) <= kClosedForm, "decomposition lower");
  v.note << "sinh(m)sinh(l/2)-1 max " << worst;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> criteria{
      {"combinatorial Cheeger sandwich", c1},  {"FEM oracle agreement", c2},
      {"variational invariants", c3},          {"amenable equality trend", c4},
      {"non-amenable sandwich", c5},           {"pinching asymptotics", c6},
      {"Monte-Carlo consistency", c7},         {"closed-form regression", c8}};
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    v.note << std::setprecision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
      criteria[i].second(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.note << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    v.expect(secs <= kBudget[i], "runtime");
    failures += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  " << (i + 1) << ". " << criteria[i].first << "  (" << std::fixed
              << std::setprecision(1) << secs << " s)  " << std::defaultfloat << v.note.str() << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
