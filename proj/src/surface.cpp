#include "hypspec/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "hypspec/config.hpp"
#include "hypspec/errors.hpp"

namespace hypspec::surface {

using fem::BC;
using mesh::LoopKind;

namespace {

std::vector<BC> cell_conditions(const mesh::DiskMesh& m) {
  std::vector<BC> out;
  for (const auto& l : m.loops) out.push_back(l.kind == LoopKind::truncation ? BC::dirichlet : BC::neumann);
  return out;
}

Eigen::VectorXd restrict_to_cell(const Eigen::VectorXd& f, const std::vector<int>& dofs) {
  Eigen::VectorXd out(dofs.size());
  for (std::size_t d = 0; d < dofs.size(); ++d) out[d] = f[dofs[d]];
  return out;
}

}  // namespace

CellData analyze_cell(const hyp::CellSpec& spec, const SolveOptions& opts) {
  CellData c;
  c.cell = cell::build_cell(spec, opts.mesh);
  c.pencil = fem::assemble(c.cell.mesh, opts.assembly);
  c.spectrum = fem::solve_low_spectrum(c.cell.mesh, c.pencil, cell_conditions(c.cell.mesh), 2, opts.eig);
  c.lambda0N = c.spectrum.eigenvalues[0];
  c.lambda1 = c.spectrum.eigenvalues[1];
  c.eta = fem::spectral_gap(c.spectrum);
  const auto loops = c.cell.gluable_loops();
  c.psi0_cuff = loops.empty() ? std::numeric_limits<double>::quiet_NaN()
                              : fem::loop_mean(c.cell.mesh, c.spectrum.psi0(), loops);
  return c;
}

Assembly assemble_truncation(const CellData& cell, const graph::Graph& ball, bool ghosts,
                             const SolveOptions& opts) {
  const auto& C = cell.cell;
  const int v = C.v();
  if (ball.valence() != v)
    throw ValidationError("valence mismatch: graph has valence " + std::to_string(ball.valence()) +
                          ", cell has " + std::to_string(v) + " boundaries");
  require(static_cast<int>(C.gluable_loops().size()) == v,
          "cells with funnels cannot be glued along a graph");
  const int n = ball.size();
  long long parts = n;
  for (int i = 0; i < n; ++i)
    for (int q : ball.ports(i))
      if (q < 0 && ghosts) ++parts;
  if (parts * C.mesh.dof_count > static_cast<long long>(kMaxAssemblyUnknowns))
    throw ValidationError("assembly refused: " + std::to_string(parts * C.mesh.dof_count) +
                          " unknowns exceed the memory cap");

  Assembly a;
  a.ball = ball;
  a.cells = n;
  mesh::MeshBuilder b;
  for (int i = 0; i < n; ++i) b.add(C.mesh);
  for (int i = 0; i < n; ++i) {
    bool dangling = false;
    const auto& ports = ball.ports(i);
    for (int p = 0; p < v; ++p) {
      const int j = ports[p];
      if (j < 0) {
        dangling = true;
        ++a.dangling_cuffs;
        if (ghosts) {
          const int g = b.add(C.mesh);
          b.glue(i, C.boundary_loop[p], g, C.boundary_loop[p]);
          a.ghost_at.emplace_back(i, p);
        }
      } else if (i < j) {
        b.glue(i, C.boundary_loop[p], j, C.boundary_loop[ball.port(j, i)]);
        ++a.glued_cuffs;
      }
    }
    a.boundary_cells += dangling ? 1 : 0;
  }
  a.ghosts = static_cast<int>(a.ghost_at.size());
  auto res = b.finish();
  a.mesh = std::move(res.mesh);
  a.cell_dofs = std::move(res.part_dofs);
  std::vector<BC> bcs(a.mesh.loops.size(), BC::dirichlet);
  a.dirichlet = fem::dirichlet_dofs(a.mesh, bcs);
  a.pencil = fem::assemble(a.mesh, opts.assembly);
  return a;
}

double lambda0_dirichlet(const Assembly& a, const SolveOptions& opts) {
  return fem::solve_low_spectrum(a.pencil, a.dirichlet, 1, opts.eig).eigenvalues[0];
}

std::vector<SequenceRow> lambda0_dirichlet_sequence(const CellData& cell, const graph::GraphSpec& g,
                                                    const std::vector<int>& radii,
                                                    const SolveOptions& opts) {
  require(!radii.empty(), "no radii given");
  require(std::is_sorted(radii.begin(), radii.end()), "radii must be increasing");
  std::vector<SequenceRow> rows;
  for (int r : radii) {
    const auto ball = g.build(r);
    const auto a = assemble_truncation(cell, ball, false, opts);
    SequenceRow row;
    row.radius = r;
    row.cells = a.cells;
    row.unknowns = a.pencil.size() - static_cast<int>(a.dirichlet.size());
    row.lambda0_dirichlet = lambda0_dirichlet(a, opts);
    row.mu0 = graph::mu0(ball, graph::Dirichlet::outside);
    row.boundary_ratio = a.boundary_ratio();
    if (row.lambda0_dirichlet < cell.lambda0N - kTol.min_gene)
      throw NumericalError("truncation eigenvalue below the Neumann eigenvalue of the cell");
    rows.push_back(row);
  }
  return rows;
}

TestFunctionResult upper_bound_test_function(const CellData& cell, const graph::Graph& ball,
                                             const SolveOptions& opts, double tol) {
  const auto a = assemble_truncation(cell, ball, true, opts);
  const auto& C = cell.cell;
  const double l = C.spec.cuff_length;
  const double m = hyp::collar_halfwidth(l);
  const Eigen::VectorXd psi = cell.spectrum.psi0();

  TestFunctionResult r;
  r.f = Eigen::VectorXd::Zero(a.pencil.size());
  for (int k = 0; k < a.ghosts; ++k) {
    const auto dist = mesh::distance_to_loop(C.mesh, C.boundary_loop[a.ghost_at[k].second]);
    const auto& dofs = a.cell_dofs[a.cells + k];
    for (std::size_t d = 0; d < dofs.size(); ++d)
      r.f[dofs[d]] = psi[d] * std::max(0.0, 1.0 - dist[d] / m);
  }
  for (int i = 0; i < a.cells; ++i)
    for (std::size_t d = 0; d < a.cell_dofs[i].size(); ++d) r.f[a.cell_dofs[i][d]] = psi[d];
  for (int d : a.dirichlet)
    if (std::abs(r.f[d]) > 1e-12) throw NumericalError("test function does not vanish on the Dirichlet cuffs");

  r.quotient = fem::rayleigh_quotient(a.pencil, r.f);
  r.epsilon = std::max(*std::max_element(cell.spectrum.residuals.begin(), cell.spectrum.residuals.end()),
                       1e-6);
  const double lam = cell.lambda0N + r.epsilon;
  const double per = 1.0 / (m * m) + lam;
  r.bound = lam + (C.v() - 1) * per * a.boundary_ratio();
  r.ghost_bound = lam + per * a.ghosts / static_cast<double>(a.cells);
  r.lambda0_extended = lambda0_dirichlet(a, opts);
  if (r.quotient < r.lambda0_extended - 1e-10)
    throw NumericalError("Rayleigh quotient below the Dirichlet eigenvalue of its own domain");
  r.holds = r.quotient <= r.bound + tol;
  return r;
}

ProjectionReport projection_diagnostics(const CellData& cell, const Assembly& a,
                                        const Eigen::VectorXd& f, bounds::Combine combine) {
  require(f.size() == a.pencil.size(), "vector does not match the assembly");
  const Eigen::VectorXd psi = cell.spectrum.psi0();
  const auto& K = cell.pencil.K;
  const auto& M = cell.pencil.M;
  if (std::abs(psi.dot(M * psi) - 1.0) > 1e-8) throw ValidationError("psi0 is not normalised on the cell");
  ProjectionReport rep;
  const int parts = a.cells + a.ghosts;
  for (int i = 0; i < parts; ++i) {
    const Eigen::VectorXd fi = restrict_to_cell(f, a.cell_dofs[i]);
    CellProjection p;
    const double a2 = fi.dot(M * fi);
    p.b = psi.dot(M * fi);
    const Eigen::VectorXd g = fi - p.b * psi;
    const double c2 = g.dot(M * g);
    p.a = std::sqrt(a2);
    p.c = std::sqrt(std::max(c2, 0.0));
    p.grad_g = g.dot(K * g);
    rep.pythagoras_defect = std::max(rep.pythagoras_defect, std::abs(a2 - p.b * p.b - c2));
    rep.sum_grad_g += p.grad_g;
    rep.cells.push_back(p);
  }
  // ghosts are neighbours of their ball cell; free ports count as b = 0
  std::vector<std::vector<int>> nb(parts, std::vector<int>(cell.cell.v(), -1));
  for (int i = 0; i < a.cells; ++i) nb[i] = a.ball.ports(i);
  for (int k = 0; k < a.ghosts; ++k) {
    const auto [i, p] = a.ghost_at[k];
    nb[i][p] = a.cells + k;
    nb[a.cells + k][p] = i;
  }
  for (int i = 0; i < parts; ++i)
    for (int j : nb[i]) {
      const double bi = rep.cells[i].b;
      if (j < 0) rep.edge_sum += bi * bi;
      else if (i < j) rep.edge_sum += (bi - rep.cells[j].b) * (bi - rep.cells[j].b);
    }
  rep.A = bounds::collar_constant(cell.lambda1, cell.cell.spec.cuff_length, cell.psi0_cuff, combine);
  rep.rhs = rep.A * rep.edge_sum;
  rep.slack = rep.sum_grad_g - rep.rhs;
  rep.holds = rep.slack >= -1e-10;
  return rep;
}

PinchTable pinch_sweep(const hyp::CellSpec& base, const std::vector<double>& epsilons,
                       const SolveOptions& opts) {
  require(!epsilons.empty(), "no epsilons given");
  PinchTable t;
  t.target = base.v * base.cuff_length / (std::numbers::pi * base.core_area());
  for (double e : epsilons) {
    require(e >= 0.05 - 1e-12 && e <= 1.0, "epsilon must lie in [0.05, 1]");
    auto s = base;
    s.cuff_length = base.cuff_length * e;
    s.funnels.assign(s.v, true);
    const auto c = cell::build_cell(s, opts.mesh);
    const auto p = fem::assemble(c.mesh, opts.assembly);
    const auto r = fem::solve_low_spectrum(c.mesh, p, cell_conditions(c.mesh), 1, opts.eig);
    PinchRow row;
    row.epsilon = e;
    row.lambda0 = r.eigenvalues[0];
    row.ratio = row.lambda0 / e;
    row.unknowns = p.size() - static_cast<int>(r.dirichlet.size());
    if (row.lambda0 > 0.25 + 0.05) {
      std::ostringstream w;
      w << "lambda0 = " << row.lambda0 << " at epsilon = " << e
        << " exceeds 1/4 + 0.05; the funnel truncation is too short to resolve it";
      t.warnings.push_back(w.str());
    }
    t.rows.push_back(row);
  }
  // the unpinched row is only there for continuity
  std::vector<PinchRow> pinched;
  for (const auto& r : t.rows)
    if (r.epsilon < 1.0) pinched.push_back(r);
  std::sort(pinched.begin(), pinched.end(), [](const auto& x, const auto& y) { return x.epsilon > y.epsilon; });
  t.monotone = true;
  for (std::size_t i = 1; i < pinched.size(); ++i)
    if (std::abs(pinched[i].ratio - t.target) > std::abs(pinched[i - 1].ratio - t.target))
      t.monotone = false;
  const auto smallest = std::min_element(t.rows.begin(), t.rows.end(),
                                         [](const auto& x, const auto& y) { return x.epsilon < y.epsilon; });
  t.final_error = std::abs(smallest->ratio - t.target) / t.target;
  return t;
}

MonoNeumResult mono_neumann(const hyp::CellSpec& spec, const SolveOptions& opts) {
  auto whole_spec = spec;
  whole_spec.funnels.assign(spec.v, true);
  auto rest_spec = whole_spec;
  rest_spec.funnels[0] = false;

  auto lowest = [&](const mesh::DiskMesh& m) {
    const auto p = fem::assemble(m, opts.assembly);
    return fem::solve_low_spectrum(m, p, cell_conditions(m), 1, opts.eig).eigenvalues[0];
  };
  const auto rest = cell::build_cell(rest_spec, opts.mesh);
  const int nodes = static_cast<int>(rest.mesh.loops[rest.boundary_loop[0]].dofs.size());
  MonoNeumResult r;
  r.whole = lowest(cell::build_cell(whole_spec, opts.mesh).mesh);
  r.piece_a = lowest(mesh::funnel_strip(spec.cuff_length, nodes, spec.r_trunc, opts.mesh));
  r.piece_b = lowest(rest.mesh);
  r.slack = r.whole - std::min(r.piece_a, r.piece_b);
  return r;
}

std::string sequence_csv(const std::vector<SequenceRow>& rows, const std::vector<double>& upper,
                         const std::vector<double>& lower, const std::vector<double>& h_upper) {
  require(upper.size() == rows.size() && lower.size() == rows.size() && h_upper.size() == rows.size(),
          "one bound per radius required");
  std::ostringstream os;
  os.precision(17);
  os << "radius,lambda0_dirichlet,upper_bound,lower_bound,mu0,h_upper\n";
  for (std::size_t i = 0; i < rows.size(); ++i)
    os << rows[i].radius << ',' << rows[i].lambda0_dirichlet << ',' << upper[i] << ',' << lower[i]
       << ',' << rows[i].mu0 << ',' << h_upper[i] << '\n';
  return os.str();
}

std::string pinch_csv(const PinchTable& t) {
  std::ostringstream os;
  os.precision(17);
  os << "epsilon,lambda0,ratio,target\n";
  for (const auto& r : t.rows) os << r.epsilon << ',' << r.lambda0 << ',' << r.ratio << ',' << t.target << '\n';
  return os.str();
}

}  // namespace hypspec::surface
