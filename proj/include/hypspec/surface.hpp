#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hypspec/bounds.hpp"
#include "hypspec/cell.hpp"
#include "hypspec/fem.hpp"
#include "hypspec/graph.hpp"

// Finite truncations of a surface modeled on a graph and the diagnostics of
// both halves of the sandwich.
namespace hypspec::surface {

struct SolveOptions {
  mesh::MeshOptions mesh;
  fem::AssemblyOptions assembly;
  eig::Options eig;
};

/// Reference cell with its Neumann spectrum (truncation loops Dirichlet).
struct CellData {
  cell::Cell cell;
  fem::Pencil pencil;
  fem::SpectralResult spectrum;  // two lowest pairs
  double lambda0N = 0.0;
  double lambda1 = 0.0;
  double eta = 0.0;
  double psi0_cuff = 0.0;  // mean of psi0 over the cuff nodes, int psi0^2 = 1
};

CellData analyze_cell(const hyp::CellSpec& spec, const SolveOptions& opts);

struct Assembly {
  graph::Graph ball;
  int cells = 0;    // ball cells, one per graph vertex
  int ghosts = 0;   // ghost cells attached at dangling cuffs
  mesh::DiskMesh mesh;
  fem::Pencil pencil;
  std::vector<std::vector<int>> cell_dofs;  // cell-local dof -> global, ghosts after ball cells
  std::vector<std::pair<int, int>> ghost_at;  // (ball cell, port) per ghost
  std::vector<int> dirichlet;
  int glued_cuffs = 0;
  int dangling_cuffs = 0;
  int boundary_cells = 0;  // cells with a dangling cuff

  double boundary_ratio() const { return static_cast<double>(boundary_cells) / cells; }
};

/// Glues one copy of the cell per ball vertex along the graph edges (port p
/// of i to port q of j, zero twist). Dangling cuffs become Dirichlet; with
/// `ghosts` a ghost copy is glued at each of them instead and its free
/// cuffs are Dirichlet.
Assembly assemble_truncation(const CellData& cell, const graph::Graph& ball, bool ghosts,
                             const SolveOptions& opts);

double lambda0_dirichlet(const Assembly& a, const SolveOptions& opts);

struct SequenceRow {
  int radius = 0;
  int cells = 0;
  int unknowns = 0;
  double lambda0_dirichlet = 0.0;
  double mu0 = 0.0;          // outside-Dirichlet graph ball
  double boundary_ratio = 0.0;  // #dG / #G
};

std::vector<SequenceRow> lambda0_dirichlet_sequence(const CellData& cell, const graph::GraphSpec& g,
                                                    const std::vector<int>& radii,
                                                    const SolveOptions& opts);

struct TestFunctionResult {
  double quotient = 0.0;
  double epsilon = 0.0;
  double bound = 0.0;          // lambda0N + eps + (v-1)(1/m^2 + lambda0N + eps) #dG/#G
  double ghost_bound = 0.0;    // same with the ghost count in place of (v-1)#dG
  double lambda0_extended = 0.0;  // Dirichlet lambda0 of ball plus ghosts
  bool holds = false;
  Eigen::VectorXd f;
};

/// Rayleigh quotient of psi0 copied on every ball cell and cut off linearly
/// over the collar of width m(l) in each ghost cell.
TestFunctionResult upper_bound_test_function(const CellData& cell, const graph::Graph& ball,
                                             const SolveOptions& opts, double tol = 0.05);

struct CellProjection {
  double a = 0.0, b = 0.0, c = 0.0;
  double grad_g = 0.0;  // ||grad g_i||^2 on the cell
};

struct ProjectionReport {
  std::vector<CellProjection> cells;
  double sum_grad_g = 0.0;
  double edge_sum = 0.0;        // sum over edges (b_i - b_j)^2, dangling ports with b = 0
  double A = 0.0;
  double rhs = 0.0;             // A * edge_sum
  double slack = 0.0;           // sum_grad_g - rhs
  double pythagoras_defect = 0.0;
  bool holds = false;
};

ProjectionReport projection_diagnostics(const CellData& cell, const Assembly& a,
                                        const Eigen::VectorXd& f,
                                        bounds::Combine combine = bounds::Combine::max);

struct PinchRow {
  double epsilon = 0.0;
  double lambda0 = 0.0;
  double ratio = 0.0;
  int unknowns = 0;
};

struct PinchTable {
  std::vector<PinchRow> rows;
  double target = 0.0;  // boundary length / (pi Vol) of the unpinched core
  bool monotone = false;     // distance to target shrinks as epsilon < 1 decreases
  double final_error = 0.0;  // relative error at the smallest epsilon
  std::vector<std::string> warnings;  // rows above 1/4 + 0.05 (truncated funnels overestimate)
};

/// Cell with all boundaries carrying funnels, cuffs scaled by epsilon.
PinchTable pinch_sweep(const hyp::CellSpec& base, const std::vector<double>& epsilons,
                       const SolveOptions& opts);

struct MonoNeumResult {
  double whole = 0.0;
  double piece_a = 0.0;  // one funnel alone
  double piece_b = 0.0;  // cell with the remaining funnels
  double slack = 0.0;    // whole - min(a, b)
};

/// Splits a funnel-bearing cell along the geodesic under funnel 0 and
/// compares lowest eigenvalues with Neumann on the cut (truncations Dirichlet).
MonoNeumResult mono_neumann(const hyp::CellSpec& spec, const SolveOptions& opts);

std::string sequence_csv(const std::vector<SequenceRow>& rows,
                         const std::vector<double>& upper, const std::vector<double>& lower,
                         const std::vector<double>& h_upper);
std::string pinch_csv(const PinchTable& t);

}  // namespace hypspec::surface
