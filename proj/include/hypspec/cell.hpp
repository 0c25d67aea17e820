#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hypspec/hyperbolic.hpp"
#include "hypspec/mesh.hpp"

// Meshed cells: the compact part built from doubled right-angled polygons,
// optional funnels, and the order-v symmetry J as a dof permutation.
namespace hypspec::cell {

struct ChartMap {
  int target = 0;
  std::function<mesh::Point(mesh::Point)> f;
};

struct Cell {
  hyp::CellSpec spec;
  mesh::DiskMesh mesh;
  std::vector<int> boundary_loop;   // mesh loop index of free boundary k, -1 if a funnel is attached
  std::vector<int> truncation_loops;
  std::optional<std::vector<int>> J;  // dof -> dof, cycles boundary k to k+1
  double h = 0.0;

  int v() const { return spec.v; }
  /// Loops a surface assembly may glue (free geodesic boundaries).
  std::vector<int> gluable_loops() const;
};

Cell build_cell(const hyp::CellSpec& spec, const mesh::MeshOptions& opts);

/// Dof permutation induced by chart maps; throws NumericalError when some
/// image point is not a mesh point or the map is not a bijection on dofs.
std::vector<int> dof_map(const mesh::DiskMesh& m, const std::vector<ChartMap>& maps,
                         double tol = 1e-9);

}  // namespace hypspec::cell
