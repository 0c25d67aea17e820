#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "hypspec/disk_model.hpp"

// Triangulations living in one or several Poincare-disk charts. Triangles are
// straight in their chart; a dof may be carried by several chart points
// (gluing = identification of dofs).
namespace hypspec::mesh {

using disk::Point;

enum class LoopKind { cuff, truncation, collar_edge, circle };
std::string to_string(LoopKind k);

/// A run of consecutive loop nodes inside one chart.
struct LoopPiece {
  int chart = 0;
  std::vector<int> points;
};

struct BoundaryLoop {
  int id = 0;
  LoopKind kind = LoopKind::cuff;
  std::vector<int> dofs;   // cyclic order, each dof once
  std::vector<double> t;   // arclength parameter in [0, length)
  double length = 0.0;
  std::vector<LoopPiece> pieces;
};

struct DiskMesh {
  std::vector<Point> points;
  std::vector<int> chart;                    // per point
  std::vector<std::array<int, 3>> triangles; // point indices, counter-clockwise
  std::vector<int> dof;                      // per point
  int dof_count = 0;
  std::vector<BoundaryLoop> loops;

  int chart_count() const;
  /// Sum of the weighted 3-point quadrature, the same rule the mass matrix uses.
  double hyperbolic_area() const;
  /// Largest hyperbolic edge length.
  double max_edge_length() const;
  int euler_characteristic() const;
  /// Throws NumericalError on degenerate triangles, unclosed loops or cuff
  /// nodes off their geodesic.
  void validate() const;

  const BoundaryLoop& loop(LoopKind kind, int id) const;
  std::vector<int> loop_indices(LoopKind kind) const;
  /// One point carrying each dof.
  std::vector<int> representative_points() const;
};

/// Unions dof pairs and renumbers dofs in order of first appearance.
void identify_dofs(DiskMesh& m, const std::vector<std::pair<int, int>>& pairs);

/// Makes every triangle counter-clockwise in its chart.
void orient(DiskMesh& m);

/// Combines meshes, each in its own charts, and glues boundary loops.
class MeshBuilder {
 public:
  int add(const DiskMesh& part);
  /// Glues loop `la` of part `a` to loop `lb` of part `b`. With `reverse`
  /// the node at parameter t meets the node at -t mod length (orientation
  /// reversing, zero twist). Throws ValidationError on mismatched nodes.
  void glue(int a, int la, int b, int lb, bool reverse = true);

  struct Result {
    DiskMesh mesh;
    std::vector<std::vector<int>> part_dofs;   // part-local dof -> global dof
    std::vector<int> part_chart_offset;
    std::vector<std::pair<int, int>> loop_origin;  // (part, loop index) per kept loop
  };
  Result finish() const;

  const DiskMesh& part(int i) const { return parts_.at(i); }

 private:
  std::vector<DiskMesh> parts_;
  std::vector<std::pair<int, int>> pairs_;  // global pre-merge dof pairs
  std::vector<std::pair<int, int>> glued_;  // (part, loop) consumed
  std::vector<int> dof_offset_;
  int total_dofs_ = 0;
};

// ---- mesh generators ----

struct MeshOptions {
  double h = 0.1;
  bool graded = true;  // tangential-aware row spacing for thin collars
};

/// Region { s0 <= s <= s1, 0 <= r <= height(s) } in Fermi coordinates of the
/// real diameter, meshed in rows r = rho * height(s). The node count per row
/// doubles whenever the tangential spacing exceeds 1.5 h.
struct FermiPatch {
  DiskMesh mesh;  // single chart, dofs = points
  std::vector<int> bottom, top, left, right;  // point chains, bottom/top in increasing s
  std::vector<double> bottom_s;
};

FermiPatch fermi_patch(double s0, double s1, const std::function<double(double)>& height,
                       int base_intervals, const MeshOptions& opts);

/// Doubled right-angled 2v-gon with alternating sides l/2: a sphere with v
/// geodesic boundaries of length l, cuff loops with ids 0..v-1. Charts 0 and
/// 1 hold the two polygons (chart 1 is the mirror image of chart 0).
DiskMesh doubled_polygon(int v, double l, const MeshOptions& opts);

/// Fermi strip {0 <= r <= r_trunc} over a closed geodesic of length l with
/// `base_nodes` equally spaced nodes on the geodesic. Loop 0 is the geodesic
/// (kind cuff), loop 1 the truncation curve.
DiskMesh funnel_strip(double l, int base_nodes, double r_trunc, const MeshOptions& opts);

/// Collar S^1 x [r0, r1] on a uniform (s, r) grid with ceil(l/h) by
/// ceil((r1-r0)/h) intervals. Loops (kind collar_edge): 0 at r0, 1 at r1.
DiskMesh collar_domain(double l, double r0, double r1, double h);

/// Geodesic disk of radius R about the origin: concentric rings plus a centre
/// fan. Loop 0 (kind circle) is the rim.
DiskMesh geodesic_disk(double radius, double h);

/// Applies a Mobius map (or its conjugate) to every point of a chart.
void transform_chart(DiskMesh& m, int chart, const std::function<Point(Point)>& f);

/// Distance from each dof to the closed geodesic traced by loop `loop`,
/// using the loop's pieces in each chart; infinity in charts without pieces.
std::vector<double> distance_to_loop(const DiskMesh& m, int loop);

/// Structured-text export: points, charts, dofs, triangles, loops.
std::string export_json(const DiskMesh& m);

}  // namespace hypspec::mesh
