#pragma once

#include <cstddef>

namespace hypspec {

// Tolerances shared across modules. Kept in one place so that tests and the
// CLI agree on what "converged" or "matches" means.
struct Tolerances {
  double closed_form = 1e-12;      // identities of closed-form constants
  double eigen_residual = 1e-8;    // ||K u - lambda M u|| / ||M u||
  double eigen_floor = -1e-10;     // smallest admissible eigenvalue
  double cheeger_sandwich = 1e-10;
  double geodesic_snap = 1e-9;     // boundary nodes on their geodesic
  double cuff_match = 1e-9;        // glued node parameters
  double mesh_area_rel = 5e-3;     // hyperbolic area vs Gauss-Bonnet
  double min_triangle_area = 1e-14;
  double symmetry = 1e-8;
  double mono_neumann = 1e-8;
  double min_gene = 1e-6;
};

inline constexpr Tolerances kTol{};

inline constexpr std::size_t kDenseEigenCutoff = 200;
inline constexpr std::size_t kMaxAssemblyUnknowns = 2'000'000;
inline constexpr int kDefaultCheegerCap = 16;
inline constexpr double kDefaultFunnelTruncation = 3.0;

}  // namespace hypspec
