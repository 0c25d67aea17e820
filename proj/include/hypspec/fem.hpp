#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hypspec/eigensolver.hpp"
#include "hypspec/mesh.hpp"

// P1 elements on disk-model meshes: flat stiffness (the Dirichlet energy is
// conformally invariant) and a mass matrix weighted by (2/(1-|z|^2))^2.
namespace hypspec::fem {

using SpMat = Eigen::SparseMatrix<double>;

enum class Quadrature { three_point, seven_point };

struct AssemblyOptions {
  Quadrature quadrature = Quadrature::three_point;
  int threads = 1;
};

struct Pencil {
  SpMat K;
  SpMat M;
  int size() const { return static_cast<int>(K.rows()); }
};

Pencil assemble(const mesh::DiskMesh& m, const AssemblyOptions& opts = {});

enum class BC { neumann, dirichlet };
std::string to_string(BC bc);

/// Dofs on loops whose condition is Dirichlet; `per_loop` has one entry per
/// mesh loop.
std::vector<int> dirichlet_dofs(const mesh::DiskMesh& m, const std::vector<BC>& per_loop);

struct SpectralResult {
  std::vector<double> eigenvalues;
  Eigen::MatrixXd eigenvectors;  // full dof length, zero on Dirichlet dofs, M-orthonormal
  std::vector<double> residuals;
  std::vector<BC> bc;
  std::vector<int> dirichlet;
  double mesh_h = 0.0;
  int iterations = 0;

  Eigen::VectorXd psi0() const { return eigenvectors.col(0); }
};

SpectralResult solve_low_spectrum(const Pencil& p, const std::vector<int>& dirichlet, int count,
                                  const eig::Options& opts = {});
SpectralResult solve_low_spectrum(const mesh::DiskMesh& m, const Pencil& p,
                                  const std::vector<BC>& per_loop, int count,
                                  const eig::Options& opts = {});

/// max |psi0 - psi0 o J|. Throws ValidationError when J does not preserve K
/// and M.
double symmetry_check(const SpectralResult& r, const Pencil& p, const std::vector<int>& J);

/// Max relative deviation |K(Ji,Jj) - K(i,j)| (same for M).
double automorphism_defect(const Pencil& p, const std::vector<int>& J);

double spectral_gap(const SpectralResult& r);

double rayleigh_quotient(const Pencil& p, const Eigen::VectorXd& u);

/// Mean of psi0 over the nodes of the given loops.
double loop_mean(const mesh::DiskMesh& m, const Eigen::VectorXd& u, const std::vector<int>& loops);

/// Spectral CSV: index,eigenvalue,residual
std::string spectrum_csv(const SpectralResult& r);

}  // namespace hypspec::fem
