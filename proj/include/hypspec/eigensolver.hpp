#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

// Lowest eigenpairs of a symmetric pencil K u = lambda M u with M positive
// definite.
namespace hypspec::eig {

using SpMat = Eigen::SparseMatrix<double>;

struct Options {
  int count = 1;
  double shift = -0.01;
  double tol = 1e-8;        // on ||K u - lambda M u|| / ||M u||
  int max_restarts = 400;
  std::uint64_t seed = 0x243F6A8885A308D3ull;
  int dense_cutoff = 200;   // below this many unknowns use a dense solve
};

struct Pairs {
  std::vector<double> values;
  Eigen::MatrixXd vectors;  // M-orthonormal columns
  std::vector<double> residuals;
  int iterations = 0;
  bool dense = false;
};

Pairs smallest(const SpMat& K, const SpMat& M, const Options& opts);
Pairs dense_smallest(const Eigen::MatrixXd& K, const Eigen::MatrixXd& M, int count);

double residual(const SpMat& K, const SpMat& M, double lambda, const Eigen::VectorXd& u);

/// Column 0 gets a positive sum, the others a positive first significant entry.
void normalize_signs(Eigen::MatrixXd& vectors);

}  // namespace hypspec::eig
